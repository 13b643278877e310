"""Lectura de diffs unificados en hunks."""

import re

from .exceptions import LoadError
from .records import Hunk, HunkLine

HUNK_HEADER_RE = re.compile(r'^@@ -\d+(?:,(\d+))? \+\d+(?:,(\d+))? @@')


def _target_path(line):
    path = line[4:].split('\t')[0].strip()
    if path == '/dev/null':
        return None
    if path[:2] in ('a/', 'b/'):
        path = path[2:]
    return path


def parse_unified_diff(text, source='diff'):
    """Convertir el texto de un diff unificado en una lista de Hunk."""
    hunks = []
    file_path = None
    old_path = None
    lines = text.splitlines()
    index = 0
    while index < len(lines):
        line = lines[index]
        index += 1
        if line.startswith('--- '):
            old_path = _target_path(line)
            continue
        if line.startswith('+++ '):
            file_path = _target_path(line) or old_path
            continue
        match = HUNK_HEADER_RE.match(line)
        if not match:
            continue
        if file_path is None:
            raise LoadError('Hunk sin archivo de destino', f"{source}:{index}")

        old_remaining = int(match.group(1) or 1)
        new_remaining = int(match.group(2) or 1)
        body = []
        while old_remaining > 0 or new_remaining > 0:
            if index >= len(lines):
                raise LoadError('Hunk truncado', f"{source}:{index}")
            raw = lines[index]
            index += 1
            if raw.startswith('\\'):
                continue
            marker, content = (raw[0], raw[1:]) if raw else (' ', '')
            if marker == '-':
                old_remaining -= 1
            elif marker == '+':
                new_remaining -= 1
            elif marker == ' ':
                old_remaining -= 1
                new_remaining -= 1
            else:
                raise LoadError(f"Marcador de línea inválido '{marker}'", f"{source}:{index}")
            body.append(HunkLine(marker, content))
        if old_remaining < 0 or new_remaining < 0:
            raise LoadError('El hunk no coincide con su cabecera', f"{source}:{index}")
        hunks.append(Hunk(file_path=file_path, header=line, lines=tuple(body)))
    return hunks
