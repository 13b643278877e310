"""Limpieza de hunks y separación en fragmentos de código."""

import logging
import re
from dataclasses import dataclass

logger = logging.getLogger(__name__)

PUNCTUATION_ONLY_RE = re.compile(r'^[\s{}()\[\];,]*$')


@dataclass(frozen=True)
class CleanedLine:
    marker: str
    text: str
    number: int

    @property
    def is_changed(self):
        return self.marker != ' '


@dataclass(frozen=True)
class CleanedHunk:
    file_path: str
    header: str
    language: str
    lines: tuple = ()

    @property
    def changed_lines(self):
        return [line for line in self.lines if line.is_changed]


@dataclass(frozen=True)
class CodeFragment:
    id: str
    project: str
    commit_id: str
    file_path: str
    language: str
    deleted_lines: tuple = ()
    added_lines: tuple = ()
    deleted_numbers: tuple = ()
    added_numbers: tuple = ()

    def __post_init__(self):
        if not self.deleted_lines and not self.added_lines:
            raise ValueError('Un fragmento necesita al menos una línea')

    @property
    def lines(self):
        """Líneas del fragmento en orden de aparición: (marcador, texto, número)."""
        rows = [('-', text, number) for text, number in zip(self.deleted_lines, self.deleted_numbers)]
        rows += [('+', text, number) for text, number in zip(self.added_lines, self.added_numbers)]
        return sorted(rows, key=lambda row: row[2])


def strip_comments(texts, language):
    """Quitar comentarios de líneas consecutivas; un bloque puede abarcar varias líneas."""
    opener, closer = language.block_comment or (None, None)
    in_block = False
    cleaned = []
    for text in texts:
        out = []
        quote = None
        index = 0
        while index < len(text):
            if in_block:
                end = text.find(closer, index)
                if end < 0:
                    break
                index = end + len(closer)
                in_block = False
                out.append(' ')
                continue
            char = text[index]
            if quote:
                out.append(char)
                if char == '\\' and quote != '`' and index + 1 < len(text):
                    out.append(text[index + 1])
                    index += 2
                    continue
                if char == quote:
                    quote = None
                index += 1
                continue
            if opener and text.startswith(opener, index):
                in_block = True
                index += len(opener)
                continue
            if any(text.startswith(marker, index) for marker in language.line_comments):
                break
            if char in language.string_quotes:
                quote = char
            out.append(char)
            index += 1
        cleaned.append(''.join(out).strip())
    return cleaned


def is_noise(text, language):
    """Línea cambiada sin contenido útil: vacía, solo llaves o un import."""
    return not text or bool(PUNCTUATION_ONLY_RE.match(text)) or language.is_import(text)


def clean_hunk(hunk, config):
    """Hunk limpio, o None si el archivo no es código fuente o es de pruebas."""
    language = config.language_for(hunk.file_path)
    if language is None:
        logger.debug("Hunk descartado por sufijo: %s", hunk.file_path)
        return None
    if config.is_test_path(hunk.file_path):
        logger.debug("Hunk descartado por ser de pruebas: %s", hunk.file_path)
        return None

    texts = strip_comments([line.text for line in hunk.lines], language)
    lines = []
    for number, (line, text) in enumerate(zip(hunk.lines, texts), start=1):
        if line.is_changed and is_noise(text, language):
            continue
        lines.append(CleanedLine(line.marker, text, number))
    return CleanedHunk(hunk.file_path, hunk.header, language.name, tuple(lines))


def split_fragments(cleaned, project='', commit_id='', hunk_index=1):
    """Cada racha máxima de líneas cambiadas forma un fragmento."""
    fragments = []
    run = []

    def close_run():
        if not run:
            return
        deleted = [line for line in run if line.marker == '-']
        added = [line for line in run if line.marker == '+']
        fragments.append(CodeFragment(
            id=f"{commit_id}-{hunk_index}-{len(fragments) + 1}",
            project=project,
            commit_id=commit_id,
            file_path=cleaned.file_path,
            language=cleaned.language,
            deleted_lines=tuple(line.text for line in deleted),
            added_lines=tuple(line.text for line in added),
            deleted_numbers=tuple(line.number for line in deleted),
            added_numbers=tuple(line.number for line in added),
        ))
        run.clear()

    for line in cleaned.lines:
        if line.is_changed:
            run.append(line)
        else:
            close_run()
    close_run()
    return fragments


def commit_fragments(commit, config):
    """Fragmentos de todos los hunks de un commit, en orden."""
    fragments = []
    for hunk_index, hunk in enumerate(commit.hunks, start=1):
        cleaned = clean_hunk(hunk, config)
        if cleaned is None:
            continue
        fragments.extend(split_fragments(cleaned, commit.project, commit.id, hunk_index))
    return fragments
