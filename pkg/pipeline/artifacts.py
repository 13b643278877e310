"""Escritura atómica de artefactos con cabecera de procedencia."""

import contextlib
import csv
import io
import json
import logging
import os
from pathlib import Path

import numpy as np

from chainvuln import __version__

from .exceptions import MissingArtifactError

logger = logging.getLogger(__name__)

TOOL_NAME = 'chainvuln'


def write_atomic(path, content):
    """Escribir en un temporal del mismo directorio y reemplazar el destino."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    try:
        with open(tmp, 'w', encoding='utf-8', newline='') as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            tmp.unlink()
        raise


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Tipo no serializable: {type(value).__name__}")


def dumps(document):
    return json.dumps(document, indent=2, ensure_ascii=False, default=_json_default) + '\n'


class ArtifactWriter:
    """Artefactos de un comando dentro del directorio de salida."""

    def __init__(self, output_dir, config_digest):
        self.output_dir = Path(output_dir)
        self.config_digest = config_digest
        self.written = []

    def meta(self, name):
        return {
            'tool': TOOL_NAME,
            'version': __version__,
            'config_digest': self.config_digest,
            'artifact': name,
        }

    def header_line(self):
        return f"# tool={TOOL_NAME} version={__version__} config_digest={self.config_digest}\n"

    def path(self, name):
        return self.output_dir / name

    def _write(self, name, content):
        path = self.path(name)
        write_atomic(path, content)
        self.written.append(name)
        logger.debug("Artefacto escrito: %s", path)
        return path

    def write_json(self, name, payload):
        return self._write(name, dumps({'meta': self.meta(name), **payload}))

    def write_csv(self, name, header, rows):
        buffer = io.StringIO()
        buffer.write(self.header_line())
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
        return self._write(name, buffer.getvalue())

    def write_text(self, name, text):
        return self._write(name, self.header_line() + text)

    def exists(self, name):
        return self.path(name).exists()

    def read_json(self, name, command):
        """Leer un artefacto previo; si falta, indicar qué comando lo produce."""
        path = self.path(name)
        if not path.exists():
            raise MissingArtifactError(name, command)
        document = json.loads(path.read_text(encoding='utf-8'))
        document.pop('meta', None)
        return document
