"""Catálogo de patrones vulnerables."""

import fnmatch
import json
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path, PurePosixPath

from django.conf import settings

from pipeline.validation import first_error

from .exceptions import PatternLoadError
from .serializers import PatternFileSerializer

logger = logging.getLogger(__name__)

DEFAULT_PATTERNS_PATH = Path(__file__).resolve().parent / 'data' / 'patterns.json'


@dataclass(frozen=True)
class PatternSpec:
    id: str
    description: str
    provenance: str
    file_globs: tuple = ()
    function_patterns: tuple = ()
    anchor_signature: tuple = ()
    vulnerable_signature: tuple = ()
    patched_signature: tuple = ()
    match_threshold: float = 0.8
    position: int = field(default=0, compare=False)

    @cached_property
    def function_res(self):
        return tuple(re.compile(pattern) for pattern in self.function_patterns)

    def matches_file(self, relative_path):
        """Globs sin '/' se comparan con el nombre; con '/', con la ruta relativa."""
        path = PurePosixPath(relative_path)
        for glob in self.file_globs:
            candidate = str(path) if '/' in glob else path.name
            if fnmatch.fnmatchcase(candidate, glob):
                return True
        return False

    def matches_function(self, name):
        return any(pattern.search(name) for pattern in self.function_res)

    def to_dict(self):
        return {
            'id': self.id,
            'description': self.description,
            'provenance': self.provenance,
            'file_globs': list(self.file_globs),
            'function_patterns': list(self.function_patterns),
            'anchor_signature': ' '.join(self.anchor_signature),
            'vulnerable_signature': ' '.join(self.vulnerable_signature),
            'patched_signature': ' '.join(self.patched_signature),
            'match_threshold': self.match_threshold,
        }


def parse_patterns(data, source='patterns', default_threshold=None):
    """Validar un documento de patrones ya parseado."""
    if default_threshold is None:
        default_threshold = settings.CHAINVULN['SCAN']['MATCH_THRESHOLD']
    if not isinstance(data, dict):
        raise PatternLoadError(f"{source}: se esperaba un objeto JSON")
    serializer = PatternFileSerializer(data=data)
    if not serializer.is_valid():
        location, message = first_error(serializer.errors, source)
        raise PatternLoadError(f"{location}: {message}")

    patterns = []
    seen = set()
    for position, values in enumerate(serializer.validated_data['patterns']):
        if values['id'] in seen:
            raise PatternLoadError(f"{source}.patterns[{position}]: id duplicado '{values['id']}'")
        seen.add(values['id'])
        patterns.append(PatternSpec(
            id=values['id'],
            description=values['description'],
            provenance=values['provenance'],
            file_globs=tuple(values['file_globs']),
            function_patterns=tuple(values['function_patterns']),
            anchor_signature=values['anchor_signature'],
            vulnerable_signature=values['vulnerable_signature'],
            patched_signature=values['patched_signature'],
            match_threshold=values.get('match_threshold', default_threshold),
            position=position,
        ))
    return patterns


def load_patterns(path=None, default_threshold=None):
    """Leer el archivo de patrones; un archivo vacío no define ninguno."""
    path = Path(path or DEFAULT_PATTERNS_PATH)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise PatternLoadError(f"No se pudo leer {path}: {exc}") from exc
    if not text.strip():
        logger.warning("Archivo de patrones vacío: %s", path)
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PatternLoadError(f"{path.name}: JSON inválido: {exc}") from exc
    patterns = parse_patterns(data, path.name, default_threshold)
    logger.info("%d patrones cargados desde %s", len(patterns), path)
    return patterns
