"""Configuración por lenguaje del normalizador de código."""

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from django.conf import settings

from pipeline.validation import first_error

from .exceptions import LanguageConfigError
from .serializers import CodesigSettingsSerializer, LanguageSerializer

DEFAULT_LANGUAGES_PATH = Path(__file__).resolve().parent / 'data' / 'languages.json'


@dataclass(frozen=True)
class LanguageConfig:
    name: str
    suffixes: tuple
    line_comments: tuple = ()
    block_comment: tuple = None
    string_quotes: tuple = ('"', "'")
    import_patterns: tuple = ()
    size_functions: dict = field(default_factory=dict, compare=False)
    error_functions: frozenset = frozenset()
    nil_literals: frozenset = frozenset()
    bool_literals: frozenset = frozenset()
    condition_parens: bool = False

    @classmethod
    def from_dict(cls, name, data):
        serializer = LanguageSerializer(data=data)
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, f"languages.{name}")
            raise LanguageConfigError(f"{location}: {message}")
        values = serializer.validated_data
        return cls(
            name=name,
            suffixes=tuple(suffix.lower() for suffix in values['suffixes']),
            line_comments=tuple(values['line_comments']),
            block_comment=tuple(values['block_comment']) if values['block_comment'] else None,
            string_quotes=tuple(values['string_quotes']),
            import_patterns=tuple(values['import_patterns']),
            size_functions=dict(values['size_functions']),
            error_functions=frozenset(values['error_functions']),
            nil_literals=frozenset(values['nil_literals']),
            bool_literals=frozenset(values['bool_literals']),
            condition_parens=values['condition_parens'],
        )

    @cached_property
    def import_res(self):
        return tuple(re.compile(pattern) for pattern in self.import_patterns)

    def is_import(self, text):
        return any(pattern.search(text) for pattern in self.import_res)

    def to_dict(self):
        return {
            'suffixes': list(self.suffixes),
            'line_comments': list(self.line_comments),
            'block_comment': list(self.block_comment) if self.block_comment else None,
            'string_quotes': list(self.string_quotes),
            'import_patterns': list(self.import_patterns),
            'size_functions': dict(sorted(self.size_functions.items())),
            'error_functions': sorted(self.error_functions),
            'nil_literals': sorted(self.nil_literals),
            'bool_literals': sorted(self.bool_literals),
            'condition_parens': self.condition_parens,
        }


def load_languages(source=None):
    """Leer las configuraciones de lenguaje (dict o ruta a JSON)."""
    if source is None or isinstance(source, (str, Path)):
        path = Path(source or DEFAULT_LANGUAGES_PATH)
        try:
            source = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as exc:
            raise LanguageConfigError(f"No se pudo leer {path}: {exc}") from exc
    if not isinstance(source, dict) or not source:
        raise LanguageConfigError('Se esperaba al menos un lenguaje')
    languages = {name: LanguageConfig.from_dict(name, data) for name, data in source.items()}
    owners = {}
    for language in languages.values():
        for suffix in language.suffixes:
            if suffix in owners:
                raise LanguageConfigError(
                    f"El sufijo '{suffix}' pertenece a '{owners[suffix]}' y a '{language.name}'"
                )
            owners[suffix] = language.name
    return languages


@dataclass(frozen=True)
class CodesigConfig:
    languages: dict = field(default_factory=load_languages, compare=False)
    test_path_markers: tuple = ()
    pairing_threshold: float = 0.5
    keep_numeric_atoms: bool = False

    @classmethod
    def default(cls):
        defaults = settings.CHAINVULN['CODESIG']
        return cls(
            languages=load_languages(),
            test_path_markers=tuple(defaults['TEST_PATH_MARKERS']),
            pairing_threshold=defaults['PAIRING_THRESHOLD'],
            keep_numeric_atoms=defaults['KEEP_NUMERIC_ATOMS'],
        )

    @classmethod
    def from_dict(cls, data):
        """Sección 'codesig' del archivo de configuración sobre los valores por defecto."""
        serializer = CodesigSettingsSerializer(data=data or {})
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, 'codesig')
            raise LanguageConfigError(f"{location}: {message}")
        values = serializer.validated_data
        base = cls.default()
        return cls(
            languages=load_languages(data['languages']) if 'languages' in values else base.languages,
            test_path_markers=tuple(values.get('test_path_markers', base.test_path_markers)),
            pairing_threshold=values.get('pairing_threshold', base.pairing_threshold),
            keep_numeric_atoms=values.get('keep_numeric_atoms', base.keep_numeric_atoms),
        )

    @cached_property
    def suffix_index(self):
        return {
            suffix: language
            for language in self.languages.values()
            for suffix in language.suffixes
        }

    def language_for(self, path):
        """Lenguaje según el sufijo del archivo, o None si no es código fuente."""
        suffix = Path(path).suffix.lower()
        return self.suffix_index.get(suffix)

    def is_test_path(self, path):
        path = path.lower()
        return any(marker.lower() in path for marker in self.test_path_markers)
