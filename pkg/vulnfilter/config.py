"""Configuración del filtrado de vulnerabilidades."""

import json
from dataclasses import dataclass, field
from pathlib import Path

from pipeline.validation import first_error

from .exceptions import ConfigurationError
from .serializers import FilterConfigSerializer

STARTER_CONFIG_PATH = Path(__file__).resolve().parent / 'data' / 'starter_filter.json'

ANY_PROJECT = '*'


@dataclass(frozen=True)
class FilterConfig:
    source_suffixes: dict = field(default_factory=dict, compare=False)
    test_path_markers: tuple = ()
    include_labels: tuple = ()
    title_prefix_markers: tuple = ()
    exclude_labels: tuple = ()
    include_keywords: tuple = ()
    exclude_keywords: tuple = ()
    min_word_frequency: int = 2
    similarity_threshold: float = 0.6

    @classmethod
    def from_dict(cls, data):
        serializer = FilterConfigSerializer(data=data)
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, 'filter')
            raise ConfigurationError(f"{location}: {message}")
        values = serializer.validated_data
        return cls(
            source_suffixes={
                project: tuple(suffix.lower() for suffix in suffixes)
                for project, suffixes in values['source_suffixes'].items()
            },
            test_path_markers=tuple(marker.lower() for marker in values['test_path_markers']),
            include_labels=tuple(values['include_labels']),
            title_prefix_markers=tuple(values['title_prefix_markers']),
            exclude_labels=tuple(values['exclude_labels']),
            include_keywords=tuple(tuple(group) for group in values['include_keywords']),
            exclude_keywords=tuple(tuple(group) for group in values['exclude_keywords']),
            min_word_frequency=values['min_word_frequency'],
            similarity_threshold=values['similarity_threshold'],
        )

    @classmethod
    def starter(cls):
        return cls.from_dict(json.loads(STARTER_CONFIG_PATH.read_text(encoding='utf-8')))

    def suffixes_for(self, project):
        if project in self.source_suffixes:
            return self.source_suffixes[project]
        if ANY_PROJECT in self.source_suffixes:
            return self.source_suffixes[ANY_PROJECT]
        raise ConfigurationError(f"El proyecto '{project}' no tiene sufijos de código configurados")

    def is_test_path(self, path):
        path = path.lower()
        return any(marker in path for marker in self.test_path_markers)

    def has_include_label(self, labels):
        wanted = {label.lower() for label in self.include_labels}
        return any(label.lower() in wanted for label in labels)

    def has_exclude_label(self, labels):
        wanted = {label.lower() for label in self.exclude_labels}
        return any(label.lower() in wanted for label in labels)

    def has_title_prefix(self, title):
        title = title.lstrip().upper()
        return any(title.startswith(marker.upper()) for marker in self.title_prefix_markers)
