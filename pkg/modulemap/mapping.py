"""Rutas de módulo y su asignación a la arquitectura por capas."""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from corpus.records import format_issue_key
from pipeline.validation import first_error

from .exceptions import ModulePathError
from .serializers import LAYERS, ArchitectureMapSerializer

logger = logging.getLogger(__name__)

DEFAULT_MAP_PATH = Path(__file__).resolve().parent / 'data' / 'architecture_map.json'

ANY_PROJECT = '*'


@dataclass(frozen=True)
class ModulePathRule:
    project: str
    generic_roots: tuple = ('src',)

    def __post_init__(self):
        if not self.generic_roots:
            raise ModulePathError(f"El proyecto '{self.project}' necesita al menos una raíz genérica")

    def is_generic(self, segment):
        return segment.lower() in {root.lower() for root in self.generic_roots}


def clean_file_path(path):
    path = path.strip()
    while path.startswith('./'):
        path = path[2:]
    return path.lstrip('/')


def normalize_module_path(path):
    path = path.strip().strip('/').lower()
    return f"{path}/" if path else ''


def extract_module_path(file_path, rule):
    """Ruta de módulo de un archivo, o None si cuelga directamente de una raíz genérica."""
    if not file_path or not file_path.strip():
        raise ModulePathError('Ruta de archivo vacía')
    segments = [segment for segment in clean_file_path(file_path).split('/') if segment]
    if len(segments) < 2:
        return None
    if rule.is_generic(segments[0]):
        if len(segments) < 3:
            return None
        return normalize_module_path('/'.join(segments[:2]))
    return normalize_module_path(segments[0])


@dataclass(frozen=True)
class ModuleEntry:
    path: str
    module: str
    layer: str


@dataclass(frozen=True)
class ArchitectureMap:
    entries: dict = field(default_factory=dict, compare=False)
    generic_roots: dict = field(default_factory=dict, compare=False)
    overrides: dict = field(default_factory=dict, compare=False)
    unmapped_policy: str = 'report'

    @classmethod
    def from_dict(cls, data, source='architecture_map'):
        serializer = ArchitectureMapSerializer(data=data)
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, source)
            raise ModulePathError(f"{location}: {message}")
        values = serializer.validated_data
        entries = {}
        for item in values['entries']:
            path = normalize_module_path(item['path'])
            if path in entries:
                raise ModulePathError(f"La ruta de módulo '{path}' aparece más de una vez")
            entries[path] = ModuleEntry(path, item['module'], item['layer'])
        return cls(
            entries=entries,
            generic_roots={project: tuple(roots) for project, roots in values['generic_roots'].items()},
            overrides={
                clean_file_path(path): normalize_module_path(module)
                for path, module in values['overrides'].items()
            },
            unmapped_policy=values['unmapped_policy'],
        )

    @classmethod
    def load(cls, path=None):
        path = Path(path or DEFAULT_MAP_PATH)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as exc:
            raise ModulePathError(f"No se pudo leer el mapa {path}: {exc}") from exc
        return cls.from_dict(data, source=path.name)

    def rule_for(self, project):
        roots = self.generic_roots.get(project) or self.generic_roots.get(ANY_PROJECT) or ('src',)
        return ModulePathRule(project=project, generic_roots=roots)

    def module_path_for(self, project, file_path):
        override = self.overrides.get(clean_file_path(file_path))
        if override:
            return override
        return extract_module_path(file_path, self.rule_for(project))

    def lookup(self, module_path):
        return self.entries.get(module_path)


@dataclass(frozen=True)
class ModuleCounts:
    modules: dict
    layers: dict
    unmapped: dict
    flagged_files: tuple
    issue_count: int

    @property
    def module_total(self):
        return sum(self.modules.values())

    def to_dict(self, architecture):
        modules = []
        for name, count in self.modules.items():
            layer = next(entry.layer for entry in architecture.entries.values() if entry.module == name)
            modules.append({'module': name, 'layer': layer, 'issues': count})
        return {
            'issue_count': self.issue_count,
            'module_total': self.module_total,
            'layers': [{'layer': layer, 'issues': self.layers.get(layer, 0)} for layer in LAYERS],
            'modules': modules,
            'unmapped': [{'module_path': path, 'issues': count} for path, count in self.unmapped.items()],
            'flagged_files': [
                {'issue': format_issue_key(key), 'file_path': path} for key, path in self.flagged_files
            ],
        }

    def csv_rows(self, architecture):
        rows = []
        for item in self.to_dict(architecture)['modules']:
            rows.append([item['layer'], item['module'], item['issues']])
        for layer in LAYERS:
            rows.append([layer, '*', self.layers.get(layer, 0)])
        return rows


def aggregate_module_counts(candidates, links, corpus, architecture):
    """Contar issues por módulo (un issue suma en cada módulo que toca) y por capa."""
    candidates = list(candidates)
    module_issues = Counter()
    unmapped = Counter()
    flagged = []
    for key in candidates:
        modules, unknown = set(), set()
        for commit_id in links.commits_for(key):
            commit = corpus.commit(key[0], commit_id)
            if commit is None:
                continue
            for path in commit.files:
                module_path = architecture.module_path_for(key[0], path)
                if module_path is None:
                    flagged.append((key, path))
                    continue
                entry = architecture.lookup(module_path)
                if entry is None:
                    unknown.add(module_path)
                else:
                    modules.add(entry.module)
        module_issues.update(modules)
        if architecture.unmapped_policy == 'report':
            unmapped.update(unknown)

    layer_of = {entry.module: entry.layer for entry in architecture.entries.values()}
    layers = Counter()
    for module, count in module_issues.items():
        layers[layer_of[module]] += count

    if unmapped:
        logger.warning("%d rutas de módulo sin asignación en el mapa", len(unmapped))
    return ModuleCounts(
        modules=dict(sorted(module_issues.items(), key=lambda item: (-item[1], item[0]))),
        layers=dict(layers),
        unmapped=dict(sorted(unmapped.items(), key=lambda item: (-item[1], item[0]))),
        flagged_files=tuple(sorted(set(flagged))),
        issue_count=len(candidates),
    )


def project_module_summary(candidates, links, corpus, architecture):
    """Por proyecto: archivos únicos, rutas de módulo y archivos para revisión manual."""
    summary = {}
    for key in candidates:
        project = key[0]
        row = summary.setdefault(project, {'files': set(), 'module_paths': set(), 'flagged': set()})
        for commit_id in links.commits_for(key):
            commit = corpus.commit(project, commit_id)
            if commit is None:
                continue
            for path in commit.files:
                row['files'].add(path)
                module_path = architecture.module_path_for(project, path)
                if module_path is None:
                    row['flagged'].add(path)
                else:
                    row['module_paths'].add(module_path)
    return [
        {
            'project': project,
            'unique_file_paths': len(row['files']),
            'module_paths': sorted(row['module_paths']),
            'flagged_files': sorted(row['flagged']),
        }
        for project, row in sorted(summary.items())
    ]
