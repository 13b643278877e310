"""Configuración del pipeline: un archivo JSON validado y su huella."""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from codesig.config import CodesigConfig
from modulemap.mapping import DEFAULT_MAP_PATH
from patscan.patterns import DEFAULT_PATTERNS_PATH
from textcluster.clustering import APParams
from titlekw.cleaning import DEFAULT_RULES_PATH, TitleRules
from titlekw.vocabulary import DEFAULT_SEED_PATH
from vulnfilter.config import FilterConfig

from .exceptions import ConfigError
from .serializers import PipelineConfigSerializer
from .validation import first_error

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SHIPPED_DATA = {
    'vocabulary': DEFAULT_SEED_PATH,
    'title_rules': DEFAULT_RULES_PATH,
    'architecture_map': DEFAULT_MAP_PATH,
    'patterns': DEFAULT_PATTERNS_PATH,
}


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def config_digest(data):
    """SHA-256 del JSON canónico de la configuración validada."""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def _grid(values):
    start, stop, step = values
    count = int(round((stop - start) / step)) + 1
    return [round(start + index * step, 10) for index in range(count)]


@dataclass(frozen=True)
class PipelineConfig:
    source: Path = None
    paths: dict = field(default_factory=dict, compare=False)
    targets: tuple = ()
    output_dir: Path = None
    filter_data: dict = field(default=None, compare=False)
    titles_data: dict = field(default=None, compare=False)
    clustering: dict = field(default_factory=dict, compare=False)
    codesig: CodesigConfig = None
    scan: dict = field(default_factory=dict, compare=False)
    digest: str = ''

    # ===== Rutas =====

    def path(self, name):
        return self.paths.get(name)

    def require(self, name, command):
        path = self.paths.get(name)
        if path is None:
            raise ConfigError(f"'{command}' necesita paths.{name} en el archivo de configuración")
        return path

    # ===== Secciones =====

    def filter_config(self):
        if self.filter_data is None:
            return FilterConfig.starter()
        return FilterConfig.from_dict(self.filter_data)

    def title_rules(self):
        if self.titles_data is None:
            return TitleRules.load(self.paths['title_rules'])
        return TitleRules.from_dict(self.titles_data)

    def ap_params(self, damping=None):
        return APParams(
            damping=damping if damping is not None else self.clustering['ap_damping'],
            max_iterations=self.clustering['ap_max_iterations'],
            convergence_window=self.clustering['ap_convergence_window'],
        )

    def k_grid(self, n):
        start, stop, step = (int(value) for value in self.clustering['k_grid'])
        return [k for k in range(start, stop + 1, step) if k <= n]

    def damping_grid(self):
        return [round(value, 2) for value in _grid(self.clustering['damping_grid'])]

    @property
    def summary_min_size(self):
        return self.clustering['summary_min_size']

    @property
    def match_threshold(self):
        return self.scan['match_threshold']


def _clustering_defaults():
    defaults = settings.CHAINVULN['CLUSTERING']
    return {
        'k_grid': list(defaults['K_GRID']),
        'damping_grid': list(defaults['DAMPING_GRID']),
        'ap_damping': defaults['AP_DAMPING'],
        'ap_max_iterations': defaults['AP_MAX_ITERATIONS'],
        'ap_convergence_window': defaults['AP_CONVERGENCE_WINDOW'],
        'summary_min_size': defaults['SUMMARY_MIN_SIZE'],
    }


def _resolve_paths(values, base_dir):
    resolved = {}
    for name, value in values.items():
        if name in ('targets', 'output_dir'):
            continue
        path = Path(value)
        resolved[name] = path if path.is_absolute() else (base_dir / path).resolve()
    for name, default in SHIPPED_DATA.items():
        resolved.setdefault(name, default)
    for name, path in resolved.items():
        if not path.exists():
            raise ConfigError(f"paths.{name}: no existe {path}")

    targets = []
    for index, value in enumerate(values.get('targets', [])):
        path = Path(value)
        path = path if path.is_absolute() else (base_dir / path).resolve()
        if not path.is_dir():
            raise ConfigError(f"paths.targets[{index}]: no es un directorio {path}")
        targets.append(path)
    return resolved, tuple(targets)


def build_pipeline_config(data, base_dir, source=None):
    """Validar un documento de configuración ya parseado."""
    if not isinstance(data, dict):
        raise ConfigError('La configuración debe ser un objeto JSON')
    serializer = PipelineConfigSerializer(data=data)
    if not serializer.is_valid():
        location, message = first_error(serializer.errors, source.name if source else 'config')
        raise ConfigError(f"{location}: {message}")
    values = serializer.validated_data

    base_dir = Path(base_dir)
    paths_section = dict(values.get('paths', {}))
    paths, targets = _resolve_paths(paths_section, base_dir)
    output_dir = Path(paths_section.get('output_dir') or settings.CHAINVULN_OUTPUT_DIR)
    if not output_dir.is_absolute():
        output_dir = base_dir / output_dir

    clustering = _clustering_defaults()
    clustering.update(values.get('clustering', {}))
    scan = {'match_threshold': settings.CHAINVULN['SCAN']['MATCH_THRESHOLD']}
    scan.update(values.get('scan', {}))

    config = PipelineConfig(
        source=source,
        paths=paths,
        targets=targets,
        output_dir=output_dir,
        filter_data=data.get('filter'),
        titles_data=data.get('titles'),
        clustering=clustering,
        codesig=CodesigConfig.from_dict(data.get('codesig')),
        scan=scan,
        digest=config_digest({**data, 'clustering': clustering, 'scan': scan}),
    )
    # Validar ahora para que los errores aparezcan antes de ejecutar nada
    config.filter_config()
    config.title_rules()
    config.ap_params()
    return config


def load_pipeline_config(path=None):
    """Cargar la configuración desde un archivo, o los valores por defecto si no hay ninguno."""
    path = path or settings.CHAINVULN_CONFIG
    if not path:
        return build_pipeline_config({'schema_version': SCHEMA_VERSION}, Path.cwd())
    path = Path(path).resolve()
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as exc:
        raise ConfigError(f"No existe el archivo de configuración {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path.name}: JSON inválido: {exc}") from exc
    config = build_pipeline_config(data, path.parent, source=path)
    logger.debug("Configuración %s cargada (huella %s)", path, config.digest)
    return config
