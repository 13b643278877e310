"""Clase base de los comandos de gestión del pipeline."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from .artifacts import ArtifactWriter
from .config import load_pipeline_config
from .exceptions import ChainVulnError

logger = logging.getLogger(__name__)

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']

# Código de salida cuando el escaneo encuentra clones vulnerables
FINDINGS_EXIT_CODE = 2


@dataclass
class CommandResult:
    summary: str
    counts: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    exit_code: int = 0


class PipelineCommand(BaseCommand):
    """Opciones globales, carga de configuración y traducción de errores."""

    requires_system_checks = []

    @property
    def command_name(self):
        return self.__module__.rsplit('.', 1)[-1]

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Archivo JSON de configuración del pipeline')
        parser.add_argument('--out', help='Directorio de artefactos (por defecto paths.output_dir)')
        parser.add_argument('--jobs', type=int, default=settings.CHAINVULN_JOBS, help='Hilos de trabajo')
        parser.add_argument('--log-level', choices=LOG_LEVELS, help='Nivel de log de las etapas')
        parser.add_argument(
            '--persist', action='store_true', default=settings.CHAINVULN_PERSIST,
            help='Registrar la ejecución en la base de datos',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        """Opciones propias de cada comando."""

    def run(self, config, writer, jobs, **options):
        raise NotImplementedError

    def handle(self, *args, **options):
        if options.get('log_level'):
            for name in settings.PIPELINE_LOGGERS:
                logging.getLogger(name).setLevel(options['log_level'])
        jobs = options['jobs']
        if jobs < 1:
            raise CommandError('--jobs debe ser al menos 1')

        config_path = options.pop('config', None)
        options.pop('jobs', None)
        config = None
        output_dir = None
        try:
            config = load_pipeline_config(config_path)
            output_dir = Path(options['out']).resolve() if options.get('out') else config.output_dir
            writer = ArtifactWriter(output_dir, config.digest)
            result = self.run(config, writer, jobs, **options)
            result.artifacts = list(writer.written)
        except ChainVulnError as exc:
            logger.error("%s falló: %s", self.command_name, exc)
            if options['persist']:
                self._record_failure(config, output_dir, exc)
            raise CommandError(str(exc)) from exc

        if options['persist']:
            from .models import PipelineRun

            PipelineRun.record(self.command_name, result, config, output_dir)

        if result.exit_code:
            self.stdout.write(self.style.WARNING(result.summary))
            raise CommandError(result.summary, returncode=result.exit_code)
        self.stdout.write(self.style.SUCCESS(result.summary))

    def _record_failure(self, config, output_dir, exc):
        from .models import PipelineRun

        PipelineRun.objects.create(
            command=self.command_name,
            config_digest=config.digest if config else '',
            output_dir=str(output_dir or ''),
            status=PipelineRun.Status.FAILED,
            summary=str(exc),
        )
