import uuid

from django.db import models

from chainvuln import __version__


class PipelineRun(models.Model):
    """Registro de cada ejecución de un comando del pipeline."""

    class Status(models.TextChoices):
        SUCCESS = 'success', 'Correcto'
        FAILED = 'failed', 'Fallido'
        FINDINGS = 'findings', 'Con hallazgos vulnerables'

    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)

    # Comando y procedencia
    command = models.CharField(max_length=30)
    tool_version = models.CharField(max_length=20, default=__version__)
    config_digest = models.CharField(max_length=64, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)

    # Resultado
    status = models.CharField(max_length=10, choices=Status.choices, default=Status.SUCCESS)
    summary = models.TextField(blank=True)
    counts = models.JSONField(default=dict, blank=True)
    artifacts = models.JSONField(default=list, blank=True)

    started_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Ejecución del pipeline'
        verbose_name_plural = 'Ejecuciones del pipeline'
        db_table = 'pipeline_runs'
        indexes = [
            models.Index(fields=['command', 'started_at']),
            models.Index(fields=['status']),
        ]
        ordering = ['-started_at']

    def __str__(self):
        return f"{self.command} - {self.status} - {self.started_at}"

    @classmethod
    def record(cls, command, result, config, output_dir, status=None):
        """Método helper para guardar el resultado de un comando."""
        if status is None:
            status = cls.Status.FINDINGS if result.exit_code == 2 else cls.Status.SUCCESS
        return cls.objects.create(
            command=command,
            config_digest=config.digest if config else '',
            output_dir=str(output_dir),
            status=status,
            summary=result.summary,
            counts=result.counts,
            artifacts=list(result.artifacts),
        )
