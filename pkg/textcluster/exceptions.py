from pipeline.exceptions import ChainVulnError


class EmbeddingFormatError(ChainVulnError):
    """Archivo de embeddings mal formado."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"línea {line}: {message}" if line else message)


class MetricError(ChainVulnError):
    """Fallo de la métrica sobre un par de elementos."""


class ClusteringError(ChainVulnError):
    """Parámetros de agrupamiento inválidos."""
