from pipeline.exceptions import ChainVulnError


class ConfigurationError(ChainVulnError):
    """Configuración de filtrado inválida."""


class EmbeddingCoverageError(ChainVulnError):
    """Ninguna palabra del corpus tiene vector en los embeddings."""
