from pipeline.exceptions import ChainVulnError


class VocabularyError(ChainVulnError):
    """Vocabulario semilla inválido."""
