from pipeline.exceptions import ChainVulnError


class LanguageConfigError(ChainVulnError):
    """Configuración de lenguajes inválida."""
