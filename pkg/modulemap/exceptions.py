from pipeline.exceptions import ChainVulnError


class ModulePathError(ChainVulnError):
    """Ruta de archivo o mapa de arquitectura inválido."""
