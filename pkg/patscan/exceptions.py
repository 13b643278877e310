from pipeline.exceptions import ChainVulnError


class PatternLoadError(ChainVulnError):
    """Archivo de patrones inválido."""


class UnbalancedBracesError(ChainVulnError):
    """Llaves desbalanceadas al extraer funciones."""

    def __init__(self, line):
        self.line = line
        super().__init__(f"Llaves desbalanceadas en la línea {line}")
