"""Errores comunes del pipeline."""


class ChainVulnError(Exception):
    """Error base de todas las etapas del pipeline."""


class ConfigError(ChainVulnError):
    """Configuración del pipeline inválida."""


class MissingArtifactError(ChainVulnError):
    """Falta un artefacto producido por un comando anterior."""

    def __init__(self, artifact, command):
        self.artifact = artifact
        self.command = command
        super().__init__(
            f"No existe el artefacto '{artifact}'; ejecute primero 'manage.py {command}'."
        )
