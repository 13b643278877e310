from pipeline.exceptions import ChainVulnError


class LoadError(ChainVulnError):
    """Documento de corpus inválido."""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
