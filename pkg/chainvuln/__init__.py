"""chainvuln: minería de vulnerabilidades en repositorios de blockchains."""

__version__ = '1.0.0'
