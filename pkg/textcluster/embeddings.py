"""Tabla de embeddings en formato de texto word2vec."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import EmbeddingFormatError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    words: tuple = ()
    matrix: np.ndarray = field(default=None, compare=False, repr=False)
    index: dict = field(default_factory=dict, compare=False, repr=False)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def vector(self, word):
        """Vector de la palabra o None si no está en el vocabulario."""
        position = self.index.get(word)
        return None if position is None else self.matrix[position]

    @classmethod
    def from_mapping(cls, vectors):
        words = tuple(vectors)
        if not words:
            return cls(dimension=0, words=(), matrix=np.zeros((0, 0)), index={})
        matrix = np.array([vectors[word] for word in words], dtype=np.float64)
        return cls(
            dimension=matrix.shape[1],
            words=words,
            matrix=matrix,
            index={word: position for position, word in enumerate(words)},
        )


def load_embeddings(path):
    """Cargar vectores: cabecera 'count dim' y una línea 'word v1 ... vdim' por palabra."""
    path = Path(path)
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as exc:
        raise EmbeddingFormatError(f"No se pudo leer {path}: {exc}") from exc
    if not lines:
        raise EmbeddingFormatError('Archivo vacío', 1)

    header = lines[0].split()
    try:
        count, dimension = (int(value) for value in header)
    except ValueError as exc:
        raise EmbeddingFormatError("Cabecera inválida, se esperaba 'count dim'", 1) from exc

    words, rows, index = [], [], {}
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        word, values = parts[0], parts[1:]
        if len(values) != dimension:
            raise EmbeddingFormatError(
                f"'{word}' tiene {len(values)} componentes, se esperaban {dimension}", number
            )
        if word in index:
            raise EmbeddingFormatError(f"Palabra duplicada: '{word}'", number)
        try:
            rows.append([float(value) for value in values])
        except ValueError as exc:
            raise EmbeddingFormatError(f"Valor no numérico para '{word}'", number) from exc
        index[word] = len(words)
        words.append(word)

    if len(words) != count:
        raise EmbeddingFormatError(f"La cabecera declara {count} palabras y hay {len(words)}")

    logger.info("Embeddings cargados: %d palabras, dimensión %d", count, dimension)
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dimension)
    return EmbeddingTable(dimension=dimension, words=tuple(words), matrix=matrix, index=index)
