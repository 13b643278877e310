"""Matrices de distancia y Word Mover's Distance."""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from pyemd import emd
from scipy.spatial.distance import cdist

from .exceptions import MetricError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple
    values: np.ndarray = field(compare=False, repr=False)

    @property
    def n(self):
        return len(self.ids)

    def __getitem__(self, pair):
        return self.values[pair]

    def to_similarity(self, normalize=False):
        """Similitud 1 − distancia (normalizada por el máximo si se pide)."""
        values = self.values
        if normalize:
            top = values.max() if values.size else 0.0
            if top > 0:
                values = values / top
        return 1.0 - values


@dataclass(frozen=True)
class WmdResult:
    distance: float
    fallback: bool = False


def jaccard_distance(a, b):
    first, second = set(a), set(b)
    union = first | second
    if not union:
        return 0.0
    return 1.0 - len(first & second) / len(union)


def word_movers_distance(a, b, embeddings):
    """WMD exacta; si un lado queda sin vocabulario se usa 1 − Jaccard."""
    left = Counter(token for token in a if token in embeddings)
    right = Counter(token for token in b if token in embeddings)
    if not left or not right:
        return WmdResult(jaccard_distance(a, b), fallback=True)
    if left == right:
        return WmdResult(0.0)

    vocabulary = sorted(set(left) | set(right))
    vectors = np.array([embeddings.vector(word) for word in vocabulary])
    cost = cdist(vectors, vectors, metric='euclidean')
    first = np.array([left[word] for word in vocabulary], dtype=np.float64)
    second = np.array([right[word] for word in vocabulary], dtype=np.float64)
    distance = emd(first / first.sum(), second / second.sum(), cost)
    return WmdResult(max(float(distance), 0.0))


def wmd_distance(a, b, embeddings):
    return word_movers_distance(a, b, embeddings).distance


def pairwise_distance_matrix(items, metric, ids=None, jobs=1):
    """Llenar el triángulo superior con la métrica y reflejarlo."""
    items = list(items)
    ids = tuple(ids) if ids is not None else tuple(range(len(items)))
    n = len(items)
    values = np.zeros((n, n), dtype=np.float64)

    def row(i):
        result = []
        for j in range(i + 1, n):
            try:
                value = float(metric(items[i], items[j]))
            except Exception as exc:
                raise MetricError(f"Fallo de la métrica en el par ({ids[i]}, {ids[j]}): {exc}") from exc
            if not np.isfinite(value) or value < 0:
                raise MetricError(f"Distancia inválida {value} en el par ({ids[i]}, {ids[j]})")
            result.append(value)
        return result

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        for i, distances in enumerate(executor.map(row, range(n))):
            values[i, i + 1:] = distances
            values[i + 1:, i] = distances
    return DistanceMatrix(ids=ids, values=values)


def wmd_distance_matrix(token_lists, embeddings, ids=None, jobs=1):
    """Matriz WMD junto con los elementos sin vocabulario (distancia de Jaccard)."""
    token_lists = [list(tokens) for tokens in token_lists]
    ids = tuple(ids) if ids is not None else tuple(range(len(token_lists)))
    matrix = pairwise_distance_matrix(token_lists, lambda a, b: wmd_distance(a, b, embeddings), ids=ids, jobs=jobs)
    fallback = [
        item_id for item_id, tokens in zip(ids, token_lists)
        if not any(token in embeddings for token in tokens)
    ]
    if fallback:
        logger.warning("WMD: %d elementos sin vocabulario usan 1 − Jaccard", len(fallback))
    return matrix, fallback
