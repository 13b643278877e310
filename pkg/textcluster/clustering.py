"""Agrupamiento aglomerativo (enlace promedio) y propagación de afinidad."""

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ClusteringError

logger = logging.getLogger(__name__)

GOLDEN_RATIO_CONJUGATE = 0.6180339887498949


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple
    exemplars: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    converged: bool = True

    @property
    def n_clusters(self):
        return len(set(self.labels))

    def members(self, label):
        return [index for index, value in enumerate(self.labels) if value == label]

    def to_dict(self, ids=None):
        ids = ids or list(range(len(self.labels)))
        return {
            'params': self.params,
            'converged': self.converged,
            'n_clusters': self.n_clusters,
            'labels': {str(item): label for item, label in zip(ids, self.labels)},
            'exemplars': {str(label): ids[item] for label, item in sorted(self.exemplars.items())},
        }


@dataclass(frozen=True)
class APParams:
    damping: float = 0.78
    preference: object = 'median'
    max_iterations: int = 200
    convergence_window: int = 15

    def __post_init__(self):
        if not 0.5 <= self.damping < 1.0:
            raise ClusteringError(f"damping fuera de [0.5, 1.0): {self.damping}")
        if not self.max_iterations > self.convergence_window > 0:
            raise ClusteringError('Se requiere max_iterations > convergence_window > 0')
        if self.preference != 'median' and not isinstance(self.preference, (int, float)):
            raise ClusteringError(f"preference inválida: {self.preference!r}")

    def to_dict(self):
        return {
            'damping': self.damping,
            'preference': self.preference,
            'max_iterations': self.max_iterations,
            'convergence_window': self.convergence_window,
        }


def relabel(raw_labels):
    """Renumerar etiquetas por orden de primera aparición."""
    mapping = {}
    return tuple(mapping.setdefault(label, len(mapping)) for label in raw_labels)


# ===== Aglomerativo =====

def agglomerative_merges(d):
    """Secuencia completa de fusiones con enlace promedio.

    Cada grupo se identifica por su menor índice; los empates se resuelven por
    el par (i, j) más pequeño.
    """
    values = np.asarray(getattr(d, 'values', d), dtype=np.float64)
    n = values.shape[0]
    sums = values.copy()
    sizes = np.ones(n)
    average = values.copy()
    average[np.tril_indices(n)] = np.inf
    active = np.ones(n, dtype=bool)
    merges = []
    for _ in range(n - 1):
        flat = int(np.argmin(average))
        i, j = divmod(flat, n)
        merges.append((i, j))
        sums[i, :] += sums[j, :]
        sums[:, i] = sums[i, :]
        sizes[i] += sizes[j]
        active[j] = False
        average[j, :] = np.inf
        average[:, j] = np.inf
        row = sums[i, :] / (sizes[i] * sizes)
        others = np.flatnonzero(active)
        others = others[others != i]
        lower, upper = others[others < i], others[others > i]
        average[lower, i] = row[lower]
        average[i, upper] = row[upper]
    return merges


def labels_from_merges(n, merges, k):
    """Etiquetas tras aplicar las primeras n − k fusiones."""
    parent = list(range(n))

    def find(item):
        while parent[item] != item:
            parent[item] = parent[parent[item]]
            item = parent[item]
        return item

    for i, j in merges[:n - k]:
        parent[find(j)] = find(i)
    return relabel(find(item) for item in range(n))


def agglomerative_cluster(d, k, merges=None):
    """Agrupar hasta que queden k grupos (enlace promedio)."""
    n = d.n
    if not 1 <= k <= n:
        raise ClusteringError(f"k={k} fuera de rango [1, {n}]")
    merges = merges if merges is not None else agglomerative_merges(d)
    return ClusterAssignment(
        labels=labels_from_merges(n, merges, k),
        params={'algorithm': 'agglomerative', 'linkage': 'average', 'k': k},
    )


# ===== Propagación de afinidad =====

def resolve_preference(s, preference):
    n = s.shape[0]
    if preference == 'median':
        if n == 1:
            return float(s[0, 0])
        return float(np.median(s[~np.eye(n, dtype=bool)]))
    return float(preference)


def _tie_breaker(n, scale):
    """Perturbación determinista derivada de los índices."""
    steps = np.arange(n * n, dtype=np.float64).reshape(n, n)
    return scale * ((steps * GOLDEN_RATIO_CONJUGATE) % 1.0)


def affinity_propagation(s, params=None):
    """Propagación de afinidad con amortiguación sobre una matriz de similitud."""
    params = params or APParams()
    s = np.array(s, dtype=np.float64)
    n = s.shape[0]
    preference = resolve_preference(s, params.preference)
    info = {'algorithm': 'affinity_propagation', **params.to_dict(), 'preference_value': preference}

    if n == 1:
        return ClusterAssignment(labels=(0,), exemplars={0: 0}, params=info)

    off_diagonal = s[~np.eye(n, dtype=bool)]
    if np.all(off_diagonal == off_diagonal[0]):
        if preference <= off_diagonal[0]:
            labels, exemplars = (0,) * n, {0: 0}
        else:
            labels, exemplars = tuple(range(n)), {index: index for index in range(n)}
        return ClusterAssignment(labels=labels, exemplars=exemplars, params=info)

    np.fill_diagonal(s, preference)
    working = s + _tie_breaker(n, 1e-12 * (1.0 + np.abs(s).max()))
    rows = np.arange(n)
    responsibility = np.zeros((n, n))
    availability = np.zeros((n, n))
    history = []
    converged = False

    for iteration in range(params.max_iterations):
        combined = availability + working
        best = np.argmax(combined, axis=1)
        first = combined[rows, best]
        combined[rows, best] = -np.inf
        second = combined.max(axis=1)
        update = working - first[:, None]
        update[rows, best] = working[rows, best] - second
        responsibility = params.damping * responsibility + (1 - params.damping) * update

        positive = np.maximum(responsibility, 0)
        np.fill_diagonal(positive, np.diag(responsibility))
        update = positive.sum(axis=0)[None, :] - positive
        diagonal = np.diag(update).copy()
        update = np.minimum(update, 0)
        np.fill_diagonal(update, diagonal)
        availability = params.damping * availability + (1 - params.damping) * update

        exemplar_mask = (np.diag(availability) + np.diag(responsibility)) > 0
        history.append(exemplar_mask)
        window = history[-params.convergence_window:]
        if (
            len(window) == params.convergence_window
            and exemplar_mask.any()
            and all(np.array_equal(mask, exemplar_mask) for mask in window)
        ):
            converged = True
            break

    info['iterations'] = iteration + 1
    exemplars = np.flatnonzero((np.diag(availability) + np.diag(responsibility)) > 0)
    if exemplars.size == 0:
        exemplars = np.array([int(np.argmax(np.diag(availability) + np.diag(responsibility)))])
    if not converged:
        logger.warning("Propagación de afinidad sin convergencia tras %d iteraciones", params.max_iterations)

    scores = (availability + s)[:, exemplars]
    assigned = exemplars[np.argmax(scores, axis=1)]
    assigned[exemplars] = exemplars
    labels = relabel(int(item) for item in assigned)
    cluster_of = dict(zip((int(item) for item in assigned), labels))
    return ClusterAssignment(
        labels=labels,
        exemplars={cluster_of[int(item)]: int(item) for item in exemplars},
        params=info,
        converged=converged,
    )
