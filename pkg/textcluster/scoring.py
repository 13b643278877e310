"""Coeficiente de silueta, barridos de parámetros y resúmenes de grupos."""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings
from sklearn.metrics import silhouette_score as sklearn_silhouette

from .clustering import APParams, affinity_propagation, agglomerative_cluster, agglomerative_merges
from .exceptions import ClusteringError

logger = logging.getLogger(__name__)

AGGLOMERATIVE = 'agglomerative'
AFFINITY = 'affinity'
ALGORITHMS = (AGGLOMERATIVE, AFFINITY)


def silhouette_score(d, labels):
    """Silueta media con distancias precalculadas (grupos unitarios → 0)."""
    labels = np.asarray(labels)
    n_clusters = len(set(labels.tolist()))
    if n_clusters < 2:
        raise ClusteringError('La silueta no está definida para un único grupo')
    if n_clusters == len(labels):
        return 0.0
    values = np.asarray(getattr(d, 'values', d), dtype=np.float64)
    return float(sklearn_silhouette(values, labels, metric='precomputed'))


def default_k_grid(n):
    start, stop, step = settings.CHAINVULN['CLUSTERING']['K_GRID']
    return [k for k in range(start, stop + 1, step) if k <= n]


def default_damping_grid():
    start, stop, step = settings.CHAINVULN['CLUSTERING']['DAMPING_GRID']
    count = int(round((stop - start) / step)) + 1
    return [round(start + index * step, 2) for index in range(count)]


@dataclass(frozen=True)
class SweepRow:
    param: float
    score: float | None
    n_clusters: int | None
    status: str = 'ok'


@dataclass(frozen=True)
class SweepResult:
    algorithm: str
    best: object
    best_param: float
    best_score: float
    table: tuple = field(default_factory=tuple)

    def score_rows(self):
        return [
            [row.param, '' if row.score is None else row.score,
             '' if row.n_clusters is None else row.n_clusters, row.status]
            for row in self.table
        ]


def sweep_clustering(d, algorithm, grid=None, ap_params=None, similarity=None, jobs=1):
    """Ejecutar cada punto de la rejilla y quedarse con la mejor silueta.

    Empates: gana el parámetro menor (k o damping).
    """
    if algorithm not in ALGORITHMS:
        raise ClusteringError(f"Algoritmo desconocido: {algorithm}")
    n = d.n
    if algorithm == AGGLOMERATIVE:
        grid = sorted(grid if grid is not None else default_k_grid(n))
        merges = agglomerative_merges(d) if grid else []

        def run(k):
            if not 1 <= k <= n:
                return None
            return agglomerative_cluster(d, k, merges=merges)
    else:
        grid = sorted(grid if grid is not None else default_damping_grid())
        base = ap_params or APParams()
        s = similarity if similarity is not None else d.to_similarity()

        def run(damping):
            try:
                params = APParams(
                    damping=damping,
                    preference=base.preference,
                    max_iterations=base.max_iterations,
                    convergence_window=base.convergence_window,
                )
            except ClusteringError:
                return None
            return affinity_propagation(s, params)

    if not grid:
        raise ClusteringError('La rejilla de parámetros está vacía')

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        assignments = list(executor.map(run, grid))

    table, best = [], None
    for param, assignment in zip(grid, assignments):
        if assignment is None:
            table.append(SweepRow(param, None, None, 'invalid'))
            continue
        try:
            score = silhouette_score(d, assignment.labels)
        except ClusteringError:
            table.append(SweepRow(param, None, assignment.n_clusters, 'single_cluster'))
            continue
        status = 'ok' if assignment.converged else 'not_converged'
        table.append(SweepRow(param, score, assignment.n_clusters, status))
        if best is None or score > best[2]:
            best = (param, assignment, score)

    if best is None:
        raise ClusteringError(f"Ningún parámetro de la rejilla es válido para n={n}")
    param, assignment, score = best
    logger.info("Barrido %s: mejor parámetro %s (silueta %.4f)", algorithm, param, score)
    return SweepResult(algorithm, assignment, param, score, tuple(table))


def summarize_clusters(assignment, items, min_size=None):
    """Resumen por grupo: tamaño, representante, miembros y reparto por proyecto.

    ``items`` son diccionarios con 'id', 'project' y 'text'.
    """
    min_size = min_size if min_size is not None else settings.CHAINVULN['CLUSTERING']['SUMMARY_MIN_SIZE']
    groups = {}
    for item, label in zip(items, assignment.labels):
        groups.setdefault(label, []).append(item)

    clusters = []
    for label, members in groups.items():
        if label in assignment.exemplars:
            representative = items[assignment.exemplars[label]]['text']
        else:
            representative = Counter(member['text'] for member in members).most_common(1)[0][0]
        clusters.append({
            'label': label,
            'size': len(members),
            'representative': representative,
            'members': [member['id'] for member in members],
            'texts': [member['text'] for member in members],
            'projects': dict(sorted(Counter(member['project'] for member in members).items())),
        })
    clusters.sort(key=lambda cluster: (-cluster['size'], cluster['label']))
    covered = sum(cluster['size'] for cluster in clusters if cluster['size'] >= min_size)
    return {
        'min_size': min_size,
        'coverage': covered / len(items) if items else 0.0,
        'clusters': clusters,
    }
