import itertools
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from .clustering import (
    APParams,
    affinity_propagation,
    agglomerative_cluster,
    agglomerative_merges,
    labels_from_merges,
    relabel,
)
from .distances import (
    DistanceMatrix,
    jaccard_distance,
    pairwise_distance_matrix,
    wmd_distance,
    wmd_distance_matrix,
    word_movers_distance,
)
from .embeddings import EmbeddingTable, load_embeddings
from .exceptions import ClusteringError, EmbeddingFormatError, MetricError
from .scoring import AFFINITY, AGGLOMERATIVE, silhouette_score, summarize_clusters, sweep_clustering

FIXTURES = Path(__file__).resolve().parent / 'fixtures'

VECTORS = {
    'x': [0.0, 0.0],
    'y': [3.0, 4.0],
    'z': [1.0, 0.0],
    'w': [0.0, 2.0],
    'v': [2.0, 2.0],
}


def euclidean(a, b):
    return float(np.linalg.norm(np.subtract(VECTORS[a], VECTORS[b])))


def transport_oracle(a, b):
    """Mejor plan con masas uniformes: media del mejor emparejamiento entre copias."""
    size = math.lcm(len(a), len(b))
    left = [word for word in a for _ in range(size // len(a))]
    right = [word for word in b for _ in range(size // len(b))]
    return min(
        sum(euclidean(left[i], right[j]) for i, j in enumerate(permutation)) / size
        for permutation in itertools.permutations(range(size))
    )


def naive_average_linkage(values, k):
    """Referencia O(n³): fusionar el par de grupos con menor distancia media."""
    n = len(values)
    groups = [[index] for index in range(n)]
    while len(groups) > k:
        best = None
        for i, j in itertools.combinations(range(len(groups)), 2):
            average = np.mean([values[a][b] for a in groups[i] for b in groups[j]])
            if best is None or average < best[0]:
                best = (average, i, j)
        _, i, j = best
        groups[i] = sorted(groups[i] + groups[j])
        del groups[j]
    owner = {item: min(group) for group in groups for item in group}
    return relabel(owner[item] for item in range(n))


def silhouette_oracle(values, labels):
    scores = []
    for i, label in enumerate(labels):
        same = [j for j, other in enumerate(labels) if other == label and j != i]
        if not same:
            scores.append(0.0)
            continue
        a = np.mean([values[i][j] for j in same])
        b = min(
            np.mean([values[i][j] for j, other in enumerate(labels) if other == cluster])
            for cluster in set(labels) if cluster != label
        )
        scores.append((b - a) / max(a, b) if max(a, b) > 0 else 0.0)
    return float(np.mean(scores))


def random_distances(rng, n):
    points = rng.random((n, 3))
    return np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)


class EmbeddingLoadingTests(SimpleTestCase):
    def write(self, text):
        handle = tempfile.NamedTemporaryFile('w', suffix='.txt', delete=False, encoding='utf-8')
        handle.write(text)
        handle.close()
        self.addCleanup(Path(handle.name).unlink)
        return handle.name

    def test_fixture(self):
        table = load_embeddings(FIXTURES / 'embeddings.txt')
        self.assertEqual(len(table), 16)
        self.assertEqual(table.dimension, 3)
        self.assertIn('crash', table)
        self.assertIsNone(table.vector('bumpfee'))
        np.testing.assert_allclose(table.vector('dos'), [0.1, 0.8, 0.3])

    def test_wrong_dimension(self):
        with self.assertRaises(EmbeddingFormatError) as context:
            load_embeddings(self.write('1 2\ncrash 0.1\n'))
        self.assertEqual(context.exception.line, 2)

    def test_bad_header(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(self.write('words\ncrash 0.1 0.2\n'))

    def test_count_mismatch(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(self.write('2 2\ncrash 0.1 0.2\n'))

    def test_duplicate_word(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(self.write('2 1\ncrash 0.1\ncrash 0.2\n'))

    def test_missing_file(self):
        with self.assertRaises(EmbeddingFormatError):
            load_embeddings(FIXTURES / 'missing.txt')


class WmdTests(SimpleTestCase):
    TOLERANCE = 1e-9

    def setUp(self):
        self.embeddings = EmbeddingTable.from_mapping(VECTORS)

    def test_single_sink(self):
        expected = (euclidean('x', 'z') + euclidean('y', 'z')) / 2
        self.assertAlmostEqual(wmd_distance(['x', 'y'], ['z'], self.embeddings), expected, delta=self.TOLERANCE)

    def test_identical_and_symmetric(self):
        self.assertEqual(wmd_distance(['x', 'y'], ['y', 'x'], self.embeddings), 0.0)
        first = wmd_distance(['x', 'v'], ['w', 'z', 'y'], self.embeddings)
        second = wmd_distance(['w', 'z', 'y'], ['x', 'v'], self.embeddings)
        self.assertAlmostEqual(first, second, delta=self.TOLERANCE)

    def test_transport_oracle(self):
        rng = np.random.default_rng(7)
        words = sorted(VECTORS)
        for _ in range(40):
            a = [str(word) for word in rng.choice(words, size=rng.integers(1, 4), replace=False)]
            b = [str(word) for word in rng.choice(words, size=rng.integers(1, 4), replace=False)]
            with self.subTest(a=a, b=b):
                self.assertAlmostEqual(
                    wmd_distance(a, b, self.embeddings), transport_oracle(a, b), delta=self.TOLERANCE,
                )

    def test_out_of_vocabulary_falls_back_to_jaccard(self):
        result = word_movers_distance(['bumpfee', 'x'], ['bumpfee'], self.embeddings)
        self.assertTrue(result.fallback)
        self.assertAlmostEqual(result.distance, 0.5)

    def test_jaccard(self):
        self.assertEqual(jaccard_distance([], []), 0.0)
        self.assertAlmostEqual(jaccard_distance(['a', 'b'], ['b', 'c']), 2 / 3)

    def test_matrix_reports_fallback_items(self):
        with self.assertLogs('textcluster.distances', level='WARNING'):
            matrix, fallback = wmd_distance_matrix([['x'], ['y'], ['zzz']], self.embeddings, ids=['a', 'b', 'c'])
        self.assertEqual(fallback, ['c'])
        self.assertEqual(matrix.ids, ('a', 'b', 'c'))
        self.assertAlmostEqual(matrix[0, 1], 5.0, delta=self.TOLERANCE)
        self.assertEqual(matrix[0, 2], 1.0)


class DistanceMatrixTests(SimpleTestCase):
    def test_brute_force(self):
        items = [[1], [4], [9], [16], [25]]
        matrix = pairwise_distance_matrix(items, lambda a, b: abs(a[0] - b[0]), jobs=3)
        for i, j in itertools.product(range(5), repeat=2):
            self.assertEqual(matrix[i, j], abs(items[i][0] - items[j][0]))

    def test_identity_items(self):
        matrix = pairwise_distance_matrix(['a', 'a', 'a'], lambda a, b: 0.0)
        self.assertFalse(matrix.values.any())

    def test_invalid_metric_value(self):
        with self.assertRaises(MetricError):
            pairwise_distance_matrix([1, 2], lambda a, b: -1.0)
        with self.assertRaises(MetricError):
            pairwise_distance_matrix([1, 2], lambda a, b: float('nan'))

    def test_similarity(self):
        matrix = DistanceMatrix(('a', 'b'), np.array([[0.0, 4.0], [4.0, 0.0]]))
        np.testing.assert_allclose(matrix.to_similarity(normalize=True), [[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(matrix.to_similarity(), [[1.0, -3.0], [-3.0, 1.0]])


class AgglomerativeTests(SimpleTestCase):
    def test_matches_naive_reference(self):
        rng = np.random.default_rng(2021)
        for trial in range(50):
            values = random_distances(rng, 8)
            merges = agglomerative_merges(values)
            for k in range(1, 9):
                with self.subTest(trial=trial, k=k):
                    self.assertEqual(labels_from_merges(8, merges, k), naive_average_linkage(values, k))

    def test_k_out_of_range(self):
        matrix = DistanceMatrix((0, 1), np.array([[0.0, 1.0], [1.0, 0.0]]))
        with self.assertRaises(ClusteringError):
            agglomerative_cluster(matrix, 3)

    def test_ties_merge_smallest_pair(self):
        values = np.ones((4, 4)) - np.eye(4)
        self.assertEqual(agglomerative_merges(values)[0], (0, 1))


class SilhouetteTests(SimpleTestCase):
    def test_matches_formula(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            values = random_distances(rng, 10)
            labels = list(rng.integers(0, 3, size=10))
            if len(set(labels)) < 2:
                labels[0], labels[1] = 0, 1
            with self.subTest(trial=trial):
                self.assertAlmostEqual(
                    silhouette_score(values, labels), silhouette_oracle(values, labels), delta=1e-12,
                )

    def test_perfect_separation(self):
        values = np.array([
            [0, 0, 1, 1],
            [0, 0, 1, 1],
            [1, 1, 0, 0],
            [1, 1, 0, 0],
        ], dtype=float)
        self.assertEqual(silhouette_score(values, [0, 0, 1, 1]), 1.0)

    def test_single_cluster_is_undefined(self):
        with self.assertRaises(ClusteringError):
            silhouette_score(np.zeros((3, 3)), [0, 0, 0])

    def test_all_singletons(self):
        values = random_distances(np.random.default_rng(1), 4)
        self.assertEqual(silhouette_score(values, [0, 1, 2, 3]), 0.0)


def two_groups(size=3, within=0.9, between=0.1):
    labels = np.repeat([0, 1], size)
    s = np.where(labels[:, None] == labels[None, :], within, between).astype(float)
    return s, tuple(int(label) for label in labels)


class AffinityPropagationTests(SimpleTestCase):
    def test_two_groups(self):
        s, expected = two_groups()
        params = APParams(damping=0.78)
        runs = [affinity_propagation(s, params) for _ in range(10)]
        for result in runs:
            self.assertEqual(result.labels, expected)
            self.assertTrue(result.converged)
            self.assertLessEqual(result.params['iterations'], 200)
        self.assertEqual(len({run.labels for run in runs}), 1)
        self.assertEqual(len({tuple(sorted(run.exemplars.items())) for run in runs}), 1)

    def test_input_is_not_modified(self):
        s, _ = two_groups()
        original = s.copy()
        affinity_propagation(s)
        np.testing.assert_array_equal(s, original)

    def test_single_item(self):
        result = affinity_propagation(np.array([[1.0]]))
        self.assertEqual(result.labels, (0,))

    def test_constant_similarity(self):
        result = affinity_propagation(np.full((4, 4), 0.5))
        self.assertEqual(result.n_clusters, 1)

    def test_invalid_params(self):
        with self.assertRaises(ClusteringError):
            APParams(damping=1.0)
        with self.assertRaises(ClusteringError):
            APParams(max_iterations=10, convergence_window=10)
        with self.assertRaises(ClusteringError):
            APParams(preference='mean')


class SweepTests(SimpleTestCase):
    def setUp(self):
        s, _ = two_groups(size=4)
        values = 1.0 - s
        np.fill_diagonal(values, 0.0)
        self.matrix = DistanceMatrix(tuple(range(8)), values)

    def test_agglomerative_sweep_picks_two_clusters(self):
        result = sweep_clustering(self.matrix, AGGLOMERATIVE, grid=[2, 3, 4, 20])
        self.assertEqual(result.best_param, 2)
        self.assertEqual(result.best.labels, (0, 0, 0, 0, 1, 1, 1, 1))
        self.assertEqual(result.score_rows()[-1], [20, '', '', 'invalid'])

    def test_affinity_sweep(self):
        result = sweep_clustering(self.matrix, AFFINITY, grid=[0.5, 0.78, 0.9])
        self.assertEqual(result.best.n_clusters, 2)
        self.assertEqual(result.best_param, 0.5)

    def test_empty_grid(self):
        with self.assertRaises(ClusteringError):
            sweep_clustering(self.matrix, AGGLOMERATIVE, grid=[])

    def test_unknown_algorithm(self):
        with self.assertRaises(ClusteringError):
            sweep_clustering(self.matrix, 'kmeans', grid=[2])


class SummaryTests(SimpleTestCase):
    def test_summary(self):
        items = [
            {'id': 'bitcoin#1', 'project': 'bitcoin', 'text': 'double spend'},
            {'id': 'monero#2', 'project': 'monero', 'text': 'double spend'},
            {'id': 'bitcoin#3', 'project': 'bitcoin', 'text': 'crash'},
        ]
        assignment = agglomerative_cluster(
            DistanceMatrix(('a', 'b', 'c'), np.array([[0, 0, 1], [0, 0, 1], [1, 1, 0]], dtype=float)), 2,
        )
        summary = summarize_clusters(assignment, items, min_size=2)
        first = summary['clusters'][0]
        self.assertEqual(first['size'], 2)
        self.assertEqual(first['representative'], 'double spend')
        self.assertEqual(first['projects'], {'bitcoin': 1, 'monero': 1})
        self.assertAlmostEqual(summary['coverage'], 2 / 3)
