from pipeline.commands import CommandResult, PipelineCommand

from codesig.signatures import signature_distance_matrix
from textcluster.clustering import affinity_propagation
from textcluster.distances import wmd_distance_matrix
from textcluster.embeddings import load_embeddings
from textcluster.exceptions import ClusteringError
from textcluster.scoring import (
    AFFINITY,
    AGGLOMERATIVE,
    ALGORITHMS,
    silhouette_score,
    summarize_clusters,
    sweep_clustering,
)

SCORES_HEADER = ['param', 'silhouette', 'n_clusters', 'status']


def text_items(writer):
    rows = writer.read_json('type_keywords.json', 'types')['titles']
    return [
        {'id': row['id'], 'project': row['project'], 'tokens': row['keywords'], 'text': ' '.join(row['keywords'])}
        for row in rows if row['keywords']
    ]


def code_items(writer):
    fragments = writer.read_json('signatures.json', 'signatures')['fragments']
    return [
        {
            'id': fragment['id'],
            'project': fragment['project'],
            'tokens': fragment['signature'],
            'text': ' '.join(fragment['signature']),
        }
        for fragment in fragments if not fragment['flagged']
    ]


class Command(PipelineCommand):
    help = 'Agrupa palabras clave de tipo (--text) o firmas de cambio (--code)'

    def add_command_arguments(self, parser):
        mode = parser.add_mutually_exclusive_group(required=True)
        mode.add_argument('--text', action='store_true', help='Agrupar palabras clave con WMD')
        mode.add_argument('--code', action='store_true', help='Agrupar firmas de cambio con Levenshtein')
        parser.add_argument(
            '--algorithm', choices=ALGORITHMS,
            help='Por defecto: agglomerative para --text y affinity para --code',
        )
        parser.add_argument(
            '--sweep', action='store_true',
            help='Con affinity, barrer el factor de amortiguación y quedarse con la mejor silueta',
        )

    def run(self, config, writer, jobs, **options):
        prefix = 'text' if options['text'] else 'code'
        algorithm = options.get('algorithm') or (AGGLOMERATIVE if options['text'] else AFFINITY)

        fallback = []
        if options['text']:
            items = text_items(writer)
            embeddings = load_embeddings(config.require('embeddings', 'cluster'))
            ids = [item['id'] for item in items]
            matrix, fallback = wmd_distance_matrix([item['tokens'] for item in items], embeddings, ids=ids, jobs=jobs)
            similarity = matrix.to_similarity(normalize=True)
        else:
            items = code_items(writer)
            ids = [item['id'] for item in items]
            matrix = signature_distance_matrix([item['tokens'] for item in items], ids=ids, jobs=jobs)
            similarity = matrix.to_similarity()
        if len(items) < 2:
            raise ClusteringError(f"cluster --{prefix}: se necesitan al menos 2 elementos, hay {len(items)}")

        if algorithm == AGGLOMERATIVE:
            result = sweep_clustering(matrix, AGGLOMERATIVE, grid=config.k_grid(len(items)), jobs=jobs)
            assignment, param, score, rows = result.best, result.best_param, result.best_score, result.score_rows()
        elif options['sweep']:
            result = sweep_clustering(
                matrix, AFFINITY, grid=config.damping_grid(), ap_params=config.ap_params(),
                similarity=similarity, jobs=jobs,
            )
            assignment, param, score, rows = result.best, result.best_param, result.best_score, result.score_rows()
        else:
            params = config.ap_params()
            assignment, param = affinity_propagation(similarity, params), params.damping
            try:
                score = silhouette_score(matrix, assignment.labels)
                status = 'ok' if assignment.converged else 'not_converged'
            except ClusteringError:
                score, status = None, 'single_cluster'
            rows = [[param, '' if score is None else score, assignment.n_clusters, status]]

        writer.write_json(f"{prefix}_clusters.json", {
            'algorithm': algorithm,
            'best_param': param,
            'silhouette': score,
            'assignment': assignment.to_dict(ids),
            'summary': summarize_clusters(assignment, items, config.summary_min_size),
            'fallback': list(fallback),
        })
        writer.write_csv(f"{prefix}_scores.csv", SCORES_HEADER, rows)

        counts = {'items': len(items), 'clusters': assignment.n_clusters, 'fallback': len(fallback)}
        score_text = 'n/d' if score is None else f"{score:.4f}"
        summary = (
            f"cluster --{prefix}: {len(items)} elementos en {assignment.n_clusters} grupos "
            f"({algorithm}, parámetro {param}, silueta {score_text})"
        )
        return CommandResult(summary=summary, counts=counts)
