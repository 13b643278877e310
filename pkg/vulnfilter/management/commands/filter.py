import json
import logging
from dataclasses import replace

from pipeline.commands import CommandResult, PipelineCommand

from corpus.dedupe import invalid_issue_ids
from corpus.loader import load_ingested
from corpus.records import parse_issue_key
from textcluster.embeddings import load_embeddings
from vulnfilter.exceptions import ConfigurationError
from vulnfilter.keywords import build_keyword_clusters, labelled_clusters, load_keyword_clusters
from vulnfilter.report import LEDGER_HEADER, REPORT_ARTIFACT, review_metrics, run_pipeline

logger = logging.getLogger(__name__)


def read_confirmed(path):
    """Lista de issues confirmados: ["proyecto#N", ...] o {"confirmed": [...]}."""
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"No se pudo leer la lista confirmada {path}: {exc}") from exc
    labels = document.get('confirmed', []) if isinstance(document, dict) else document
    try:
        return [parse_issue_key(label) for label in labels]
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path.name}: se esperaban claves 'proyecto#N'") from exc


class Command(PipelineCommand):
    help = 'Aplica las etapas S0–S4b y separa las vulnerabilidades candidatas'

    def run(self, config, writer, jobs, **options):
        corpus, links = load_ingested(writer)
        filter_config = config.filter_config()

        built = []
        if config.path('embeddings'):
            embeddings = load_embeddings(config.path('embeddings'))
            built = build_keyword_clusters(corpus, embeddings, filter_config, jobs=jobs)
        else:
            logger.info("Sin paths.embeddings: no se generan grupos de palabras para revisar")
        reviewed = load_keyword_clusters(config.path('keyword_clusters')) if config.path('keyword_clusters') else []
        clusters = labelled_clusters(filter_config, reviewed)

        report = run_pipeline(corpus, links, filter_config, clusters)
        report = replace(report, invalid=tuple(invalid_issue_ids(corpus, links, report.included)))

        payload = report.to_dict()
        if config.path('confirmed'):
            payload['review'] = review_metrics(report, read_confirmed(config.path('confirmed')))
        writer.write_json(REPORT_ARTIFACT, payload)
        writer.write_csv('filter_ledger.csv', LEDGER_HEADER, report.ledger_rows())
        writer.write_json('keyword_clusters.json', {
            'clusters': [cluster.to_dict() for cluster in built],
            'labelled': [cluster.to_dict() for cluster in clusters],
        })

        counts = {
            'total': report.total,
            'included': len(report.included),
            'discarded': len(report.discarded),
            'undecided': len(report.undecided),
            'invalid': len(report.invalid),
            'dataset': len(report.dataset),
            'keyword_clusters': len(built),
        }
        summary = (
            f"filter: {counts['total']} issues, {counts['included']} candidatos "
            f"({counts['dataset']} válidos), {counts['discarded']} descartados, "
            f"{counts['undecided']} sin decidir"
        )
        return CommandResult(summary=summary, counts=counts)
