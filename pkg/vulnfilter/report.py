"""Ejecución ordenada de las etapas y libro de resultados."""

import logging
from dataclasses import dataclass, field

from corpus.records import format_issue_key, parse_issue_key

from .stages import (
    stage_commit_filter,
    stage_keyword_exclude,
    stage_keyword_include,
    stage_label_exclude,
    stage_label_include,
    stage_source_file_filter,
    stage_test_only_filter,
)

logger = logging.getLogger(__name__)

INCLUDE = 'include'
EXCLUDE = 'exclude'

STAGE_ACTIONS = [
    ('S0', EXCLUDE),
    ('S1', EXCLUDE),
    ('S2', EXCLUDE),
    ('S3a', INCLUDE),
    ('S3b', EXCLUDE),
    ('S4a', INCLUDE),
    ('S4b', EXCLUDE),
]

LEDGER_HEADER = ['stage', 'action', 'count', 'delta', 'remaining']


@dataclass(frozen=True)
class StageResult:
    stage: str
    action: str
    members: tuple
    remaining: int

    @property
    def count(self):
        return len(self.members)

    @property
    def delta(self):
        # Cambio del conjunto pendiente: incluir o excluir lo retira del filtrado
        return -self.count

    def to_dict(self):
        return {
            'stage': self.stage,
            'action': self.action,
            'count': self.count,
            'delta': self.delta,
            'remaining': self.remaining,
            'members': [format_issue_key(key) for key in self.members],
        }


@dataclass(frozen=True)
class FilterReport:
    total: int
    stages: tuple = ()
    included: tuple = ()
    discarded: tuple = ()
    undecided: tuple = ()
    invalid: tuple = field(default=())

    @property
    def dataset(self):
        invalid = set(self.invalid)
        return tuple(key for key in self.included if key not in invalid)

    def stage(self, stage_id):
        return next(result for result in self.stages if result.stage == stage_id)

    def ledger_rows(self):
        rows = [['start', '', '', '', self.total]]
        rows += [[r.stage, r.action, r.count, r.delta, r.remaining] for r in self.stages]
        return rows

    def to_dict(self):
        return {
            'total': self.total,
            'stages': [result.to_dict() for result in self.stages],
            'included': [format_issue_key(key) for key in self.included],
            'discarded': [format_issue_key(key) for key in self.discarded],
            'undecided': [format_issue_key(key) for key in self.undecided],
            'invalid': [format_issue_key(key) for key in self.invalid],
            'dataset': [format_issue_key(key) for key in self.dataset],
        }


def run_pipeline(corpus, links, config, clusters):
    """Aplicar S0, S1, S2, S3a, S3b, S4a y S4b en orden sobre el conjunto pendiente."""
    order = {issue.key: index for index, issue in enumerate(corpus.issues)}
    pool = [issue.key for issue in corpus.issues]
    selected = {}

    def apply(stage, members):
        nonlocal pool
        members = sorted(members, key=order.__getitem__)
        removed = set(members)
        pool = [key for key in pool if key not in removed]
        selected[stage] = StageResult(stage, dict(STAGE_ACTIONS)[stage], tuple(members), len(pool))
        logger.info("%s: %d issues, quedan %d", stage, len(members), len(pool))

    apply('S0', stage_commit_filter(corpus, links, pool))
    apply('S1', stage_source_file_filter(corpus, links, config, pool))
    apply('S2', stage_test_only_filter(corpus, links, config, pool))
    apply('S3a', stage_label_include(corpus, config, pool))
    apply('S3b', stage_label_exclude(corpus, config, pool, included=selected['S3a'].members))
    apply('S4a', stage_keyword_include(corpus, clusters, pool))
    apply('S4b', stage_keyword_exclude(corpus, clusters, pool))

    stages = tuple(selected[stage] for stage, _ in STAGE_ACTIONS)
    included = {key for result in stages if result.action == INCLUDE for key in result.members}
    discarded = {key for result in stages if result.action == EXCLUDE for key in result.members}
    return FilterReport(
        total=len(corpus.issues),
        stages=stages,
        included=tuple(sorted(included, key=order.__getitem__)),
        discarded=tuple(sorted(discarded, key=order.__getitem__)),
        undecided=tuple(pool),
    )


def review_metrics(report, confirmed_ids):
    """Precisión frente a una lista confirmada y proporción de issues resueltos."""
    confirmed = set(confirmed_ids)
    candidates = set(report.dataset)
    hits = len(candidates & confirmed)
    return {
        'candidates': len(candidates),
        'confirmed': hits,
        'precision': hits / len(candidates) if candidates else None,
        'handled_ratio': 1 - len(report.undecided) / report.total if report.total else None,
    }


REPORT_ARTIFACT = 'filter_report.json'


def load_candidates(writer):
    """Issues del conjunto final según el informe de 'filter'."""
    document = writer.read_json(REPORT_ARTIFACT, 'filter')
    return [parse_issue_key(label) for label in document['dataset']]
