import json
import shutil
import tempfile
from dataclasses import replace
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.test import SimpleTestCase

from corpus.linking import link_issues_to_commits
from corpus.loader import load_corpus
from corpus.records import CommitRecord, Corpus, IssueRecord, Link, LinkTable
from textcluster.embeddings import EmbeddingTable

from .config import FilterConfig
from .exceptions import ConfigurationError, EmbeddingCoverageError
from .keywords import (
    KeywordCluster,
    KeywordMatcher,
    Polarity,
    build_keyword_clusters,
    labelled_clusters,
)
from .report import review_metrics, run_pipeline
from .stages import (
    stage_commit_filter,
    stage_keyword_exclude,
    stage_keyword_include,
    stage_label_exclude,
    stage_label_include,
    stage_source_file_filter,
    stage_test_only_filter,
)

FIXTURES = Path(__file__).resolve().parent / 'fixtures'
ISSUES = FIXTURES / 'issues.json'
COMMITS = FIXTURES / 'commits.json'


def keys(*numbers):
    return {('bitcoin', number) for number in numbers}


def ordered(*numbers):
    return tuple(('bitcoin', number) for number in numbers)


def small_corpus(issues, commits=(), links=()):
    corpus = Corpus(issues=tuple(issues), commits=tuple(commits))
    table = LinkTable(links=tuple(Link('bitcoin', issue, commit, 'event') for issue, commit in links))
    return corpus, table


def issue(number, title='', **fields):
    return IssueRecord(project='bitcoin', id=number, title=title, **fields)


def commit(commit_id, *files):
    return CommitRecord(project='bitcoin', id=commit_id, title='', files=files)


class FilterConfigTests(SimpleTestCase):
    def test_starter_config(self):
        config = FilterConfig.starter()
        self.assertIn('.cpp', config.suffixes_for('bitcoin'))
        self.assertIn('.go', config.suffixes_for('ethereum'))
        self.assertTrue(config.has_include_label(['privacy']))
        self.assertTrue(config.has_title_prefix('  sec-12 remote crash'))

    def test_unknown_project_without_wildcard(self):
        with self.assertRaises(ConfigurationError):
            FilterConfig.starter().suffixes_for('cardano')

    def test_wildcard_suffixes(self):
        config = FilterConfig.from_dict({'source_suffixes': {'*': ['.rs']}})
        self.assertEqual(config.suffixes_for('cardano'), ('.rs',))

    def test_label_in_both_lists_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            FilterConfig.from_dict({
                'source_suffixes': {'*': ['.c']},
                'include_labels': ['Privacy'],
                'exclude_labels': ['privacy'],
            })

    def test_keyword_in_both_lists_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            FilterConfig.from_dict({
                'source_suffixes': {'*': ['.c']},
                'include_keywords': [['crash']],
                'exclude_keywords': [['crash', 'typo']],
            })


class StageTests(SimpleTestCase):
    def setUp(self):
        self.config = FilterConfig.starter()

    def test_commit_filter(self):
        corpus, links = small_corpus([issue(1), issue(2)], [commit('a1', 'src/a.cpp')], [(2, 'a1')])
        self.assertEqual(stage_commit_filter(corpus, links), keys(1))

    def test_source_file_filter(self):
        corpus, links = small_corpus(
            [issue(1), issue(2)],
            [commit('a1', 'doc/release-notes.md'), commit('a2', 'doc/notes.md', 'src/net.h')],
            [(1, 'a1'), (2, 'a2')],
        )
        self.assertEqual(stage_source_file_filter(corpus, links, self.config), keys(1))

    def test_suffix_match_is_case_insensitive(self):
        corpus, links = small_corpus([issue(1)], [commit('a1', 'src/Main.CPP')], [(1, 'a1')])
        self.assertEqual(stage_source_file_filter(corpus, links, self.config), set())

    def test_test_only_filter(self):
        corpus, links = small_corpus(
            [issue(1), issue(2)],
            [
                commit('a1', 'src/test/net_tests.cpp'),
                commit('a2', 'src/test/net_tests.cpp'),
                commit('a3', 'src/net.cpp'),
            ],
            [(1, 'a1'), (2, 'a2'), (2, 'a3')],
        )
        self.assertEqual(stage_test_only_filter(corpus, links, self.config), keys(1))

    def test_label_include(self):
        corpus, _ = small_corpus([
            issue(1, 'Leak', labels=('Privacy',)),
            issue(2, 'SEC-7 remote crash'),
            issue(3, 'Section rename'),
        ])
        self.assertEqual(stage_label_include(corpus, self.config), keys(1, 2))

    def test_label_include_shields_from_exclusion(self):
        corpus, _ = small_corpus([issue(1, labels=('Privacy', 'Docs')), issue(2, labels=('Docs',))])
        included = stage_label_include(corpus, self.config)
        self.assertEqual(stage_label_exclude(corpus, self.config, included=included), keys(2))

    def test_keyword_stages(self):
        clusters = labelled_clusters(self.config)
        corpus, _ = small_corpus([
            issue(1, 'Fix double spend in mempool'),
            issue(2, 'Fix typo'),
            issue(3, 'Fix typo that caused a crash'),
            issue(4, 'Improve coin selection'),
            issue(5, 'Fix crashing peers'),
        ])
        self.assertEqual(stage_keyword_include(corpus, clusters), keys(1, 3))
        self.assertEqual(stage_keyword_exclude(corpus, clusters), keys(2))


class KeywordMatcherTests(SimpleTestCase):
    def test_phrases_and_whole_words(self):
        matcher = KeywordMatcher([
            KeywordCluster('double-spend', ('double-spend',), Polarity.VULNERABILITY.value),
            KeywordCluster('docs', ('docs',), Polarity.NON_VULNERABILITY.value),
        ])
        self.assertEqual(matcher.polarities('A double-spend was relayed'), {Polarity.VULNERABILITY})
        self.assertEqual(matcher.polarities('double the spend'), set())
        self.assertEqual(matcher.polarities('Update Docs'), {Polarity.NON_VULNERABILITY})
        self.assertEqual(matcher.polarities('doctest'), set())

    def test_unreviewed_clusters_are_ignored(self):
        reviewed = [KeywordCluster('panic', ('panic', 'abort'))]
        clusters = labelled_clusters(FilterConfig.starter(), reviewed)
        self.assertNotIn('panic', [cluster.representative for cluster in clusters])

    def test_contradictory_polarity(self):
        reviewed = [KeywordCluster('typo', ('typo',), Polarity.VULNERABILITY.value)]
        with self.assertRaises(ConfigurationError):
            labelled_clusters(FilterConfig.starter(), reviewed)

    def test_cluster_needs_members(self):
        with self.assertRaises(ConfigurationError):
            KeywordCluster('empty', ())


class KeywordClusterTests(SimpleTestCase):
    def setUp(self):
        self.config = FilterConfig.from_dict({
            'source_suffixes': {'*': ['.c']},
            'min_word_frequency': 2,
            'similarity_threshold': 0.9,
        })
        self.corpus, _ = small_corpus([
            issue(1, 'crash crash segfault segfault'),
            issue(2, 'typo typo zzz zzz'),
            issue(3, 'once'),
        ])

    def test_similar_words_share_a_cluster(self):
        embeddings = EmbeddingTable.from_mapping({
            'crash': [1.0, 0.0],
            'segfault': [0.99, 0.05],
            'typo': [0.0, 1.0],
        })
        clusters = build_keyword_clusters(self.corpus, embeddings, self.config)
        members = sorted(sorted(cluster.members) for cluster in clusters)
        self.assertEqual(members, [['crash', 'segfault'], ['typo'], ['zzz']])
        self.assertTrue(all(cluster.polarity == Polarity.UNREVIEWED for cluster in clusters))

    def test_rare_words_give_no_clusters(self):
        corpus, _ = small_corpus([issue(1, 'alpha beta'), issue(2, 'gamma')])
        embeddings = EmbeddingTable.from_mapping({'alpha': [1.0, 0.0], 'gamma': [0.0, 1.0]})
        self.assertEqual(build_keyword_clusters(corpus, embeddings, self.config), [])

    def test_single_repeated_word(self):
        corpus, _ = small_corpus([issue(1, 'crash crash crash'), issue(2, 'crash crash')])
        embeddings = EmbeddingTable.from_mapping({'crash': [1.0, 0.0]})
        clusters = build_keyword_clusters(corpus, embeddings, self.config)
        self.assertEqual([cluster.members for cluster in clusters], [('crash',)])

    def test_no_coverage(self):
        embeddings = EmbeddingTable.from_mapping({'other': [1.0, 0.0]})
        with self.assertRaises(EmbeddingCoverageError):
            build_keyword_clusters(self.corpus, embeddings, self.config)


class PipelineLedgerTests(SimpleTestCase):
    def setUp(self):
        self.corpus = load_corpus(ISSUES, COMMITS)
        self.links = link_issues_to_commits(self.corpus)
        config = FilterConfig.starter()
        self.report = run_pipeline(self.corpus, self.links, config, labelled_clusters(config))

    def test_stage_members(self):
        expected = {
            'S0': ordered(1, 2, 3),
            'S1': ordered(4, 5),
            'S2': ordered(6, 7),
            'S3a': ordered(8, 9, 10),
            'S3b': ordered(11, 12),
            'S4a': ordered(13, 14, 15),
            'S4b': ordered(16, 17),
        }
        for stage, members in expected.items():
            with self.subTest(stage=stage):
                self.assertEqual(self.report.stage(stage).members, members)

    def test_ledger_rows(self):
        self.assertEqual(self.report.ledger_rows(), [
            ['start', '', '', '', 20],
            ['S0', 'exclude', 3, -3, 17],
            ['S1', 'exclude', 2, -2, 15],
            ['S2', 'exclude', 2, -2, 13],
            ['S3a', 'include', 3, -3, 10],
            ['S3b', 'exclude', 2, -2, 8],
            ['S4a', 'include', 3, -3, 5],
            ['S4b', 'exclude', 2, -2, 3],
        ])

    def test_outcomes_partition_the_corpus(self):
        report = self.report
        self.assertEqual(report.included, ordered(8, 9, 10, 13, 14, 15))
        self.assertEqual(report.undecided, ordered(18, 19, 20))
        self.assertEqual(len(report.included) + len(report.discarded) + len(report.undecided), report.total)
        self.assertFalse(set(report.included) & set(report.discarded))

    def test_privacy_and_docs_issue_survives(self):
        self.assertIn(('bitcoin', 10), self.report.included)
        self.assertNotIn(('bitcoin', 10), self.report.stage('S3b').members)

    def test_review_metrics(self):
        metrics = review_metrics(self.report, [('bitcoin', 8), ('bitcoin', 9), ('bitcoin', 2)])
        self.assertEqual(metrics['candidates'], 6)
        self.assertEqual(metrics['confirmed'], 2)
        self.assertAlmostEqual(metrics['precision'], 2 / 6)
        self.assertAlmostEqual(metrics['handled_ratio'], 17 / 20)

    def test_label_changes_are_monotone(self):
        config = FilterConfig.starter()
        clusters = labelled_clusters(config)
        base = set(self.report.included)
        labels = sorted({label for issue in self.corpus.issues for label in issue.labels} | {'Security'})
        for label in labels:
            with self.subTest(label=label):
                stricter = replace(config, exclude_labels=config.exclude_labels + (label,))
                report = run_pipeline(self.corpus, self.links, stricter, clusters)
                self.assertLessEqual(set(report.included), base)
                looser = replace(config, include_labels=config.include_labels + (label,))
                report = run_pipeline(self.corpus, self.links, looser, clusters)
                self.assertGreaterEqual(set(report.included), base)

    def test_empty_corpus(self):
        corpus, links = small_corpus([])
        config = FilterConfig.starter()
        report = run_pipeline(corpus, links, config, labelled_clusters(config))
        self.assertEqual(report.total, 0)
        self.assertEqual(report.ledger_rows()[-1], ['S4b', 'exclude', 0, 0, 0])
        self.assertIsNone(review_metrics(report, [])['precision'])


class FilterCommandTests(SimpleTestCase):
    def setUp(self):
        self.out = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.out)

    def write_config(self, **paths):
        config = self.out / 'config.json'
        config.write_text(json.dumps({
            'schema_version': 1,
            'paths': {'issues': str(ISSUES), 'commits': str(COMMITS), **paths},
        }), encoding='utf-8')
        return str(config)

    def run_commands(self, config):
        for command in ('ingest', 'filter'):
            call_command(command, '--config', config, '--out', str(self.out), stdout=StringIO())
        return json.loads((self.out / 'filter_report.json').read_text(encoding='utf-8'))

    def test_report_and_ledger(self):
        report = self.run_commands(self.write_config())
        self.assertEqual(report['dataset'], [f"bitcoin#{n}" for n in (8, 9, 10, 13, 14, 15)])
        self.assertEqual(report['invalid'], [])
        self.assertNotIn('review', report)
        ledger = (self.out / 'filter_ledger.csv').read_text(encoding='utf-8').splitlines()
        self.assertEqual(ledger[1], 'stage,action,count,delta,remaining')
        self.assertEqual(ledger[-1], 'S4b,exclude,2,-2,3')

    def test_keyword_clusters_and_review(self):
        confirmed = self.out / 'confirmed.json'
        confirmed.write_text(json.dumps({'confirmed': ['bitcoin#8', 'bitcoin#13']}), encoding='utf-8')
        embeddings = Path(__file__).resolve().parent.parent / 'textcluster' / 'fixtures' / 'embeddings.txt'
        report = self.run_commands(self.write_config(embeddings=str(embeddings), confirmed=str(confirmed)))
        self.assertEqual(report['review']['confirmed'], 2)
        clusters = json.loads((self.out / 'keyword_clusters.json').read_text(encoding='utf-8'))
        words = {word for cluster in clusters['clusters'] for word in cluster['members']}
        self.assertIn('fix', words)
