import itertools
import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from pipeline.models import PipelineRun

from .dedupe import corpus_statistics, dedupe_commits, invalid_issue_ids
from .diffs import parse_unified_diff
from .exceptions import LoadError
from .linking import extract_issue_refs, link_issues_to_commits
from .loader import corpus_to_documents, load_corpus, load_documents
from .models import Commit, Issue, IssueCommitLink
from .records import CommitRecord, Corpus, Hunk, HunkLine, LinkTable, Provenance
from .store import corpus_from_database, persist_corpus

FIXTURES = Path(__file__).resolve().parent / 'fixtures'
ISSUES = FIXTURES / 'issues.json'
COMMITS = FIXTURES / 'commits.json'


def load_fixture():
    return load_corpus(ISSUES, COMMITS)


def documents(issues=(), commits=()):
    return (
        {'schema_version': 1, 'issues': list(issues)},
        {'schema_version': 1, 'commits': list(commits)},
    )


class LoaderTests(SimpleTestCase):
    def test_fixture_counts(self):
        corpus = load_fixture()
        self.assertEqual(corpus.counts(), {'issues': 8, 'commits': 7, 'hunk_bearing_commits': 6})
        self.assertEqual(corpus.projects, ['bitcoin', 'ethereum'])

    def test_commit_ids_are_lowercased(self):
        corpus = load_fixture()
        self.assertEqual(corpus.issue(('bitcoin', 10)).event_commit_ids, ('aaa111',))

    def test_same_number_in_two_projects(self):
        corpus = load_fixture()
        self.assertEqual(corpus.issue(('bitcoin', 10)).title, 'net: fix crash on malformed version message')
        self.assertEqual(corpus.issue(('ethereum', 10)).title, 'core: validate sender before pool insertion')

    def test_empty_corpus(self):
        corpus = load_documents(*documents())
        self.assertEqual(corpus.counts(), {'issues': 0, 'commits': 0, 'hunk_bearing_commits': 0})

    def test_duplicate_issue_is_rejected(self):
        issue = {'id': 1, 'project': 'bitcoin', 'title': 'a'}
        with self.assertRaises(LoadError) as context:
            load_documents(*documents(issues=[issue, issue]))
        self.assertEqual(context.exception.location, 'issues[1].id')

    def test_non_hex_commit_id_is_rejected(self):
        commit = {'id': 'xyz', 'project': 'bitcoin', 'title': 'a'}
        with self.assertRaises(LoadError) as context:
            load_documents(*documents(commits=[commit]))
        self.assertEqual(context.exception.location, 'commits[0].id')

    def test_hunks_require_files(self):
        commit = {
            'id': 'ab', 'project': 'bitcoin', 'title': 'a',
            'hunks': [{'file_path': 'src/a.cpp', 'lines': [{'marker': '+', 'text': 'x'}]}],
        }
        with self.assertRaises(LoadError) as context:
            load_documents(*documents(commits=[commit]))
        self.assertEqual(context.exception.location, 'commits[0].files')

    def test_unsupported_schema_version(self):
        with self.assertRaises(LoadError):
            load_documents({'schema_version': 2, 'issues': []}, {'schema_version': 1, 'commits': []})

    def test_missing_file(self):
        with self.assertRaises(LoadError):
            load_corpus(FIXTURES / 'missing.json', COMMITS)

    def test_round_trip(self):
        corpus = load_fixture()
        self.assertEqual(load_documents(*corpus_to_documents(corpus)), corpus)


class IssueRefTests(SimpleTestCase):
    def test_references_in_order_without_duplicates(self):
        self.assertEqual(extract_issue_refs('Merge #11531: see #11531 and #10345'), [11531, 10345])

    def test_reference_boundaries(self):
        self.assertEqual(extract_issue_refs('Fixes (#7).'), [7])
        self.assertEqual(extract_issue_refs('abc#12 and #12a'), [])
        self.assertEqual(extract_issue_refs('#12345678'), [])

    def test_empty_message(self):
        self.assertEqual(extract_issue_refs(''), [])
        self.assertEqual(extract_issue_refs(None), [])

    def test_concatenated_messages(self):
        pieces = ['Fix #12', 'see #7 and #12', 'Merge #300:', 'no refs', '(#45).', 'abc#9', '#', '']
        for first, second in itertools.product(pieces, repeat=2):
            with self.subTest(first=first, second=second):
                expected = list(dict.fromkeys(extract_issue_refs(first) + extract_issue_refs(second)))
                self.assertEqual(extract_issue_refs(f"{first} {second}"), expected)


class LinkingTests(SimpleTestCase):
    def setUp(self):
        self.corpus, _ = dedupe_commits(load_fixture())
        with self.assertLogs('corpus.linking', level='WARNING'):
            self.links = link_issues_to_commits(self.corpus)

    def test_provenance(self):
        self.assertEqual(self.links.provenance(('bitcoin', 10), 'aaa111'), Provenance.EVENT)
        self.assertEqual(self.links.provenance(('bitcoin', 13), 'ccc333'), Provenance.MESSAGE_REF)
        self.assertEqual(self.links.provenance(('bitcoin', 14), 'ddd444'), Provenance.PR_LIST)

    def test_event_wins_over_message_reference(self):
        self.assertEqual(self.links.provenance(('bitcoin', 11), 'bbb222'), Provenance.EVENT)
        self.assertEqual(self.links.commits_for(('bitcoin', 11)), ('bbb222',))

    def test_duplicate_commits_resolve_to_kept_id(self):
        self.assertEqual(self.links.commits_for(('bitcoin', 14)), ('ddd444',))

    def test_links_are_per_project(self):
        self.assertEqual(self.links.commits_for(('ethereum', 10)), ('abc123',))

    def test_unlinked_issues_and_warnings(self):
        self.assertEqual(self.links.unlinked, (('bitcoin', 12), ('bitcoin', 15)))
        self.assertEqual(len(self.links.warnings), 1)
        self.assertIn('fff666', self.links.warnings[0])

    def test_linking_is_idempotent(self):
        with self.assertLogs('corpus.linking', level='WARNING'):
            again = link_issues_to_commits(self.corpus)
        self.assertEqual(again, self.links)

    def test_document_round_trip(self):
        self.assertEqual(LinkTable.from_document(self.links.to_document()), self.links)


class DedupeTests(SimpleTestCase):
    def test_duplicate_keeps_smallest_id(self):
        corpus, removed = dedupe_commits(load_fixture())
        self.assertEqual(removed, [('ddd444', 'eee555')])
        self.assertEqual(len(corpus.commits), 6)
        self.assertEqual(corpus.commit('bitcoin', 'eee555').id, 'ddd444')

    def test_no_identical_payloads_remain(self):
        rng = np.random.default_rng(3)
        payloads = [
            (),
            (Hunk('src/a.cpp', '@@ -1 +1 @@', (HunkLine('+', 'a();'),)),),
            (Hunk('src/a.cpp', '@@ -9 +9 @@', (HunkLine('+', 'a();'),)),),
            (Hunk('src/b.cpp', '@@ -1 +1 @@', (HunkLine('-', 'b();'), HunkLine('+', 'c();'))),),
        ]
        commits = tuple(
            CommitRecord(
                project=str(rng.choice(['bitcoin', 'monero'])),
                id=f"{index:03x}",
                title='',
                hunks=payloads[int(rng.integers(0, len(payloads)))],
            )
            for index in range(30)
        )
        original = Corpus(commits=commits)
        corpus, _ = dedupe_commits(original)
        remaining = [commit for commit in corpus.commits if not commit.is_empty]
        for left, right in itertools.combinations(remaining, 2):
            if left.project == right.project:
                self.assertNotEqual(left.payload, right.payload, (left.id, right.id))
        for commit in original.commits:
            self.assertEqual(corpus.commit(commit.project, commit.id).payload, commit.payload)

    def test_fixture_payloads_are_unique(self):
        corpus, _ = dedupe_commits(load_fixture())
        remaining = [commit for commit in corpus.commits if not commit.is_empty]
        for left, right in itertools.combinations(remaining, 2):
            self.assertFalse(
                left.project == right.project and left.payload == right.payload, (left.id, right.id),
            )

    def test_empty_commits_are_not_duplicates(self):
        corpus, _ = dedupe_commits(load_fixture())
        self.assertEqual(corpus.empty_commits, [('bitcoin', '0e0e0e')])

    def test_no_duplicates_returns_same_corpus(self):
        corpus, _ = dedupe_commits(load_fixture())
        again, removed = dedupe_commits(corpus)
        self.assertIs(again, corpus)
        self.assertEqual(removed, [])

    def test_issue_with_only_empty_commits_is_invalid(self):
        corpus, _ = dedupe_commits(load_fixture())
        with self.assertLogs('corpus.linking', level='WARNING'):
            links = link_issues_to_commits(corpus)
        keys = [issue.key for issue in corpus.issues]
        self.assertEqual(invalid_issue_ids(corpus, links, keys), [('bitcoin', 16)])

    def test_statistics(self):
        corpus, _ = dedupe_commits(load_fixture())
        with self.assertLogs('corpus.linking', level='WARNING'):
            links = link_issues_to_commits(corpus)
        bitcoin, ethereum = corpus_statistics(corpus, links)
        self.assertEqual(bitcoin, {
            'project': 'bitcoin',
            'issues': 6,
            'pull_requests': 1,
            'commits': 5,
            'hunk_bearing_commits': 4,
            'empty_commits': 1,
            'linked_issues': 5,
            'unlinked_issues': 2,
            'unique_file_paths': 5,
        })
        self.assertEqual(ethereum['linked_issues'], 1)
        self.assertEqual(ethereum['unique_file_paths'], 1)


SAMPLE_DIFF = """\
diff --git a/src/net.cpp b/src/net.cpp
--- a/src/net.cpp
+++ b/src/net.cpp
@@ -1,3 +1,3 @@
 int a;
-int b;
+int c;
 int d;
diff --git a/src/new.h b/src/new.h
new file mode 100644
--- /dev/null
+++ b/src/new.h
@@ -0,0 +1,2 @@
+#pragma once
+int x;
diff --git a/src/old.cpp b/src/old.cpp
--- a/src/old.cpp
+++ /dev/null
@@ -1 +0,0 @@
-int gone;
"""


class DiffParsingTests(SimpleTestCase):
    def test_hunks_and_paths(self):
        hunks = parse_unified_diff(SAMPLE_DIFF)
        self.assertEqual([hunk.file_path for hunk in hunks], ['src/net.cpp', 'src/new.h', 'src/old.cpp'])
        self.assertEqual([line.kind for line in hunks[0].lines], ['context', 'deleted', 'added', 'context'])
        self.assertEqual(hunks[0].header, '@@ -1,3 +1,3 @@')
        self.assertEqual([line.text for line in hunks[1].changed_lines], ['#pragma once', 'int x;'])

    def test_no_newline_marker_is_ignored(self):
        text = (
            '--- a/a.go\n+++ b/a.go\n@@ -1 +1 @@\n'
            '-old\n\\ No newline at end of file\n+new\n\\ No newline at end of file\n'
        )
        (hunk,) = parse_unified_diff(text)
        self.assertEqual([(line.marker, line.text) for line in hunk.lines], [('-', 'old'), ('+', 'new')])

    def test_truncated_hunk(self):
        with self.assertRaises(LoadError):
            parse_unified_diff('--- a/a.c\n+++ b/a.c\n@@ -1,3 +1,3 @@\n a\n')

    def test_hunk_without_file(self):
        with self.assertRaises(LoadError):
            parse_unified_diff('@@ -1 +1 @@\n-a\n+b\n')


class StoreTests(TestCase):
    def setUp(self):
        self.corpus, _ = dedupe_commits(load_fixture())
        with self.assertLogs('corpus.linking', level='WARNING'):
            self.links = link_issues_to_commits(self.corpus)

    def test_database_round_trip(self):
        persist_corpus(self.corpus, self.links)
        corpus, links = corpus_from_database()
        self.assertEqual(corpus, self.corpus)
        self.assertEqual(links.links, self.links.links)
        self.assertEqual(links.unlinked, self.links.unlinked)

    def test_persist_replaces_projects(self):
        persist_corpus(self.corpus, self.links)
        persist_corpus(self.corpus, self.links)
        self.assertEqual(Issue.objects.count(), 8)
        self.assertEqual(Commit.objects.count(), 6)
        self.assertEqual(IssueCommitLink.objects.count(), len(self.links.links))

    def test_filter_by_project(self):
        persist_corpus(self.corpus, self.links)
        corpus, links = corpus_from_database(projects=['ethereum'])
        self.assertEqual(corpus.counts(), {'issues': 1, 'commits': 1, 'hunk_bearing_commits': 1})
        self.assertEqual(len(links.links), 1)


class IngestCommandTests(TestCase):
    def setUp(self):
        self.out = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.out)

    def ingest(self, *args):
        call_command(
            'ingest', '--issues', str(ISSUES), '--commits', str(COMMITS),
            '--out', str(self.out), *args, stdout=StringIO(),
        )

    def read(self, name):
        return json.loads((self.out / name).read_text(encoding='utf-8'))

    def test_artifacts(self):
        self.ingest()
        report = self.read('ingest_report.json')
        self.assertEqual(report['counts'], {
            'issues': 8,
            'commits': 7,
            'hunk_bearing_commits': 6,
            'duplicates_removed': 1,
            'empty_commits': 1,
            'links': 6,
            'unlinked_issues': 2,
            'warnings': 1,
        })
        self.assertEqual(report['duplicates'], [{'kept': 'ddd444', 'removed': 'eee555'}])
        self.assertEqual(report['empty_commits'], ['bitcoin@0e0e0e'])
        self.assertEqual(report['unlinked'], ['bitcoin#12', 'bitcoin#15'])
        self.assertEqual(len(self.read('corpus_commits.json')['commits']), 6)
        self.assertEqual(self.read('links.json')['meta']['tool'], 'chainvuln')

        stats = (self.out / 'corpus_stats.csv').read_text(encoding='utf-8').splitlines()
        self.assertTrue(stats[0].startswith('# tool=chainvuln'))
        self.assertEqual(stats[1].split(',')[0], 'project')
        self.assertEqual(len(stats), 4)

    def test_persist_records_run_and_corpus(self):
        self.ingest('--persist')
        self.assertEqual(Issue.objects.count(), 8)
        run = PipelineRun.objects.get()
        self.assertEqual(run.command, 'ingest')
        self.assertEqual(run.status, PipelineRun.Status.SUCCESS)
        self.assertIn('ingest_report.json', run.artifacts)

    def test_missing_input_is_an_error(self):
        with self.assertRaises(CommandError):
            call_command('ingest', '--out', str(self.out), stdout=StringIO())

    def test_invalid_input_records_failure(self):
        with self.assertRaises(CommandError):
            call_command(
                'ingest', '--issues', str(FIXTURES / 'missing.json'), '--commits', str(COMMITS),
                '--out', str(self.out), '--persist', stdout=StringIO(), stderr=StringIO(),
            )
        self.assertEqual(PipelineRun.objects.get().status, PipelineRun.Status.FAILED)
