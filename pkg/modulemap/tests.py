from django.test import SimpleTestCase

from corpus.records import CommitRecord, Corpus, IssueRecord, Link, LinkTable

from .exceptions import ModulePathError
from .mapping import (
    ArchitectureMap,
    ModulePathRule,
    aggregate_module_counts,
    extract_module_path,
    project_module_summary,
)

BITCOIN = ModulePathRule('bitcoin', ('src',))
ETHEREUM = ModulePathRule('ethereum', ('src', 'core', 'swarm', 'eth'))


def corpus_with(files_by_issue, project='bitcoin'):
    """Un commit por issue con los archivos dados."""
    issues, commits, links = [], [], []
    for number, files in files_by_issue.items():
        commit_id = f"c{number:03x}"
        issues.append(IssueRecord(project=project, id=number, title=''))
        commits.append(CommitRecord(project=project, id=commit_id, title='', files=tuple(files)))
        links.append(Link(project, number, commit_id, 'event'))
    return Corpus(issues=tuple(issues), commits=tuple(commits)), LinkTable(links=tuple(links))


class ExtractModulePathTests(SimpleTestCase):
    def test_table(self):
        cases = [
            ('rpc/server.cpp', BITCOIN, 'rpc/'),
            ('src/wallet/wallet.cpp', BITCOIN, 'src/wallet/'),
            ('src/main.cpp', BITCOIN, None),
            ('src/wallet/test/wallet_tests.cpp', BITCOIN, 'src/wallet/'),
            ('./src/qt/main.cpp', BITCOIN, 'src/qt/'),
            ('/Src/RPC/server.cpp', BITCOIN, 'src/rpc/'),
            ('main.cpp', BITCOIN, None),
            ('core/tx_pool.go', ETHEREUM, None),
            ('core/vm/evm.go', ETHEREUM, 'core/vm/'),
            ('accounts/manager.go', ETHEREUM, 'accounts/'),
            ('core/tx_pool.go', BITCOIN, 'core/'),
        ]
        for path, rule, expected in cases:
            with self.subTest(path=path, project=rule.project):
                self.assertEqual(extract_module_path(path, rule), expected)

    def test_empty_path(self):
        with self.assertRaises(ModulePathError):
            extract_module_path('  ', BITCOIN)

    def test_rule_needs_generic_roots(self):
        with self.assertRaises(ModulePathError):
            ModulePathRule('bitcoin', ())


class ArchitectureMapTests(SimpleTestCase):
    def setUp(self):
        self.architecture = ArchitectureMap.load()

    def test_shipped_map(self):
        self.assertEqual(self.architecture.lookup('src/wallet/').module, 'Wallet')
        self.assertEqual(self.architecture.lookup('rpc/').layer, 'Network')
        self.assertEqual(self.architecture.rule_for('ethereum').generic_roots, ('src', 'core', 'swarm', 'eth'))
        self.assertEqual(self.architecture.rule_for('monero').generic_roots, ('src',))

    def test_duplicate_module_path(self):
        data = {
            'generic_roots': {'*': ['src']},
            'entries': [
                {'path': 'rpc/', 'module': 'RPC', 'layer': 'Network'},
                {'path': 'RPC', 'module': 'RPC', 'layer': 'Network'},
            ],
        }
        with self.assertRaises(ModulePathError):
            ArchitectureMap.from_dict(data)

    def test_unknown_layer(self):
        data = {'generic_roots': {'*': ['src']}, 'entries': [{'path': 'rpc/', 'module': 'RPC', 'layer': 'Cloud'}]}
        with self.assertRaises(ModulePathError):
            ArchitectureMap.from_dict(data)

    def test_override_maps_flagged_file(self):
        data = {
            'generic_roots': {'*': ['src']},
            'entries': [{'path': 'src/consensus/', 'module': 'Consensus', 'layer': 'Policy'}],
            'overrides': {'src/main.cpp': 'src/consensus'},
        }
        architecture = ArchitectureMap.from_dict(data)
        self.assertEqual(architecture.module_path_for('bitcoin', 'src/main.cpp'), 'src/consensus/')


class AggregateTests(SimpleTestCase):
    def setUp(self):
        self.architecture = ArchitectureMap.load()

    def test_issue_touching_two_modules(self):
        corpus, links = corpus_with({1: ['src/rpc/server.cpp', 'src/wallet/wallet.cpp']})
        counts = aggregate_module_counts([('bitcoin', 1)], links, corpus, self.architecture)
        self.assertEqual(counts.modules, {'RPC': 1, 'Wallet': 1})
        self.assertEqual(counts.module_total, 2)
        self.assertGreater(counts.module_total, counts.issue_count)
        self.assertEqual(counts.layers, {'Network': 1, 'Peer': 1})

    def test_issues_in_one_module(self):
        corpus, links = corpus_with({
            1: ['src/wallet/wallet.cpp'],
            2: ['src/wallet/rpcwallet.cpp', 'src/wallet/db.cpp'],
            3: ['src/wallet/wallet.h'],
        })
        keys = [('bitcoin', number) for number in (1, 2, 3)]
        counts = aggregate_module_counts(keys, links, corpus, self.architecture)
        self.assertEqual(counts.modules, {'Wallet': 3})
        self.assertEqual(counts.module_total, counts.issue_count)

    def test_empty_candidates(self):
        corpus, links = corpus_with({})
        counts = aggregate_module_counts([], links, corpus, self.architecture)
        self.assertEqual(counts.module_total, 0)
        payload = counts.to_dict(self.architecture)
        self.assertEqual(payload['modules'], [])
        self.assertTrue(all(row['issues'] == 0 for row in payload['layers']))

    def test_unmapped_and_flagged(self):
        corpus, links = corpus_with({1: ['src/main.cpp', 'src/script/interpreter.cpp']})
        with self.assertLogs('modulemap.mapping', level='WARNING'):
            counts = aggregate_module_counts([('bitcoin', 1)], links, corpus, self.architecture)
        self.assertEqual(counts.unmapped, {'src/script/': 1})
        self.assertEqual(counts.flagged_files, ((('bitcoin', 1), 'src/main.cpp'),))
        self.assertEqual(counts.modules, {})

    def test_drop_policy(self):
        data = {'generic_roots': {'*': ['src']}, 'unmapped_policy': 'drop', 'entries': []}
        corpus, links = corpus_with({1: ['src/script/interpreter.cpp']})
        counts = aggregate_module_counts([('bitcoin', 1)], links, corpus, ArchitectureMap.from_dict(data))
        self.assertEqual(counts.unmapped, {})

    def test_csv_rows_end_with_layer_totals(self):
        corpus, links = corpus_with({1: ['src/qt/bitcoingui.cpp']})
        counts = aggregate_module_counts([('bitcoin', 1)], links, corpus, self.architecture)
        rows = counts.csv_rows(self.architecture)
        self.assertEqual(rows[0], ['UI', 'GUI/CMD', 1])
        self.assertEqual(rows[-5:], [
            ['Policy', '*', 0], ['Peer', '*', 0], ['Network', '*', 0], ['UI', '*', 1], ['Other', '*', 0],
        ])

    def test_project_summary(self):
        corpus, links = corpus_with({1: ['src/main.cpp', 'src/net.cpp', 'src/qt/bitcoingui.cpp']})
        (row,) = project_module_summary([('bitcoin', 1)], links, corpus, self.architecture)
        self.assertEqual(row['unique_file_paths'], 3)
        self.assertEqual(row['module_paths'], ['src/qt/'])
        self.assertEqual(row['flagged_files'], ['src/main.cpp', 'src/net.cpp'])
