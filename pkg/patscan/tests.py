import json
import shutil
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from codesig.config import CodesigConfig

from .exceptions import PatternLoadError, UnbalancedBracesError
from .extractor import extract_functions
from .matcher import MatchResult, TokenStream, match_signature
from .patterns import load_patterns, parse_patterns
from .scanner import Verdict, classify, evaluate_function, scan_repo

FIXTURES = Path(__file__).resolve().parent / 'fixtures'
VULNERABLE_TREE = FIXTURES / 'vulnerable'
PATCHED_TREE = FIXTURES / 'patched'

CBLOCK_SOURCE = """\
namespace demo {
class CBlock {
public:
    int Size() const { return 1; }
};

bool CBlock::CheckBlock(CValidationState& state) const
{
    if (vtx.empty())
        return state.DoS(100, error("CheckBlock() : size limits failed"));
    for (unsigned int i = 0; i < vtx.size(); i++)
    {
        if (!vtx[i].CheckTransaction())
            return false;
    }
    return true;
}
}
"""

GO_SOURCE = """\
package core

func (pool *TxPool) ValidateTransaction(tx *Transaction) error {
\tif len(tx.Data) > 0 {
\t\treturn fmt.Errorf("bad {")
\t}
\treturn nil
}

func helper() int {
\treturn 1
}
"""


def fixture_dir(pattern):
    return f"p{int(pattern.id[1:]):02d}"


def pattern_document(**overrides):
    pattern = {
        'id': 'X1',
        'description': 'demo',
        'provenance': 'demo/demo#1',
        'file_globs': ['main.cpp'],
        'function_patterns': [],
        'anchor_signature': 'if BuildMerkleTree() return DoS()',
        'vulnerable_signature': 'if CheckTransaction() return DoS()',
        'patched_signature': 'insert() if SIZE return DoS()',
    }
    pattern.update(overrides)
    return {'schema_version': 1, 'patterns': [pattern]}


class PatternLoadingTests(SimpleTestCase):
    def test_shipped_catalogue_has_21_patterns(self):
        patterns = load_patterns()
        self.assertEqual([pattern.id for pattern in patterns], [f"P{index}" for index in range(1, 22)])
        for pattern in patterns:
            self.assertEqual(pattern.match_threshold, 0.8)
            self.assertTrue(pattern.anchor_signature)
            self.assertTrue(pattern.file_globs or pattern.function_patterns)

    def test_signature_is_split_into_tokens(self):
        pattern, = parse_patterns(pattern_document())
        self.assertEqual(pattern.anchor_signature, ('if', 'BuildMerkleTree()', 'return', 'DoS()'))

    def test_pattern_threshold_overrides_default(self):
        pattern, = parse_patterns(pattern_document(match_threshold=0.9), default_threshold=0.7)
        self.assertEqual(pattern.match_threshold, 0.9)
        pattern, = parse_patterns(pattern_document(), default_threshold=0.7)
        self.assertEqual(pattern.match_threshold, 0.7)

    def test_duplicate_id_is_rejected(self):
        document = pattern_document()
        document['patterns'].append(dict(document['patterns'][0]))
        with self.assertRaisesMessage(PatternLoadError, 'X1'):
            parse_patterns(document)

    def test_empty_signature_is_rejected(self):
        with self.assertRaises(PatternLoadError):
            parse_patterns(pattern_document(patched_signature='   '))

    def test_invalid_regex_is_rejected(self):
        with self.assertRaises(PatternLoadError):
            parse_patterns(pattern_document(function_patterns=['CheckBlock(']))

    def test_pattern_without_location_is_rejected(self):
        with self.assertRaises(PatternLoadError):
            parse_patterns(pattern_document(file_globs=[]))

    def test_empty_file_defines_no_patterns(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'patterns.json'
            path.write_text('\n', encoding='utf-8')
            with self.assertLogs('patscan.patterns', level='WARNING'):
                self.assertEqual(load_patterns(path), [])

    def test_invalid_json_raises(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'patterns.json'
            path.write_text('{"patterns": [', encoding='utf-8')
            with self.assertRaises(PatternLoadError):
                load_patterns(path)

    def test_file_globs(self):
        patterns = {pattern.id: pattern for pattern in load_patterns()}
        self.assertTrue(patterns['P2'].matches_file('src/main.cpp'))
        self.assertTrue(patterns['P2'].matches_file('src/primitives/transaction.cpp'))
        self.assertFalse(patterns['P2'].matches_file('src/mainx.cpp'))
        self.assertTrue(patterns['P20'].matches_file('internal/ethapi/api.go'))
        self.assertFalse(patterns['P20'].matches_file('rpc/api.go'))


class ExtractorTests(SimpleTestCase):
    def setUp(self):
        self.config = CodesigConfig.default()

    def test_c_functions_inside_namespace_and_class(self):
        functions = extract_functions(CBLOCK_SOURCE, self.config.language_for('main.cpp'))
        self.assertEqual([function.name for function in functions], ['Size', 'CBlock::CheckBlock'])
        check = functions[1]
        self.assertEqual(check.span, (8, 17))
        self.assertEqual(check.body[0][0], 9)

    def test_go_receiver_name(self):
        functions = extract_functions(GO_SOURCE, self.config.language_for('pool.go'))
        self.assertEqual([function.name for function in functions], ['TxPool.ValidateTransaction', 'helper'])
        self.assertEqual(functions[0].span, (3, 8))

    def test_unbalanced_braces(self):
        language = self.config.language_for('main.cpp')
        with self.assertRaises(UnbalancedBracesError):
            extract_functions('int f() {\n    return 1;\n', language)
        with self.assertRaises(UnbalancedBracesError):
            extract_functions('}\n', language)


class MatcherTests(SimpleTestCase):
    def test_exact_window(self):
        stream = TokenStream(('a', 'b', 'c', 'd'), (1, 2, 3, 4))
        result = match_signature(stream, ('b', 'c'))
        self.assertEqual(result.score, 1.0)
        self.assertEqual(result.span, (2, 3))

    def test_tie_keeps_earliest_window(self):
        stream = TokenStream(('a', 'q', 'a', 'q'), (1, 2, 3, 4))
        result = match_signature(stream, ('a', 'z'))
        self.assertEqual(result.score, 0.5)
        self.assertEqual(result.span, (1, 2))

    def test_empty_inputs_score_zero(self):
        stream = TokenStream(('a',), (1,))
        self.assertEqual(match_signature(stream, ()).score, 0.0)
        self.assertEqual(match_signature(TokenStream(), ('a',)).score, 0.0)

    def test_short_stream_uses_whole_body(self):
        stream = TokenStream(('a',), (7,))
        result = match_signature(stream, ('a', 'b'))
        self.assertEqual(result.score, 0.5)
        self.assertEqual(result.span, (7, 7))


class ClassifyTests(SimpleTestCase):
    def test_patched_wins_over_vulnerable(self):
        anchor, vulnerable, patched = MatchResult(1.0, (1, 1)), MatchResult(0.9, (1, 2)), MatchResult(0.8, (3, 4))
        verdict, best = classify(anchor, vulnerable, patched, 0.8)
        self.assertEqual(verdict, Verdict.PATCHED)
        self.assertEqual(best.span, (3, 4))

    def test_anchor_only(self):
        verdict, _ = classify(MatchResult(0.9), MatchResult(0.5), MatchResult(0.79), 0.8)
        self.assertEqual(verdict, Verdict.ANCHOR_ONLY)

    def test_location_gate(self):
        config = CodesigConfig.default()
        pattern, = parse_patterns(pattern_document(file_globs=['other.cpp']))
        function = extract_functions(CBLOCK_SOURCE, config.language_for('main.cpp'))[1]
        stream = TokenStream(('if', 'BuildMerkleTree()', 'return', 'DoS()'), (1, 1, 2, 2))
        self.assertIsNone(evaluate_function(pattern, function, stream, 'src/main.cpp', 'demo'))
        pattern, = parse_patterns(pattern_document(file_globs=[], function_patterns=['CheckBlock$']))
        finding = evaluate_function(pattern, function, stream, 'src/main.cpp', 'demo')
        self.assertEqual(finding.verdict, Verdict.ANCHOR_ONLY)


class FixtureScanTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.config = CodesigConfig.default()
        cls.patterns = load_patterns()

    def test_each_pattern_flags_its_vulnerable_fixture(self):
        for pattern in self.patterns:
            with self.subTest(pattern=pattern.id):
                report = scan_repo([VULNERABLE_TREE / fixture_dir(pattern)], [pattern], self.config)
                self.assertEqual([finding.verdict for finding in report.findings], [Verdict.VULNERABLE])
                self.assertGreaterEqual(report.findings[0].vulnerable_score, 0.8)
                self.assertLess(report.findings[0].patched_score, 0.8)

    def test_each_pattern_accepts_its_patched_fixture(self):
        for pattern in self.patterns:
            with self.subTest(pattern=pattern.id):
                report = scan_repo([PATCHED_TREE / fixture_dir(pattern)], [pattern], self.config)
                self.assertEqual([finding.verdict for finding in report.findings], [Verdict.PATCHED])

    def test_vulnerable_tree(self):
        report = scan_repo([VULNERABLE_TREE], self.patterns, self.config, jobs=4)
        vulnerable = report.by_verdict(Verdict.VULNERABLE)
        self.assertEqual(len(vulnerable), 21)
        for finding in vulnerable:
            pattern = next(pattern for pattern in self.patterns if pattern.id == finding.pattern_id)
            self.assertTrue(finding.path.startswith(fixture_dir(pattern) + '/'))
        self.assertEqual(report.skipped, [])

    def test_patched_tree_has_no_vulnerable_findings(self):
        report = scan_repo([PATCHED_TREE], self.patterns, self.config, jobs=4)
        self.assertFalse(report.has_vulnerable)
        self.assertEqual(len(report.by_verdict(Verdict.PATCHED)), 21)

    def test_irrelevant_files_do_not_change_findings(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp) / 'repo'
            shutil.copytree(VULNERABLE_TREE / 'p04', root)
            before = [finding.to_dict() for finding in scan_repo([root], self.patterns, self.config).findings]
            (root / 'src' / 'util.cpp').write_text('int Add(int a, int b)\n{\n    return a + b;\n}\n')
            (root / 'README.md').write_text('notes\n')
            after = [finding.to_dict() for finding in scan_repo([root], self.patterns, self.config).findings]
        self.assertEqual(before, after)

    def test_unbalanced_file_is_skipped(self):
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp) / 'repo'
            root.mkdir()
            (root / 'main.cpp').write_text('bool CBlock::CheckBlock() const\n{\n')
            with self.assertLogs('patscan.scanner', level='WARNING'):
                report = scan_repo([root], self.patterns, self.config)
        self.assertEqual(report.findings, [])
        self.assertEqual([skipped['path'] for skipped in report.skipped], ['main.cpp'])

    def test_repeated_target_names_are_disambiguated(self):
        roots = [VULNERABLE_TREE / 'p04', PATCHED_TREE / 'p04']
        report = scan_repo(roots, self.patterns, self.config)
        self.assertEqual(sorted({finding.target for finding in report.findings}), ['p04', 'p04-2'])


class ScanCommandTests(SimpleTestCase):
    def setUp(self):
        self.out = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.out)

    def scan(self, target):
        call_command('scan', '--target', str(target), '--out', self.out, stdout=StringIO())

    def test_vulnerable_tree_exits_with_findings_code(self):
        with self.assertRaises(CommandError) as context:
            self.scan(VULNERABLE_TREE)
        self.assertEqual(context.exception.returncode, 2)
        document = json.loads((Path(self.out) / 'scan_findings.json').read_text(encoding='utf-8'))
        self.assertEqual(document['counts']['vulnerable'], 21)

    def test_patched_tree_exits_cleanly(self):
        self.scan(PATCHED_TREE)
        document = json.loads((Path(self.out) / 'scan_findings.json').read_text(encoding='utf-8'))
        self.assertEqual(document['counts']['vulnerable'], 0)
        self.assertEqual(document['counts']['patched'], 21)
        self.assertEqual(document['meta']['artifact'], 'scan_findings.json')
        table = (Path(self.out) / 'scan_findings.txt').read_text(encoding='utf-8')
        self.assertIn("pattern\tpatched\n", table)
        self.assertIn("P21\tPATCHED\n", table)

    def test_rerun_is_byte_identical(self):
        self.scan(PATCHED_TREE)
        first = (Path(self.out) / 'scan_findings.json').read_bytes()
        self.scan(PATCHED_TREE)
        self.assertEqual((Path(self.out) / 'scan_findings.json').read_bytes(), first)

    def test_missing_target_is_an_error(self):
        with self.assertRaises(CommandError):
            call_command('scan', '--out', self.out, stdout=StringIO())
