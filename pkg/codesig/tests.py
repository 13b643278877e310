import itertools
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from corpus.diffs import parse_unified_diff
from corpus.records import CommitRecord, Hunk, HunkLine
from textcluster.clustering import affinity_propagation

from .cleaning import clean_hunk, commit_fragments, split_fragments, strip_comments
from .config import CodesigConfig, load_languages
from .exceptions import LanguageConfigError
from .normalizer import line_signature
from .signatures import (
    generate_signatures,
    line_similarity,
    normalized_levenshtein,
    pair_changed_lines,
    signature_distance_matrix,
)

FIXTURES = Path(__file__).resolve().parent / 'fixtures'


def fixture_commit(project, commit_id):
    text = (FIXTURES / f"{project}_{commit_id}.diff").read_text(encoding='utf-8')
    hunks = tuple(parse_unified_diff(text, source=f"{project}_{commit_id}.diff"))
    return CommitRecord(
        project=project,
        id=commit_id,
        title='',
        files=tuple(dict.fromkeys(hunk.file_path for hunk in hunks)),
        hunks=hunks,
    )


def edit_distance(a, b):
    """Distancia de edición por programación dinámica."""
    previous = list(range(len(b) + 1))
    for i, left in enumerate(a, start=1):
        current = [i]
        for j, right in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (left != right)))
        previous = current
    return previous[-1]


def hunk(path, *lines):
    return Hunk(path, '', tuple(HunkLine(line[0], line[1:]) for line in lines))


class ConfigTests(SimpleTestCase):
    def setUp(self):
        self.config = CodesigConfig.default()

    def test_language_by_suffix(self):
        self.assertEqual(self.config.language_for('src/main.CPP').name, 'c-family')
        self.assertEqual(self.config.language_for('core/tx_pool.go').name, 'go')
        self.assertIsNone(self.config.language_for('doc/README.md'))

    def test_test_paths(self):
        self.assertTrue(self.config.is_test_path('core/tx_pool_test.go'))
        self.assertTrue(self.config.is_test_path('src/test/util_tests.cpp'))
        self.assertFalse(self.config.is_test_path('src/crypto/tree-hash.c'))

    def test_suffix_owned_by_two_languages(self):
        languages = {
            'a': {'suffixes': ['.c']},
            'b': {'suffixes': ['.C']},
        }
        with self.assertRaises(LanguageConfigError):
            load_languages(languages)

    def test_overrides(self):
        config = CodesigConfig.from_dict({'pairing_threshold': 0.7, 'keep_numeric_atoms': True})
        self.assertEqual(config.pairing_threshold, 0.7)
        self.assertTrue(config.keep_numeric_atoms)
        self.assertIn('go', config.languages)

    def test_invalid_threshold(self):
        with self.assertRaises(LanguageConfigError):
            CodesigConfig.from_dict({'pairing_threshold': 1.5})


class CleaningTests(SimpleTestCase):
    def setUp(self):
        self.config = CodesigConfig.default()
        self.c = self.config.languages['c-family']

    def test_comments_and_strings(self):
        texts = [
            'x = "http://a"; // note',
            'y = 1; /* start',
            'still comment',
            'end */ z = 2;',
        ]
        self.assertEqual(strip_comments(texts, self.c), ['x = "http://a";', 'y = 1;', '', 'z = 2;'])

    def test_noise_lines_are_dropped(self):
        cleaned = clean_hunk(hunk(
            'src/net.cpp',
            ' int a;',
            '+#include <vector>',
            '+    }',
            '+    // only a comment',
            '+    run();',
        ), self.config)
        self.assertEqual([line.text for line in cleaned.changed_lines], ['run();'])
        self.assertEqual(cleaned.changed_lines[0].number, 5)

    def test_non_source_and_test_files(self):
        self.assertIsNone(clean_hunk(hunk('doc/notes.md', '+text'), self.config))
        self.assertIsNone(clean_hunk(hunk('core/pool_test.go', '+x := 1'), self.config))

    def test_runs_become_fragments(self):
        cleaned = clean_hunk(hunk('src/a.cpp', '-a();', '+b();', ' c();', '+d();'), self.config)
        fragments = split_fragments(cleaned, 'bitcoin', 'abc', 2)
        self.assertEqual([fragment.id for fragment in fragments], ['abc-2-1', 'abc-2-2'])
        self.assertEqual(fragments[0].deleted_lines, ('a();',))
        self.assertEqual(fragments[1].added_numbers, (4,))


class FixtureFragmentTests(SimpleTestCase):
    def setUp(self):
        self.config = CodesigConfig.default()

    def test_monero_fragments(self):
        fragments = commit_fragments(fixture_commit('monero', '1d5e8f46'), self.config)
        spans = [[number for _, _, number in fragment.lines] for fragment in fragments]
        self.assertEqual(spans, [[2, 3, 4, 5], [8, 9], [15, 16], [19, 20, 21]])
        self.assertEqual(fragments[0].deleted_lines[1], 'memset(ints, 0 , sizeof(ints));')

    def test_signatures(self):
        commits = [
            fixture_commit('monero', '1d5e8f46'),
            fixture_commit('ethereum', 'b765e2d1'),
            fixture_commit('ethereum', '7c24cd79'),
        ]
        records = generate_signatures(commits, self.config)
        self.assertEqual([' '.join(record.signature.tokens) for record in records], [
            'VAR[][] ==> calloc() memset() assert()',
            'cn_fast_hash()',
            'cn_fast_hash()',
            'cn_fast_hash() free()',
            'From() if NIL || LEN return ERR',
            'GetAccount() Sender() if NIL return ERR',
        ])
        self.assertEqual(records[0].id, '1d5e8f46-1-1')
        self.assertFalse(any(record.signature.flagged for record in records))

    def test_parallel_generation_keeps_order(self):
        commits = [fixture_commit('monero', '1d5e8f46'), fixture_commit('ethereum', '7c24cd79')]
        serial = [record.to_dict() for record in generate_signatures(commits, self.config)]
        parallel = [record.to_dict() for record in generate_signatures(commits, self.config, jobs=4)]
        self.assertEqual(serial, parallel)


class PairingTests(SimpleTestCase):
    def setUp(self):
        self.config = CodesigConfig.default()
        self.fragments = commit_fragments(fixture_commit('monero', '1d5e8f46'), self.config)

    def test_first_fragment_pairs(self):
        fragment = self.fragments[0]
        pairs = pair_changed_lines(fragment, 0.5)
        paired = [(pair.deleted, pair.added) for pair in pairs if pair.is_paired]
        self.assertEqual(paired, [(0, 0)])
        self.assertIn((1, None), [(pair.deleted, pair.added) for pair in pairs])
        self.assertIn((None, 1), [(pair.deleted, pair.added) for pair in pairs])

    def test_against_brute_force_similarity(self):
        for fragment in self.fragments:
            similarity = {
                (i, j): 1 - edit_distance(a, b) / max(len(a), len(b))
                for (i, a), (j, b) in itertools.product(
                    enumerate(fragment.deleted_lines), enumerate(fragment.added_lines)
                )
            }
            pairs = pair_changed_lines(fragment, 0.5)
            taken = {pair.added for pair in pairs if pair.is_paired}
            for pair in pairs:
                with self.subTest(fragment=fragment.id, pair=pair):
                    if pair.is_paired:
                        self.assertAlmostEqual(pair.similarity, similarity[pair.deleted, pair.added])
                        self.assertGreaterEqual(pair.similarity, 0.5)
                    elif pair.deleted is not None:
                        free = [j for j in range(len(fragment.added_lines)) if j not in taken]
                        self.assertTrue(all(similarity[pair.deleted, j] < 0.5 for j in free))

    def test_cn_fast_hash_lines_pair(self):
        for fragment in self.fragments[1:]:
            pairs = pair_changed_lines(fragment, 0.5)
            self.assertEqual([(pair.deleted, pair.added) for pair in pairs if pair.is_paired], [(0, 0)])

    def test_line_similarity(self):
        self.assertEqual(line_similarity('abc', 'abc'), 1.0)
        self.assertAlmostEqual(line_similarity('abcd', 'abxd'), 0.75)


class NormalizerTests(SimpleTestCase):
    def setUp(self):
        languages = CodesigConfig.default().languages
        self.c = languages['c-family']
        self.go = languages['go']

    def signature(self, text, language=None):
        return ' '.join(line_signature(text, language or self.c))

    def test_table(self):
        cases = [
            ('char ints[cnt][HASH_SIZE];', self.c, 'VAR[][]'),
            ('if senderAddr == nil || len(senderAddr) != 20 {', self.go, 'if NIL || LEN'),
            ('return fmt.Errorf("invalid sender")', self.go, 'return ERR'),
            ('sender := pool.{OMIT}.CurrentState().GetAccount(tx.Sender())', self.go, 'GetAccount()'),
            ('} else if (pindex == NULL) {', self.c, 'if NIL'),
            ('if (!ok) return false;', self.c, 'if return BOL'),
            ('while (vtx.size() > MAX && fEnabled) {', self.c, 'while SIZE'),
            ('nCount += 1;', self.c, 'VAR'),
            ('std::vector<int> values;', self.c, 'VAR'),
            ('return "abc";', self.c, 'return TXT'),
            ('}', self.c, ''),
            ('break;', self.c, ''),
        ]
        for text, language, expected in cases:
            with self.subTest(text=text):
                self.assertEqual(self.signature(text, language), expected)

    def test_numeric_atoms_are_optional(self):
        self.assertEqual(line_signature('if (n > 20)', self.c), ('if',))
        self.assertEqual(line_signature('if (n > 20)', self.c, keep_numeric_atoms=True), ('if', 'NUM'))


class LevenshteinTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(normalized_levenshtein(['cn_fast_hash()'], ['cn_fast_hash()']), 0.0)
        self.assertEqual(normalized_levenshtein(['cn_fast_hash()'], ['cn_fast_hash()', 'free()']), 0.5)
        self.assertEqual(normalized_levenshtein([], []), 0.0)
        self.assertEqual(normalized_levenshtein([], ['if', 'NIL']), 1.0)

    def test_properties(self):
        rng = np.random.default_rng(42)
        vocabulary = ['if', 'NIL', 'LEN', 'ERR', 'return', 'VAR', 'free()', '==>', '||']
        for _ in range(1000):
            a = [str(token) for token in rng.choice(vocabulary, size=rng.integers(0, 7))]
            b = [str(token) for token in rng.choice(vocabulary, size=rng.integers(0, 7))]
            distance = normalized_levenshtein(a, b)
            self.assertGreaterEqual(distance, 0.0)
            self.assertLessEqual(distance, 1.0)
            self.assertEqual(distance, normalized_levenshtein(b, a))
            self.assertEqual(normalized_levenshtein(a, a), 0.0)
            if a or b:
                self.assertAlmostEqual(distance, edit_distance(a, b) / max(len(a), len(b)))

    def test_relaxed_triangle(self):
        rng = np.random.default_rng(7)
        vocabulary = ['if', 'NIL', 'ERR', 'return', 'free()']
        sequences = [
            [str(token) for token in rng.choice(vocabulary, size=rng.integers(0, 5))]
            for _ in range(25)
        ]
        for a, b, c in itertools.product(sequences, repeat=3):
            longest_ac = max(len(a), len(c))
            if not longest_ac:
                continue
            # Con la longitud mayor como peso, la cota es la desigualdad triangular de la distancia cruda
            bound = (
                max(len(a), len(b)) * normalized_levenshtein(a, b)
                + max(len(b), len(c)) * normalized_levenshtein(b, c)
            ) / longest_ac
            self.assertLessEqual(normalized_levenshtein(a, c), bound + 1e-9)


class SignatureClusterTests(SimpleTestCase):
    def setUp(self):
        commits = [
            fixture_commit('monero', '1d5e8f46'),
            fixture_commit('ethereum', 'b765e2d1'),
            fixture_commit('ethereum', '7c24cd79'),
        ]
        records = generate_signatures(commits, CodesigConfig.default())
        self.matrix = signature_distance_matrix(
            [record.signature.tokens for record in records], ids=[record.id for record in records],
        )

    def test_distances(self):
        self.assertEqual(self.matrix[1, 2], 0.0)
        self.assertEqual(self.matrix[1, 3], 0.5)
        np.testing.assert_array_equal(self.matrix.values, self.matrix.values.T)

    def test_identical_signatures_share_a_cluster(self):
        assignment = affinity_propagation(self.matrix.to_similarity())
        self.assertEqual(assignment.labels[1], assignment.labels[2])
