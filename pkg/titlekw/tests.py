from django.test import SimpleTestCase

from .cleaning import TitleRules, clean_title
from .exceptions import VocabularyError
from .keywords import TargetRule, Targets, extract_type_keywords, select_targets, title_keywords
from .vocabulary import SeedWords, build_pos_vocabulary

# Título original, tokens limpios y palabras clave de tipo
TITLE_EXAMPLES = [
    (
        'accounts: fix two races in the account manager',
        ['fix', 'two', 'races', 'in', 'the', 'account', 'manager'],
        ['two', 'races'],
    ),
    (
        'blockchain_db: sanity check on tx/hash vector sizes',
        ['sanity', 'check', 'on', 'transaction', 'hash', 'vector', 'sizes'],
        ['sanity', 'check'],
    ),
    (
        '[net] Avoid possibility of NULL pointer dereference',
        ['avoid', 'null', 'pointer', 'dereference'],
        ['null', 'pointer', 'dereference'],
    ),
    (
        'wallet: Fix uninitialized read in bumpfee(…)',
        ['fix', 'uninitialized', 'read', 'in', 'bumpfee'],
        ['uninitialized', 'read'],
    ),
    (
        'Prevent DOS attacks on in-flight data structures',
        ['prevent', 'dos', 'attacks', 'on', 'in', 'flight', 'data', 'structures'],
        ['dos', 'attacks'],
    ),
]


class CleanTitleTests(SimpleTestCase):
    def test_examples(self):
        for raw, tokens, _ in TITLE_EXAMPLES:
            with self.subTest(title=raw):
                self.assertEqual(list(clean_title(raw).tokens), tokens)

    def test_removals_are_recorded(self):
        cleaned = clean_title('[net] Avoid possibility of NULL pointer dereference')
        self.assertIn(('bracket_tag', '[net]'), cleaned.removals)
        self.assertIn(('noun_phrase', 'possibility of'), cleaned.removals)
        cleaned = clean_title('blockchain_db: sanity check on tx/hash vector sizes')
        self.assertIn(('module_prefix', 'blockchain_db:'), cleaned.removals)
        self.assertIn(('synonym', 'tx'), cleaned.removals)

    def test_special_tokens_and_short_tokens(self):
        cleaned = clean_title('SEC-41 Peer TD not verified (a --b)')
        self.assertEqual(cleaned.tokens, ('peer', 'td', 'not', 'verified'))
        self.assertIn(('special_token', 'SEC-41'), cleaned.removals)
        self.assertIn(('short_token', 'a'), cleaned.removals)

    def test_colon_after_window_is_kept(self):
        cleaned = clean_title('Do not relay blocks from peers that send: headers')
        self.assertEqual(cleaned.tokens[0], 'do')
        self.assertNotIn('module_prefix', [rule for rule, _ in cleaned.removals])

    def test_idempotent(self):
        for raw, _, _ in TITLE_EXAMPLES:
            with self.subTest(title=raw):
                cleaned = clean_title(raw)
                self.assertEqual(clean_title(cleaned.text).tokens, cleaned.tokens)

    def test_empty_title(self):
        self.assertEqual(clean_title('').tokens, ())
        self.assertEqual(clean_title(None).tokens, ())

    def test_invalid_pattern(self):
        with self.assertRaises(VocabularyError):
            TitleRules.from_dict({'special_token_patterns': ['(unclosed']})


class VocabularyTests(SimpleTestCase):
    def test_default_seed_starts_with_most_frequent_words(self):
        seed = SeedWords.load()
        self.assertEqual(
            list(seed.verbs[:10]),
            ['add', 'remove', 'fix', 'make', 'fixed', 'set', 'avoid', 'improve', 'handling', 'added'],
        )
        self.assertEqual(
            list(seed.prepositions[:10]),
            ['in', 'for', 'on', 'of', 'with', 'from', 'by', 'before', 'if', 'after'],
        )

    def test_frequency_ranking(self):
        titles = [clean_title('fix the crash'), clean_title('fix a leak'), clean_title('avoid races')]
        vocab = build_pos_vocabulary(titles, SeedWords(verbs=('avoid', 'fix', 'add'), prepositions=('in',)))
        self.assertEqual([entry.word for entry in vocab.verbs], ['fix', 'avoid', 'add'])
        self.assertEqual([entry.frequency for entry in vocab.verbs], [2, 1, 0])
        self.assertLess(vocab.verb_rank('fix'), vocab.verb_rank('avoid'))

    def test_empty_titles_keep_seed_order(self):
        seed = SeedWords(verbs=('avoid', 'fix'), prepositions=('on', 'in'))
        vocab = build_pos_vocabulary([], seed)
        self.assertEqual([entry.word for entry in vocab.verbs], ['avoid', 'fix'])
        self.assertEqual([entry.rank for entry in vocab.prepositions], [1, 2])

    def test_word_in_both_lists(self):
        with self.assertRaises(VocabularyError):
            SeedWords.from_dict({'verbs': ['fix', 'in'], 'prepositions': ['in']})


class TargetSelectionTests(SimpleTestCase):
    def setUp(self):
        titles = [clean_title(raw) for raw, _, _ in TITLE_EXAMPLES]
        self.vocab = build_pos_vocabulary(titles)

    def test_verb_and_preposition(self):
        tokens = ['fix', 'two', 'races', 'in', 'the', 'account', 'manager']
        self.assertEqual(select_targets(tokens, self.vocab), Targets(verb=0, prep=3))

    def test_most_frequent_verb_wins(self):
        tokens = ['fix', 'uninitialized', 'read', 'in', 'bumpfee']
        self.assertTrue(self.vocab.is_verb('read'))
        self.assertEqual(select_targets(tokens, self.vocab).verb, 0)

    def test_first_preposition_after_verb(self):
        tokens = ['prevent', 'dos', 'attacks', 'on', 'in', 'flight', 'data', 'structures']
        self.assertEqual(select_targets(tokens, self.vocab), Targets(verb=0, prep=3))

    def test_preposition_next_to_verb_is_skipped(self):
        seed = SeedWords(verbs=('fix',), prepositions=('in', 'on'))
        vocab = build_pos_vocabulary([], seed)
        targets = select_targets(['fix', 'in', 'wallet', 'on', 'shutdown'], vocab)
        self.assertEqual(targets, Targets(verb=0, prep=3))

    def test_leading_preposition_is_not_a_target(self):
        seed = SeedWords(verbs=('fix',), prepositions=('in', 'on'))
        vocab = build_pos_vocabulary([], seed)
        self.assertEqual(select_targets(['in', 'flight', 'crash', 'on', 'exit'], vocab), Targets(prep=3))

    def test_no_targets(self):
        self.assertEqual(select_targets(['peer', 'td', 'not', 'verified'], self.vocab), Targets())

    def test_preposition_never_adjacent_to_verb(self):
        for raw, _, _ in TITLE_EXAMPLES:
            tokens = clean_title(raw).tokens
            targets = select_targets(tokens, self.vocab)
            if targets.verb is not None and targets.prep is not None:
                self.assertGreaterEqual(targets.prep, targets.verb + 2)


class TypeKeywordTests(SimpleTestCase):
    def setUp(self):
        self.vocab = build_pos_vocabulary([clean_title(raw) for raw, _, _ in TITLE_EXAMPLES])

    def test_examples(self):
        for raw, _, keywords in TITLE_EXAMPLES:
            with self.subTest(title=raw):
                _, result = title_keywords(raw, self.vocab)
                self.assertEqual(list(result.keywords), keywords)

    def test_rules_fired(self):
        rules = [title_keywords(raw, self.vocab)[1].rule_fired for raw, _, _ in TITLE_EXAMPLES]
        self.assertEqual(rules, [
            TargetRule.VERB_AND_PREP, TargetRule.PREP_ONLY, TargetRule.VERB_ONLY,
            TargetRule.VERB_AND_PREP, TargetRule.VERB_AND_PREP,
        ])

    def test_no_targets_keeps_all_tokens(self):
        result = extract_type_keywords(('peer', 'td'), Targets())
        self.assertEqual(result.keywords, ('peer', 'td'))
        self.assertEqual(result.rule_fired, TargetRule.NONE)

    def test_keywords_are_a_contiguous_slice(self):
        for raw, _, _ in TITLE_EXAMPLES:
            cleaned, result = title_keywords(raw, self.vocab)
            tokens, size = cleaned.tokens, len(result.keywords)
            slices = {tokens[start:start + size] for start in range(len(tokens) - size + 1)}
            self.assertIn(result.keywords, slices)
