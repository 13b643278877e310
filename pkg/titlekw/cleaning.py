"""Limpieza de títulos de issues/PRs."""

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from nltk.tokenize import RegexpTokenizer

from pipeline.validation import first_error

from .exceptions import VocabularyError
from .serializers import TitleRulesSerializer

DATA_DIR = Path(__file__).resolve().parent / 'data'
DEFAULT_RULES_PATH = DATA_DIR / 'title_rules.json'

# Solo letras: dígitos, guiones bajos y puntuación separan palabras
WORD_TOKENIZER = RegexpTokenizer(r'[^\W\d_]+')

BRACKET_TAG_RE = re.compile(r'\[[^\]]*\]')


@dataclass(frozen=True)
class TitleRules:
    module_prefix_window: int = 3
    special_token_patterns: tuple = ()
    noun_phrases: tuple = ()
    synonyms: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, data):
        serializer = TitleRulesSerializer(data=data)
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, 'titles')
            raise VocabularyError(f"{location}: {message}")
        values = serializer.validated_data
        return cls(
            module_prefix_window=values['module_prefix_window'],
            special_token_patterns=tuple(values['special_token_patterns']),
            noun_phrases=tuple(values['noun_phrases']),
            synonyms={key.lower(): value.lower() for key, value in values['synonyms'].items()},
        )

    @classmethod
    def load(cls, path=None):
        path = Path(path or DEFAULT_RULES_PATH)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as exc:
            raise VocabularyError(f"No se pudieron leer las reglas {path}: {exc}") from exc
        return cls.from_dict(data)

    @classmethod
    def default(cls):
        return cls.load()

    @property
    def special_token_res(self):
        return [re.compile(pattern, re.IGNORECASE) for pattern in self.special_token_patterns]

    @property
    def noun_phrase_res(self):
        return [
            re.compile(r'\b' + r'\W+'.join(map(re.escape, phrase.split())) + r'\b', re.IGNORECASE)
            for phrase in self.noun_phrases
        ]


@dataclass(frozen=True)
class CleanedTitle:
    tokens: tuple
    removals: tuple = ()

    @property
    def text(self):
        return ' '.join(self.tokens)


def tokenize_words(text):
    """Tokens de palabra en minúsculas, sin tokens de un carácter."""
    return [token for token in WORD_TOKENIZER.tokenize(text.lower()) if len(token) > 1]


def strip_module_prefix(raw, window):
    """Quitar el prefijo de módulo si ':' aparece en los primeros tokens."""
    words = raw.split()
    if not any(':' in word for word in words[:window]):
        return raw, None
    index = raw.index(':')
    return raw[index + 1:], raw[:index + 1].strip()


def clean_title(raw, rules=None):
    """Limpiar un título y devolver sus tokens normalizados."""
    rules = rules or TitleRules.default()
    removals = []
    text = raw or ''

    text, prefix = strip_module_prefix(text, rules.module_prefix_window)
    if prefix:
        removals.append(('module_prefix', prefix))

    for match in BRACKET_TAG_RE.findall(text):
        removals.append(('bracket_tag', match))
    text = BRACKET_TAG_RE.sub(' ', text)

    for pattern in rules.special_token_res:
        for match in pattern.findall(text):
            removals.append(('special_token', match))
        text = pattern.sub(' ', text)

    for pattern in rules.noun_phrase_res:
        for match in pattern.findall(text):
            removals.append(('noun_phrase', match))
        text = pattern.sub(' ', text)

    tokens = []
    for token in WORD_TOKENIZER.tokenize(text.lower()):
        if len(token) == 1:
            removals.append(('short_token', token))
            continue
        synonym = rules.synonyms.get(token)
        if synonym:
            removals.append(('synonym', token))
            token = synonym
        tokens.append(token)
    return CleanedTitle(tokens=tuple(tokens), removals=tuple(removals))
