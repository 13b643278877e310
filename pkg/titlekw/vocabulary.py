"""Vocabulario de verbos y preposiciones ordenado por frecuencia."""

import json
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from pipeline.validation import first_error

from .exceptions import VocabularyError
from .serializers import PosVocabularySerializer

DEFAULT_SEED_PATH = Path(__file__).resolve().parent / 'data' / 'pos_vocabulary.json'


@dataclass(frozen=True)
class VocabularyEntry:
    word: str
    rank: int
    frequency: int = 0


@dataclass(frozen=True)
class PosVocabulary:
    verbs: tuple = ()
    prepositions: tuple = ()

    @cached_property
    def verb_ranks(self):
        return {entry.word: entry.rank for entry in self.verbs}

    @cached_property
    def preposition_ranks(self):
        return {entry.word: entry.rank for entry in self.prepositions}

    def verb_rank(self, word):
        return self.verb_ranks.get(word)

    def is_verb(self, word):
        return word in self.verb_ranks

    def is_preposition(self, word):
        return word in self.preposition_ranks

    def to_dict(self):
        return {
            kind: [
                {'word': entry.word, 'rank': entry.rank, 'frequency': entry.frequency}
                for entry in getattr(self, kind)
            ]
            for kind in ('verbs', 'prepositions')
        }


@dataclass(frozen=True)
class SeedWords:
    verbs: tuple
    prepositions: tuple

    @classmethod
    def from_dict(cls, data, source='vocabulary'):
        serializer = PosVocabularySerializer(data=data)
        if not serializer.is_valid():
            location, message = first_error(serializer.errors, source)
            raise VocabularyError(f"{location}: {message}")
        values = serializer.validated_data
        return cls(
            verbs=tuple(dict.fromkeys(word.lower() for word in values['verbs'])),
            prepositions=tuple(dict.fromkeys(word.lower() for word in values['prepositions'])),
        )

    @classmethod
    def load(cls, path=None):
        path = Path(path or DEFAULT_SEED_PATH)
        try:
            data = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, json.JSONDecodeError) as exc:
            raise VocabularyError(f"No se pudo leer el vocabulario {path}: {exc}") from exc
        return cls.from_dict(data, source=path.name)


def _ranked(words, counts):
    order = sorted(range(len(words)), key=lambda index: (-counts[words[index]], index))
    return tuple(
        VocabularyEntry(word=words[index], rank=rank, frequency=counts[words[index]])
        for rank, index in enumerate(order, start=1)
    )


def build_pos_vocabulary(cleaned_titles, seed=None):
    """Contar las palabras semilla en los títulos y ordenarlas por frecuencia."""
    seed = seed or SeedWords.load()
    counts = Counter()
    for title in cleaned_titles:
        tokens = getattr(title, 'tokens', title)
        counts.update(tokens)
    return PosVocabulary(
        verbs=_ranked(seed.verbs, counts),
        prepositions=_ranked(seed.prepositions, counts),
    )
