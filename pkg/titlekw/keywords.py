"""Selección de verbo/preposición objetivo y extracción de palabras clave."""

from dataclasses import dataclass

from django.db import models

from .cleaning import clean_title


class TargetRule(models.TextChoices):
    VERB_AND_PREP = 'verb_and_prep', 'Verbo y preposición'
    VERB_ONLY = 'verb_only', 'Solo verbo'
    PREP_ONLY = 'prep_only', 'Solo preposición'
    NONE = 'none', 'Sin palabras objetivo'


@dataclass(frozen=True)
class Targets:
    verb: int | None = None
    prep: int | None = None


@dataclass(frozen=True)
class TypeKeywords:
    keywords: tuple
    target_verb: str | None
    target_prep: str | None
    rule_fired: str

    def to_dict(self):
        return {
            'keywords': list(self.keywords),
            'target_verb': self.target_verb,
            'target_prep': self.target_prep,
            'rule_fired': self.rule_fired,
        }


def select_targets(tokens, vocab):
    """Elegir las posiciones del verbo y la preposición objetivo."""
    verbs = [index for index, token in enumerate(tokens) if vocab.is_verb(token)]
    preps = [index for index, token in enumerate(tokens) if vocab.is_preposition(token)]

    if verbs:
        # Mayor frecuencia primero; empate por posición
        verb = min(verbs, key=lambda index: (vocab.verb_rank(tokens[index]), index))
        after = [index for index in preps if index >= verb + 2]
        return Targets(verb=verb, prep=after[0] if after else None)

    candidates = [index for index in preps if index >= 1]
    if candidates:
        return Targets(prep=candidates[0])
    return Targets()


def extract_type_keywords(tokens, targets):
    """Palabras clave del tipo de vulnerabilidad según las posiciones objetivo."""
    tokens = tuple(tokens)
    verb, prep = targets.verb, targets.prep
    if verb is not None and prep is not None:
        keywords, rule = tokens[verb + 1:prep], TargetRule.VERB_AND_PREP
    elif verb is not None:
        keywords, rule = tokens[verb + 1:], TargetRule.VERB_ONLY
    elif prep is not None:
        keywords, rule = tokens[:prep], TargetRule.PREP_ONLY
    else:
        keywords, rule = tokens, TargetRule.NONE
    return TypeKeywords(
        keywords=keywords,
        target_verb=tokens[verb] if verb is not None else None,
        target_prep=tokens[prep] if prep is not None else None,
        rule_fired=rule.value,
    )


def title_keywords(raw_title, vocab, rules=None):
    """Limpiar un título y extraer sus palabras clave de tipo."""
    cleaned = clean_title(raw_title, rules)
    return cleaned, extract_type_keywords(cleaned.tokens, select_targets(cleaned.tokens, vocab))
