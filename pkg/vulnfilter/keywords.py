"""Agrupación de palabras por similitud semántica y coincidencia de palabras clave."""

import json
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.db import models
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from titlekw.cleaning import tokenize_words

from .exceptions import ConfigurationError, EmbeddingCoverageError

logger = logging.getLogger(__name__)

BLOCK_SIZE = 512


class Polarity(models.TextChoices):
    VULNERABILITY = 'vulnerability', 'Vulnerabilidad'
    NON_VULNERABILITY = 'non-vulnerability', 'No vulnerabilidad'
    UNREVIEWED = 'unreviewed', 'Sin revisar'


@dataclass(frozen=True)
class KeywordCluster:
    representative: str
    members: tuple
    polarity: str = Polarity.UNREVIEWED.value

    def __post_init__(self):
        if not self.members:
            raise ConfigurationError(f"El grupo '{self.representative}' no tiene miembros")
        if self.polarity not in Polarity.values:
            raise ConfigurationError(f"Polaridad desconocida: {self.polarity}")

    def to_dict(self):
        return {
            'representative': self.representative,
            'members': list(self.members),
            'polarity': self.polarity,
        }

    @classmethod
    def from_dict(cls, data):
        members = tuple(data.get('members') or ())
        return cls(
            representative=data.get('representative') or (members[0] if members else ''),
            members=members,
            polarity=data.get('polarity', Polarity.UNREVIEWED.value),
        )


def word_counts(corpus):
    """Frecuencia de palabras en títulos y cuerpos de los issues."""
    counts = Counter()
    for issue in corpus.issues:
        counts.update(tokenize_words(issue.text))
    return counts


def _similarity_edges(unit, threshold, jobs):
    n = unit.shape[0]

    def block(start):
        similarity = unit[start:start + BLOCK_SIZE] @ unit.T
        rows, cols = np.nonzero(similarity >= threshold)
        rows = rows + start
        keep = rows != cols
        return rows[keep], cols[keep]

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        parts = list(executor.map(block, range(0, n, BLOCK_SIZE)))
    rows = np.concatenate([part[0] for part in parts]) if parts else np.array([], dtype=int)
    cols = np.concatenate([part[1] for part in parts]) if parts else np.array([], dtype=int)
    return rows, cols


def build_keyword_clusters(corpus, embeddings, config, jobs=1):
    """Agrupar las palabras frecuentes en componentes conexas de similitud coseno."""
    counts = word_counts(corpus)
    words = sorted(
        (word for word, count in counts.items() if count >= config.min_word_frequency),
        key=lambda word: (-counts[word], word),
    )
    if not words:
        return []

    known = [word for word in words if word in embeddings]
    unknown = [word for word in words if word not in embeddings]
    if not known:
        raise EmbeddingCoverageError(
            f"Ninguna de las {len(words)} palabras tiene vector; use embeddings con mejor cobertura"
        )
    if unknown:
        logger.info("%d palabras sin vector quedan como grupos unitarios", len(unknown))

    vectors = np.array([embeddings.vector(word) for word in known])
    norms = np.linalg.norm(vectors, axis=1)
    unit = np.divide(vectors, norms[:, None], out=np.zeros_like(vectors), where=norms[:, None] > 0)
    rows, cols = _similarity_edges(unit, config.similarity_threshold, jobs)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(known), len(known)))
    _, component = connected_components(graph, directed=False)

    grouped = {}
    for word, label in zip(known, component):
        grouped.setdefault(int(label), []).append(word)
    for word in unknown:
        grouped[f"oov:{word}"] = [word]

    clusters = [KeywordCluster(representative=members[0], members=tuple(members)) for members in grouped.values()]
    clusters.sort(key=lambda cluster: (-counts[cluster.representative], cluster.representative))
    logger.info("Grupos de palabras: %d a partir de %d palabras", len(clusters), len(words))
    return clusters


def config_clusters(config):
    """Grupos de palabras clave declarados en la configuración."""
    clusters = [
        KeywordCluster(group[0], tuple(group), Polarity.VULNERABILITY.value)
        for group in config.include_keywords
    ]
    clusters += [
        KeywordCluster(group[0], tuple(group), Polarity.NON_VULNERABILITY.value)
        for group in config.exclude_keywords
    ]
    return clusters


def load_keyword_clusters(path):
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"No se pudieron leer los grupos revisados {path}: {exc}") from exc
    return [KeywordCluster.from_dict(item) for item in document.get('clusters', [])]


def labelled_clusters(config, reviewed=()):
    """Unir grupos de la configuración y grupos revisados con polaridad asignada."""
    polarity_of = {}
    merged = []
    for cluster in [*config_clusters(config), *reviewed]:
        if cluster.polarity == Polarity.UNREVIEWED:
            continue
        for member in cluster.members:
            previous = polarity_of.setdefault(member.lower(), cluster.polarity)
            if previous != cluster.polarity:
                raise ConfigurationError(f"La palabra '{member}' tiene polaridades contradictorias")
        merged.append(cluster)
    return merged


class KeywordMatcher:
    """Coincidencia de palabras completas (o frases) sobre el texto tokenizado."""

    def __init__(self, clusters):
        self.phrases = {}
        for cluster in clusters:
            for member in cluster.members:
                tokens = tuple(tokenize_words(member))
                if tokens:
                    self.phrases.setdefault(tokens[0], []).append((tokens, cluster.polarity))

    def polarities(self, text):
        tokens = tokenize_words(text)
        found = set()
        for position, token in enumerate(tokens):
            for phrase, polarity in self.phrases.get(token, ()):
                if tuple(tokens[position:position + len(phrase)]) == phrase:
                    found.add(polarity)
        return found
