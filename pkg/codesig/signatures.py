"""Emparejamiento de líneas, firmas de cambio y distancia entre firmas."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from rapidfuzz.distance import Levenshtein

from textcluster.distances import pairwise_distance_matrix

from .cleaning import CodeFragment, commit_fragments
from .normalizer import PAIR_SEPARATOR, LineNormalizer

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinePair:
    deleted: int = None
    added: int = None
    similarity: float = 0.0

    @property
    def is_paired(self):
        return self.deleted is not None and self.added is not None

    def to_dict(self):
        return {'deleted': self.deleted, 'added': self.added, 'similarity': round(self.similarity, 6)}


def line_similarity(a, b):
    """Similitud de caracteres 1 − lev(a, b) / max(|a|, |b|)."""
    return Levenshtein.normalized_similarity(a, b)


def pair_changed_lines(fragment, threshold=0.5):
    """Emparejar cada línea borrada con la añadida más parecida aún libre."""
    pairs = []
    taken = set()
    for deleted_index, deleted in enumerate(fragment.deleted_lines):
        best, best_similarity = None, -1.0
        for added_index, added in enumerate(fragment.added_lines):
            if added_index in taken:
                continue
            similarity = line_similarity(deleted, added)
            if similarity > best_similarity:
                best, best_similarity = added_index, similarity
        if best is not None and best_similarity >= threshold:
            taken.add(best)
            pairs.append(LinePair(deleted_index, best, best_similarity))
        else:
            pairs.append(LinePair(deleted_index, None, 0.0))
    for added_index in range(len(fragment.added_lines)):
        if added_index not in taken:
            pairs.append(LinePair(None, added_index, 0.0))
    return pairs


@dataclass(frozen=True)
class FragmentSignature:
    tokens: tuple = ()
    flagged: bool = False

    def __str__(self):
        return ' '.join(self.tokens)


def fragment_signature(fragment, pairs, normalizer):
    """Firma del fragmento: pares en orden de línea borrada, luego borradas y añadidas sueltas."""
    deleted = [normalizer.signature(text) for text in fragment.deleted_lines]
    added = [normalizer.signature(text) for text in fragment.added_lines]
    tokens = []

    paired = sorted((pair for pair in pairs if pair.is_paired), key=lambda pair: pair.deleted)
    for pair in paired:
        before, after = deleted[pair.deleted], added[pair.added]
        if before == after:
            tokens.extend(before)
        elif before and after:
            tokens.extend([*before, PAIR_SEPARATOR, *after])
        else:
            tokens.extend(before or after)
    for pair in pairs:
        if pair.added is None:
            tokens.extend(deleted[pair.deleted])
    for pair in pairs:
        if pair.deleted is None:
            tokens.extend(added[pair.added])

    if not tokens:
        logger.warning("Fragmento %s sin firma", fragment.id)
        return FragmentSignature((), flagged=True)
    return FragmentSignature(tuple(tokens))


def normalized_levenshtein(a, b):
    """Distancia de edición por tokens dividida por la longitud mayor."""
    a, b = list(a), list(b)
    if not a and not b:
        return 0.0
    return Levenshtein.distance(a, b) / max(len(a), len(b))


@dataclass(frozen=True)
class SignatureRecord:
    fragment: CodeFragment
    pairs: tuple
    signature: FragmentSignature

    @property
    def id(self):
        return self.fragment.id

    def to_dict(self):
        fragment = self.fragment
        return {
            'id': fragment.id,
            'project': fragment.project,
            'commit': fragment.commit_id,
            'file_path': fragment.file_path,
            'language': fragment.language,
            'lines': [
                {'marker': marker, 'text': text, 'number': number}
                for marker, text, number in fragment.lines
            ],
            'pairs': [pair.to_dict() for pair in self.pairs],
            'signature': list(self.signature.tokens),
            'flagged': self.signature.flagged,
        }


def signature_records(fragments, config):
    records = []
    for fragment in fragments:
        normalizer = LineNormalizer(config.languages[fragment.language], config.keep_numeric_atoms)
        pairs = tuple(pair_changed_lines(fragment, config.pairing_threshold))
        records.append(SignatureRecord(fragment, pairs, fragment_signature(fragment, pairs, normalizer)))
    return records


def generate_signatures(commits, config, jobs=1):
    """Fragmentos y firmas de cada commit, en el orden de entrada."""
    def for_commit(commit):
        return signature_records(commit_fragments(commit, config), config)

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        per_commit = list(executor.map(for_commit, commits))
    records = [record for chunk in per_commit for record in chunk]
    flagged = sum(record.signature.flagged for record in records)
    logger.info("%d firmas generadas (%d sin contenido)", len(records), flagged)
    return records


def signature_distance_matrix(signatures, ids=None, jobs=1):
    """Matriz de distancias de Levenshtein normalizada entre firmas."""
    signatures = [tuple(signature) for signature in signatures]
    return pairwise_distance_matrix(signatures, normalized_levenshtein, ids=ids, jobs=jobs)
