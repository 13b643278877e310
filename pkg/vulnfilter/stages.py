"""Etapas S0–S4b del filtrado de issues."""

import logging

from .keywords import KeywordMatcher, Polarity

logger = logging.getLogger(__name__)


def _linked_commits(corpus, links, issue_key):
    commits = (corpus.commit(issue_key[0], commit_id) for commit_id in links.commits_for(issue_key))
    return [commit for commit in commits if commit is not None]


def _pool(corpus, pool):
    return [issue.key for issue in corpus.issues] if pool is None else list(pool)


def stage_commit_filter(corpus, links, pool=None):
    """S0: excluir issues sin commits de código enlazados."""
    return {key for key in _pool(corpus, pool) if not links.commits_for(key)}


def stage_source_file_filter(corpus, links, config, pool=None):
    """S1: excluir issues cuyos commits no tocan archivos de código."""
    excluded = set()
    for key in _pool(corpus, pool):
        suffixes = config.suffixes_for(key[0])
        touches_source = any(
            path.lower().endswith(suffixes)
            for commit in _linked_commits(corpus, links, key)
            for path in commit.files
        )
        if not touches_source:
            excluded.add(key)
    return excluded


def is_test_only(commit, config):
    return bool(commit.files) and all(config.is_test_path(path) for path in commit.files)


def stage_test_only_filter(corpus, links, config, pool=None):
    """S2: excluir issues cuyos commits solo modifican pruebas."""
    excluded = set()
    for key in _pool(corpus, pool):
        commits = _linked_commits(corpus, links, key)
        if commits and all(is_test_only(commit, config) for commit in commits):
            excluded.add(key)
    return excluded


def stage_label_include(corpus, config, pool=None):
    """S3a: incluir issues con etiqueta o prefijo de título de seguridad."""
    included = set()
    for key in _pool(corpus, pool):
        issue = corpus.issue(key)
        if config.has_include_label(issue.labels) or config.has_title_prefix(issue.title):
            included.add(key)
    return included


def stage_label_exclude(corpus, config, pool=None, included=()):
    """S3b: excluir issues con etiquetas ajenas a vulnerabilidades."""
    included = set(included)
    return {
        key for key in _pool(corpus, pool)
        if key not in included and config.has_exclude_label(corpus.issue(key).labels)
    }


def _keyword_signals(corpus, clusters, pool):
    matcher = KeywordMatcher(clusters)
    return {key: matcher.polarities(corpus.issue(key).text) for key in _pool(corpus, pool)}


def stage_keyword_include(corpus, clusters, pool=None):
    """S4a: incluir issues con alguna palabra de un grupo de vulnerabilidad."""
    signals = _keyword_signals(corpus, clusters, pool)
    return {key for key, found in signals.items() if Polarity.VULNERABILITY in found}


def stage_keyword_exclude(corpus, clusters, pool=None):
    """S4b: excluir issues con solo palabras de grupos ajenos a vulnerabilidades."""
    signals = _keyword_signals(corpus, clusters, pool)
    return {
        key for key, found in signals.items()
        if Polarity.NON_VULNERABILITY in found and Polarity.VULNERABILITY not in found
    }
