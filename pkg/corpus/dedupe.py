"""Commits duplicados, commits vacíos y estadísticas del corpus."""

import logging
from dataclasses import replace

logger = logging.getLogger(__name__)


def dedupe_commits(corpus):
    """Colapsar commits con el mismo contenido de hunks dentro de cada proyecto.

    Se conserva el id lexicográficamente menor; los commits sin hunks no se
    comparan entre sí y quedan señalados en ``corpus.empty_commits``.
    """
    groups = {}
    for commit in corpus.commits:
        if commit.is_empty:
            continue
        groups.setdefault((commit.project, commit.payload), []).append(commit.id)

    removed = []
    aliases = dict(corpus.commit_aliases)
    for (project, _), ids in groups.items():
        if len(ids) < 2:
            continue
        kept, *duplicates = sorted(ids)
        for duplicate in duplicates:
            removed.append((kept, duplicate))
            aliases[(project, duplicate)] = kept

    if not removed:
        return corpus, []

    dropped = set(aliases)
    commits = tuple(commit for commit in corpus.commits if commit.key not in dropped)
    removed.sort()
    for kept, duplicate in removed:
        logger.info("Commit duplicado %s colapsado en %s", duplicate, kept)
    empty = corpus.empty_commits
    if empty:
        logger.info("Commits vacíos: %d", len(empty))
    return replace(corpus, commits=commits, commit_aliases=aliases), removed


def invalid_issue_ids(corpus, links, issue_keys):
    """Issues cuyos commits enlazados están todos vacíos."""
    invalid = []
    for key in issue_keys:
        commits = [corpus.commit(key[0], commit_id) for commit_id in links.commits_for(key)]
        commits = [commit for commit in commits if commit is not None]
        if commits and all(commit.is_empty for commit in commits):
            invalid.append(key)
    return invalid


def corpus_statistics(corpus, links):
    """Metadatos del conjunto de datos por proyecto."""
    rows = []
    for project in corpus.projects:
        issues = [issue for issue in corpus.issues if issue.project == project]
        commits = [commit for commit in corpus.commits if commit.project == project]
        paths = {path for commit in commits for path in commit.files}
        linked = sum(1 for issue in issues if links.is_linked(issue.key))
        rows.append({
            'project': project,
            'issues': sum(1 for issue in issues if not issue.is_pr),
            'pull_requests': sum(1 for issue in issues if issue.is_pr),
            'commits': len(commits),
            'hunk_bearing_commits': sum(1 for commit in commits if not commit.is_empty),
            'empty_commits': sum(1 for commit in commits if commit.is_empty),
            'linked_issues': linked,
            'unlinked_issues': len(issues) - linked,
            'unique_file_paths': len(paths),
        })
    return rows
