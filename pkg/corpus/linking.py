"""Relación entre issues/PRs y los commits que los corrigen."""

import logging
import re

from .records import Link, LinkTable, Provenance

logger = logging.getLogger(__name__)

ISSUE_REF_RE = re.compile(r'(?<![0-9A-Za-z])#([0-9]{1,7})(?![0-9A-Za-z])')


def extract_issue_refs(message):
    """Extraer números de issue '#N' sin duplicados, en orden de aparición."""
    refs = (int(match.group(1)) for match in ISSUE_REF_RE.finditer(message or ''))
    return list(dict.fromkeys(refs))


def link_issues_to_commits(corpus):
    """Construir la tabla de enlaces por eventos, lista del PR y referencias."""
    links = {}
    warnings = []

    def add(issue_key, commit_id, provenance):
        project = issue_key[0]
        commit = corpus.commit(project, commit_id)
        if commit is None:
            message = (
                f"{project}#{issue_key[1]}: commit {commit_id} ({provenance}) "
                f"no existe en el corpus; enlace descartado"
            )
            logger.warning(message)
            warnings.append(message)
            return
        # El primer origen registrado tiene prioridad (evento > PR > mensaje)
        links.setdefault((issue_key, commit.id), provenance)

    for issue in corpus.issues:
        for commit_id in issue.event_commit_ids:
            add(issue.key, commit_id, Provenance.EVENT.value)
        for commit_id in issue.pr_commit_ids:
            add(issue.key, commit_id, Provenance.PR_LIST.value)

    for commit in corpus.commits:
        for number in extract_issue_refs(commit.text):
            issue_key = (commit.project, number)
            if corpus.issue(issue_key) is not None:
                add(issue_key, commit.id, Provenance.MESSAGE_REF.value)

    order = {issue.key: index for index, issue in enumerate(corpus.issues)}
    linked = {issue_key for issue_key, _ in links}
    ordered = sorted(links.items(), key=lambda item: order[item[0][0]])
    table = LinkTable(
        links=tuple(
            Link(issue_key[0], issue_key[1], commit_id, provenance)
            for (issue_key, commit_id), provenance in ordered
        ),
        unlinked=tuple(issue.key for issue in corpus.issues if issue.key not in linked),
        warnings=tuple(warnings),
    )
    logger.info(
        "Enlaces: %d (issues sin commits: %d, avisos: %d)",
        len(table.links), len(table.unlinked), len(table.warnings),
    )
    return table
