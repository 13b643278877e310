"""Persistencia del corpus en la base de datos."""

import logging

from django.db import transaction

from .models import Commit, DiffHunk, Issue, IssueCommitLink
from .records import CommitRecord, Corpus, Hunk, HunkLine, IssueRecord, Link, LinkTable

logger = logging.getLogger(__name__)


@transaction.atomic
def persist_corpus(corpus, links):
    """Guardar el corpus y sus enlaces, reemplazando los proyectos existentes."""
    projects = corpus.projects
    Issue.objects.filter(project__in=projects).delete()
    Commit.objects.filter(project__in=projects).delete()

    Issue.objects.bulk_create([
        Issue(
            project=issue.project,
            number=issue.id,
            title=issue.title,
            body=issue.body,
            labels=list(issue.labels),
            event_commit_ids=list(issue.event_commit_ids),
            pr_commit_ids=list(issue.pr_commit_ids),
            is_pr=issue.is_pr,
        )
        for issue in corpus.issues
    ])
    Commit.objects.bulk_create([
        Commit(
            project=commit.project,
            sha=commit.id,
            title=commit.title,
            message=commit.message,
            files=list(commit.files),
            position=position,
        )
        for position, commit in enumerate(corpus.commits)
    ])
    commit_rows = {(row.project, row.sha): row for row in Commit.objects.filter(project__in=projects)}
    issue_rows = {(row.project, row.number): row for row in Issue.objects.filter(project__in=projects)}

    DiffHunk.objects.bulk_create([
        DiffHunk(
            commit=commit_rows[commit.key],
            position=position,
            file_path=hunk.file_path,
            header=hunk.header,
            lines=[[line.marker, line.text] for line in hunk.lines],
        )
        for commit in corpus.commits
        for position, hunk in enumerate(commit.hunks)
    ])
    IssueCommitLink.objects.bulk_create([
        IssueCommitLink(
            issue=issue_rows[link.issue_key],
            commit=commit_rows[(link.project, link.commit_id)],
            provenance=link.provenance,
            position=position,
        )
        for position, link in enumerate(links.links)
    ])
    logger.info("Corpus guardado en base de datos: %s", corpus.counts())


def corpus_from_database(projects=None):
    """Reconstruir (Corpus, LinkTable) desde la base de datos."""
    issue_qs = Issue.objects.all()
    commit_qs = Commit.objects.prefetch_related('hunks')
    link_qs = IssueCommitLink.objects.select_related('issue', 'commit')
    if projects:
        issue_qs = issue_qs.filter(project__in=projects)
        commit_qs = commit_qs.filter(project__in=projects)
        link_qs = link_qs.filter(issue__project__in=projects)

    issues = tuple(
        IssueRecord(
            project=row.project,
            id=row.number,
            title=row.title,
            body=row.body,
            labels=tuple(row.labels),
            event_commit_ids=tuple(row.event_commit_ids),
            pr_commit_ids=tuple(row.pr_commit_ids),
            is_pr=row.is_pr,
        )
        for row in issue_qs.order_by('pk')
    )
    commits = tuple(
        CommitRecord(
            project=row.project,
            id=row.sha,
            title=row.title,
            message=row.message,
            files=tuple(row.files),
            hunks=tuple(
                Hunk(
                    file_path=hunk.file_path,
                    header=hunk.header,
                    lines=tuple(HunkLine(marker, text) for marker, text in hunk.lines),
                )
                for hunk in row.hunks.all()
            ),
        )
        for row in commit_qs.order_by('pk')
    )
    links = tuple(
        Link(row.issue.project, row.issue.number, row.commit.sha, row.provenance)
        for row in link_qs.order_by('position')
    )
    linked = {link.issue_key for link in links}
    table = LinkTable(
        links=links,
        unlinked=tuple(issue.key for issue in issues if issue.key not in linked),
    )
    return Corpus(issues=issues, commits=commits), table
