"""Registros inmutables del corpus minado."""

from dataclasses import dataclass, field
from functools import cached_property

from django.db import models


class Provenance(models.TextChoices):
    EVENT = 'event', 'Evento del issue'
    PR_LIST = 'pr_list', 'Lista de commits del PR'
    MESSAGE_REF = 'message_ref', 'Referencia en el mensaje'


PROVENANCE_PRIORITY = [Provenance.EVENT, Provenance.PR_LIST, Provenance.MESSAGE_REF]

MARKER_KINDS = {'+': 'added', '-': 'deleted', ' ': 'context'}


def format_issue_key(key):
    project, number = key
    return f"{project}#{number}"


def parse_issue_key(label):
    project, _, number = label.rpartition('#')
    return project, int(number)


@dataclass(frozen=True)
class HunkLine:
    marker: str
    text: str

    @property
    def kind(self):
        return MARKER_KINDS[self.marker]

    @property
    def is_changed(self):
        return self.marker != ' '


@dataclass(frozen=True)
class Hunk:
    file_path: str
    header: str
    lines: tuple = ()

    @property
    def payload(self):
        """Contenido comparable del hunk (sin la cabecera de posiciones)."""
        return self.file_path, tuple((line.marker, line.text) for line in self.lines)

    @property
    def changed_lines(self):
        return [line for line in self.lines if line.is_changed]


@dataclass(frozen=True)
class IssueRecord:
    project: str
    id: int
    title: str
    body: str = ''
    labels: tuple = ()
    event_commit_ids: tuple = ()
    pr_commit_ids: tuple = ()
    is_pr: bool = False

    @property
    def key(self):
        return self.project, self.id

    @property
    def text(self):
        return f"{self.title}\n{self.body}"


@dataclass(frozen=True)
class CommitRecord:
    project: str
    id: str
    title: str
    message: str = ''
    files: tuple = ()
    hunks: tuple = ()

    @property
    def key(self):
        return self.project, self.id

    @property
    def text(self):
        return f"{self.title}\n{self.message}"

    @property
    def payload(self):
        return tuple(hunk.payload for hunk in self.hunks)

    @property
    def is_empty(self):
        return not self.hunks


@dataclass(frozen=True)
class Corpus:
    issues: tuple = ()
    commits: tuple = ()
    commit_aliases: dict = field(default_factory=dict, compare=False)

    @cached_property
    def issue_index(self):
        return {issue.key: issue for issue in self.issues}

    @cached_property
    def commit_index(self):
        return {commit.key: commit for commit in self.commits}

    @property
    def projects(self):
        return sorted({issue.project for issue in self.issues} | {commit.project for commit in self.commits})

    def issue(self, key):
        return self.issue_index.get(key)

    def commit(self, project, commit_id):
        """Buscar un commit resolviendo alias de duplicados eliminados."""
        commit_id = self.commit_aliases.get((project, commit_id), commit_id)
        return self.commit_index.get((project, commit_id))

    @property
    def empty_commits(self):
        return [commit.key for commit in self.commits if commit.is_empty]

    def counts(self):
        return {
            'issues': len(self.issues),
            'commits': len(self.commits),
            'hunk_bearing_commits': sum(1 for commit in self.commits if not commit.is_empty),
        }


@dataclass(frozen=True)
class Link:
    project: str
    issue_id: int
    commit_id: str
    provenance: str

    @property
    def issue_key(self):
        return self.project, self.issue_id


@dataclass(frozen=True)
class LinkTable:
    links: tuple = ()
    unlinked: tuple = ()
    warnings: tuple = ()

    @cached_property
    def _by_issue(self):
        grouped = {}
        for link in self.links:
            grouped.setdefault(link.issue_key, []).append(link.commit_id)
        return {key: tuple(ids) for key, ids in grouped.items()}

    def commits_for(self, issue_key):
        return self._by_issue.get(issue_key, ())

    def is_linked(self, issue_key):
        return issue_key in self._by_issue

    def provenance(self, issue_key, commit_id):
        for link in self.links:
            if link.issue_key == issue_key and link.commit_id == commit_id:
                return link.provenance
        return None

    def to_document(self):
        return {
            'links': [
                {
                    'project': link.project,
                    'issue': link.issue_id,
                    'commit': link.commit_id,
                    'provenance': link.provenance,
                }
                for link in self.links
            ],
            'unlinked': [format_issue_key(key) for key in self.unlinked],
            'warnings': list(self.warnings),
        }

    @classmethod
    def from_document(cls, document):
        links = tuple(
            Link(item['project'], item['issue'], item['commit'], item['provenance'])
            for item in document.get('links', [])
        )
        unlinked = tuple(parse_issue_key(label) for label in document.get('unlinked', []))
        return cls(links=links, unlinked=unlinked, warnings=tuple(document.get('warnings', [])))
