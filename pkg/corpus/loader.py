"""Carga y serialización de los documentos del corpus."""

import json
import logging
from pathlib import Path

from pipeline.validation import first_error

from .exceptions import LoadError
from .records import CommitRecord, Corpus, Hunk, HunkLine, IssueRecord, LinkTable
from .serializers import CommitSerializer, DocumentSerializer, IssueSerializer

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def validate_document(document, collection):
    if not isinstance(document, dict):
        raise LoadError('El documento debe ser un objeto JSON', collection)
    header = DocumentSerializer(data=document)
    if not header.is_valid():
        location, message = first_error(header.errors)
        raise LoadError(message, location)
    records = document.get(collection)
    if not isinstance(records, list):
        raise LoadError('Se esperaba una lista', collection)
    return records


def _validated(serializer_class, raw, collection, index):
    serializer = serializer_class(data=raw)
    if not serializer.is_valid():
        location, message = first_error(serializer.errors, f"{collection}[{index}]")
        raise LoadError(message, location)
    return serializer.validated_data


def _unique(ids):
    return tuple(dict.fromkeys(ids))


def build_issue(data):
    return IssueRecord(
        project=data['project'],
        id=data['id'],
        title=data['title'],
        body=data['body'],
        labels=tuple(data['labels']),
        event_commit_ids=_unique(commit_id.lower() for commit_id in data['event_commit_ids']),
        pr_commit_ids=_unique(commit_id.lower() for commit_id in data['pr_commit_ids']),
        is_pr=data['is_pr'],
    )


def build_commit(data):
    hunks = tuple(
        Hunk(
            file_path=hunk['file_path'],
            header=hunk['header'],
            lines=tuple(HunkLine(line['marker'], line['text']) for line in hunk['lines']),
        )
        for hunk in data['hunks']
    )
    return CommitRecord(
        project=data['project'],
        id=data['id'].lower(),
        title=data['title'],
        message=data['message'],
        files=tuple(data['files']),
        hunks=hunks,
    )


def load_documents(issues_document, commits_document):
    """Construir un Corpus a partir de los documentos ya parseados."""
    issues, commits = [], []
    seen = set()
    for index, raw in enumerate(validate_document(issues_document, 'issues')):
        issue = build_issue(_validated(IssueSerializer, raw, 'issues', index))
        if issue.key in seen:
            raise LoadError(f"Issue duplicado: {issue.project}#{issue.id}", f"issues[{index}].id")
        seen.add(issue.key)
        issues.append(issue)

    seen = set()
    for index, raw in enumerate(validate_document(commits_document, 'commits')):
        commit = build_commit(_validated(CommitSerializer, raw, 'commits', index))
        if commit.key in seen:
            raise LoadError(f"Commit duplicado: {commit.id}", f"commits[{index}].id")
        seen.add(commit.key)
        commits.append(commit)

    corpus = Corpus(issues=tuple(issues), commits=tuple(commits))
    logger.info("Corpus cargado: %s", corpus.counts())
    return corpus


def load_corpus(issues_path, commits_path):
    """Cargar el corpus desde los archivos de issues y commits."""
    issues_path, commits_path = Path(issues_path), Path(commits_path)
    try:
        issues_document = json.loads(issues_path.read_text(encoding='utf-8'))
        commits_document = json.loads(commits_path.read_text(encoding='utf-8'))
    except FileNotFoundError as exc:
        raise LoadError(f"No existe el archivo {exc.filename}") from exc
    except json.JSONDecodeError as exc:
        raise LoadError(f"JSON inválido: {exc}") from exc
    return load_documents(issues_document, commits_document)


def issue_to_dict(issue):
    return {
        'id': issue.id,
        'project': issue.project,
        'title': issue.title,
        'body': issue.body,
        'labels': list(issue.labels),
        'event_commit_ids': list(issue.event_commit_ids),
        'pr_commit_ids': list(issue.pr_commit_ids),
        'is_pr': issue.is_pr,
    }


def commit_to_dict(commit):
    return {
        'id': commit.id,
        'project': commit.project,
        'title': commit.title,
        'message': commit.message,
        'files': list(commit.files),
        'hunks': [
            {
                'file_path': hunk.file_path,
                'header': hunk.header,
                'lines': [{'marker': line.marker, 'text': line.text} for line in hunk.lines],
            }
            for hunk in commit.hunks
        ],
    }


def corpus_to_documents(corpus):
    """Serializar el corpus en el mismo formato que acepta load_documents."""
    issues_document = {
        'schema_version': SCHEMA_VERSION,
        'issues': [issue_to_dict(issue) for issue in corpus.issues],
    }
    commits_document = {
        'schema_version': SCHEMA_VERSION,
        'commits': [commit_to_dict(commit) for commit in corpus.commits],
    }
    return issues_document, commits_document


# ===== Artefactos de 'ingest' =====

ISSUES_ARTIFACT = 'corpus_issues.json'
COMMITS_ARTIFACT = 'corpus_commits.json'
LINKS_ARTIFACT = 'links.json'


def load_ingested(writer):
    """Corpus deduplicado y tabla de enlaces escritos por 'ingest'."""
    corpus = load_documents(
        writer.read_json(ISSUES_ARTIFACT, 'ingest'),
        writer.read_json(COMMITS_ARTIFACT, 'ingest'),
    )
    links = LinkTable.from_document(writer.read_json(LINKS_ARTIFACT, 'ingest'))
    return corpus, links
