from pathlib import Path

from pipeline.commands import CommandResult, PipelineCommand

from corpus.dedupe import corpus_statistics, dedupe_commits
from corpus.linking import link_issues_to_commits
from corpus.loader import (
    COMMITS_ARTIFACT,
    ISSUES_ARTIFACT,
    LINKS_ARTIFACT,
    corpus_to_documents,
    load_corpus,
)
from corpus.records import format_issue_key

STATS_HEADER = [
    'project', 'issues', 'pull_requests', 'commits', 'hunk_bearing_commits',
    'empty_commits', 'linked_issues', 'unlinked_issues', 'unique_file_paths',
]


class Command(PipelineCommand):
    help = 'Carga el corpus de issues y commits, elimina duplicados y construye los enlaces'

    def add_command_arguments(self, parser):
        parser.add_argument('--issues', help='Archivo JSON de issues (por defecto paths.issues)')
        parser.add_argument('--commits', help='Archivo JSON de commits (por defecto paths.commits)')

    def run(self, config, writer, jobs, **options):
        issues_path = Path(options['issues']) if options.get('issues') else config.require('issues', 'ingest')
        commits_path = Path(options['commits']) if options.get('commits') else config.require('commits', 'ingest')

        loaded = load_corpus(issues_path, commits_path)
        corpus, removed = dedupe_commits(loaded)
        links = link_issues_to_commits(corpus)

        issues_document, commits_document = corpus_to_documents(corpus)
        writer.write_json(ISSUES_ARTIFACT, issues_document)
        writer.write_json(COMMITS_ARTIFACT, commits_document)
        writer.write_json(LINKS_ARTIFACT, links.to_document())

        counts = {
            **loaded.counts(),
            'duplicates_removed': len(removed),
            'empty_commits': len(corpus.empty_commits),
            'links': len(links.links),
            'unlinked_issues': len(links.unlinked),
            'warnings': len(links.warnings),
        }
        writer.write_json('ingest_report.json', {
            'counts': counts,
            'duplicates': [{'kept': kept, 'removed': duplicate} for kept, duplicate in removed],
            'empty_commits': [f"{project}@{commit_id}" for project, commit_id in corpus.empty_commits],
            'unlinked': [format_issue_key(key) for key in links.unlinked],
            'warnings': list(links.warnings),
        })
        rows = corpus_statistics(corpus, links)
        writer.write_csv('corpus_stats.csv', STATS_HEADER, [[row[name] for name in STATS_HEADER] for row in rows])

        if options['persist']:
            from corpus.store import persist_corpus

            persist_corpus(corpus, links)

        summary = (
            f"ingest: {counts['issues']} issues, {counts['commits']} commits, "
            f"{counts['duplicates_removed']} duplicados, {counts['links']} enlaces"
        )
        return CommandResult(summary=summary, counts=counts)
