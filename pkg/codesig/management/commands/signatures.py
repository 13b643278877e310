from pipeline.commands import CommandResult, PipelineCommand

from codesig.signatures import generate_signatures
from corpus.loader import load_ingested
from vulnfilter.report import load_candidates

SIGNATURES_ARTIFACT = 'signatures.json'


def candidate_commits(corpus, links, candidates):
    """Commits enlazados a los candidatos, en el orden del corpus."""
    wanted = set()
    for key in candidates:
        for commit_id in links.commits_for(key):
            commit = corpus.commit(key[0], commit_id)
            if commit is not None:
                wanted.add(commit.key)
    return [commit for commit in corpus.commits if commit.key in wanted]


class Command(PipelineCommand):
    help = 'Genera fragmentos de código y firmas de cambio a partir de los hunks'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--candidates-only', action='store_true',
            help='Usar solo los commits de los issues seleccionados por filter',
        )

    def run(self, config, writer, jobs, **options):
        corpus, links = load_ingested(writer)
        if options['candidates_only']:
            commits = candidate_commits(corpus, links, load_candidates(writer))
        else:
            commits = list(corpus.commits)

        records = generate_signatures(commits, config.codesig, jobs=jobs)
        flagged = sum(record.signature.flagged for record in records)
        writer.write_json(SIGNATURES_ARTIFACT, {
            'candidates_only': options['candidates_only'],
            'fragments': [record.to_dict() for record in records],
        })

        counts = {'commits': len(commits), 'fragments': len(records), 'flagged': flagged}
        summary = f"signatures: {len(records)} fragmentos de {len(commits)} commits ({flagged} sin firma)"
        return CommandResult(summary=summary, counts=counts)
