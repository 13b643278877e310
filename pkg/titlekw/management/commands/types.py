from collections import Counter

from pipeline.commands import CommandResult, PipelineCommand

from corpus.loader import load_ingested
from corpus.records import format_issue_key
from titlekw.cleaning import clean_title
from titlekw.keywords import extract_type_keywords, select_targets
from titlekw.vocabulary import SeedWords, build_pos_vocabulary
from vulnfilter.report import load_candidates

TYPES_ARTIFACT = 'type_keywords.json'


class Command(PipelineCommand):
    help = 'Limpia los títulos y extrae las palabras clave del tipo de vulnerabilidad'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--candidates-only', action='store_true',
            help='Usar solo los issues seleccionados por filter (requiere filter_report.json)',
        )

    def run(self, config, writer, jobs, **options):
        corpus, _ = load_ingested(writer)
        if options['candidates_only']:
            issues = [corpus.issue(key) for key in load_candidates(writer)]
            issues = [issue for issue in issues if issue is not None]
        else:
            issues = list(corpus.issues)

        rules = config.title_rules()
        cleaned = [clean_title(issue.title, rules) for issue in issues]
        vocab = build_pos_vocabulary(cleaned, SeedWords.load(config.path('vocabulary')))

        rows = []
        for issue, title in zip(issues, cleaned):
            keywords = extract_type_keywords(title.tokens, select_targets(title.tokens, vocab))
            rows.append({
                'id': format_issue_key(issue.key),
                'project': issue.project,
                'title': issue.title,
                'cleaned': list(title.tokens),
                'removals': [[rule, text] for rule, text in title.removals],
                **keywords.to_dict(),
            })
        writer.write_json(TYPES_ARTIFACT, {'candidates_only': options['candidates_only'], 'titles': rows})
        writer.write_json('pos_vocabulary.json', vocab.to_dict())

        rules_fired = Counter(row['rule_fired'] for row in rows)
        counts = {
            'titles': len(rows),
            'with_keywords': sum(1 for row in rows if row['keywords']),
            **{f"rule_{rule}": count for rule, count in sorted(rules_fired.items())},
        }
        summary = f"types: {counts['titles']} títulos, {counts['with_keywords']} con palabras clave"
        return CommandResult(summary=summary, counts=counts)
