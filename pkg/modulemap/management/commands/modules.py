from pipeline.commands import CommandResult, PipelineCommand

from corpus.loader import load_ingested
from modulemap.mapping import ArchitectureMap, aggregate_module_counts, project_module_summary
from vulnfilter.report import load_candidates


class Command(PipelineCommand):
    help = 'Cuenta las vulnerabilidades candidatas por módulo y capa de la arquitectura'

    def run(self, config, writer, jobs, **options):
        corpus, links = load_ingested(writer)
        candidates = load_candidates(writer)
        architecture = ArchitectureMap.load(config.path('architecture_map'))

        counts = aggregate_module_counts(candidates, links, corpus, architecture)
        payload = counts.to_dict(architecture)
        payload['projects'] = project_module_summary(candidates, links, corpus, architecture)
        writer.write_json('module_counts.json', payload)
        writer.write_csv('module_counts.csv', ['layer', 'module', 'issues'], counts.csv_rows(architecture))

        summary_counts = {
            'issues': counts.issue_count,
            'module_total': counts.module_total,
            'modules': len(counts.modules),
            'unmapped': len(counts.unmapped),
            'flagged_files': len(counts.flagged_files),
        }
        summary = (
            f"modules: {counts.issue_count} issues en {len(counts.modules)} módulos "
            f"(suma {counts.module_total}), {len(counts.flagged_files)} archivos para revisión manual"
        )
        return CommandResult(summary=summary, counts=summary_counts)
