from pathlib import Path

from pipeline.commands import FINDINGS_EXIT_CODE, CommandResult, PipelineCommand
from pipeline.exceptions import ConfigError

from patscan.patterns import load_patterns
from patscan.scanner import Verdict, scan_repo, target_names


def _findings_table(report, patterns, targets):
    lines = ['pattern\ttarget\tpath\tfunction\tlines\tverdict\tscore']
    for finding in report.findings:
        start, end = finding.span
        lines.append(
            f"{finding.pattern_id}\t{finding.target}\t{finding.path}\t{finding.function}\t"
            f"{start}-{end}\t{finding.verdict}\t{finding.score:.3f}"
        )
    lines.append('')
    lines.append('pattern\t' + '\t'.join(targets))
    for pattern in patterns:
        cells = []
        for target in targets:
            verdicts = sorted({
                finding.verdict for finding in report.findings
                if finding.pattern_id == pattern.id and finding.target == target
            })
            cells.append(','.join(verdicts) or '-')
        lines.append(f"{pattern.id}\t" + '\t'.join(cells))
    return '\n'.join(lines) + '\n'


class Command(PipelineCommand):
    help = 'Busca clones vulnerables de los patrones en uno o varios repositorios objetivo'

    def add_command_arguments(self, parser):
        parser.add_argument(
            '--target', action='append', default=[],
            help='Raíz de un repositorio objetivo (se puede repetir)',
        )
        parser.add_argument('--patterns', help='Archivo JSON de patrones (por defecto paths.patterns)')

    def run(self, config, writer, jobs, **options):
        targets = [Path(target).resolve() for target in options['target']] or list(config.targets)
        if not targets:
            raise ConfigError("'scan' necesita --target o paths.targets en el archivo de configuración")
        for target in targets:
            if not target.is_dir():
                raise ConfigError(f"--target: no es un directorio {target}")

        patterns = load_patterns(options.get('patterns') or config.path('patterns'), config.match_threshold)
        report = scan_repo(targets, patterns, config.codesig, jobs=jobs)
        names = target_names(targets)

        counts = {
            'patterns': len(patterns),
            'targets': len(targets),
            'files': report.files_scanned,
            'functions': report.functions_scanned,
            'skipped': len(report.skipped),
            **{verdict.value.lower(): len(report.by_verdict(verdict)) for verdict in Verdict},
        }
        writer.write_json('scan_findings.json', {
            'counts': counts,
            'patterns': [pattern.id for pattern in patterns],
            'findings': [finding.to_dict() for finding in report.findings],
            'skipped': report.skipped,
        })
        writer.write_text('scan_findings.txt', _findings_table(report, patterns, names))

        summary = (
            f"scan: {counts['files']} archivos, {len(report.findings)} hallazgos, "
            f"{counts['vulnerable']} vulnerables, {counts['patched']} parcheados"
        )
        return CommandResult(
            summary=summary,
            counts=counts,
            exit_code=FINDINGS_EXIT_CODE if report.has_vulnerable else 0,
        )
