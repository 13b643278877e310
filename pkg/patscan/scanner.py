"""Escaneo de repositorios objetivo contra el catálogo de patrones."""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from django.db import models

from codesig.normalizer import LineNormalizer

from .exceptions import UnbalancedBracesError
from .extractor import SUPPORTED_LANGUAGES, extract_functions
from .matcher import TokenStream, match_signature

logger = logging.getLogger(__name__)


class Verdict(models.TextChoices):
    PATCHED = 'PATCHED', 'Parcheado'
    VULNERABLE = 'VULNERABLE', 'Vulnerable'
    ANCHOR_ONLY = 'ANCHOR_ONLY', 'Solo contexto'


@dataclass(frozen=True)
class ScanFinding:
    pattern_id: str
    target: str
    path: str
    function: str
    verdict: str
    span: tuple
    score: float
    anchor_score: float
    vulnerable_score: float
    patched_score: float
    position: int = field(default=0, compare=False)

    @property
    def line(self):
        return self.span[0]

    def to_dict(self):
        return {
            'pattern': self.pattern_id,
            'target': self.target,
            'path': self.path,
            'function': self.function,
            'verdict': self.verdict,
            'lines': list(self.span),
            'score': round(self.score, 6),
            'scores': {
                'anchor': round(self.anchor_score, 6),
                'vulnerable': round(self.vulnerable_score, 6),
                'patched': round(self.patched_score, 6),
            },
        }


@dataclass
class ScanReport:
    findings: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    files_scanned: int = 0
    functions_scanned: int = 0

    def by_verdict(self, verdict):
        return [finding for finding in self.findings if finding.verdict == verdict]

    @property
    def has_vulnerable(self):
        return any(finding.verdict == Verdict.VULNERABLE for finding in self.findings)


def classify(anchor, vulnerable, patched, threshold):
    """Veredicto de una función cuyo contexto ya coincide."""
    if patched.score >= threshold:
        return Verdict.PATCHED, patched
    if vulnerable.score >= threshold:
        return Verdict.VULNERABLE, vulnerable
    return Verdict.ANCHOR_ONLY, anchor


def evaluate_function(pattern, function, stream, relative_path, target):
    """Hallazgo del patrón en una función, o None si no pasa el filtro."""
    if not (pattern.matches_file(relative_path) or pattern.matches_function(function.name)):
        return None
    anchor = match_signature(stream, pattern.anchor_signature)
    if anchor.score < pattern.match_threshold:
        return None
    vulnerable = match_signature(stream, pattern.vulnerable_signature)
    patched = match_signature(stream, pattern.patched_signature)
    verdict, best = classify(anchor, vulnerable, patched, pattern.match_threshold)
    return ScanFinding(
        pattern_id=pattern.id,
        target=target,
        path=relative_path,
        function=function.name,
        verdict=verdict.value,
        span=best.span or function.span,
        score=best.score,
        anchor_score=anchor.score,
        vulnerable_score=vulnerable.score,
        patched_score=patched.score,
        position=pattern.position,
    )


def iter_source_files(root, config):
    """Archivos C/C++ y Go bajo root, en orden estable, sin directorios ocultos."""
    root = Path(root)
    for directory, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(name for name in dirnames if not name.startswith('.'))
        for filename in sorted(filenames):
            path = Path(directory) / filename
            language = config.language_for(path.name)
            if language is None or language.name not in SUPPORTED_LANGUAGES:
                continue
            yield path, path.relative_to(root).as_posix(), language


def scan_file(path, relative_path, language, patterns, target, config):
    """(hallazgos, funciones, motivo de omisión) de un archivo."""
    try:
        text = path.read_text(encoding='utf-8')
    except (OSError, UnicodeDecodeError) as exc:
        logger.warning("No se pudo leer %s: %s", path, exc)
        return [], 0, f"ilegible: {exc}"
    try:
        functions = extract_functions(text, language)
    except UnbalancedBracesError as exc:
        logger.warning("%s omitido: %s", relative_path, exc)
        return [], 0, str(exc)

    normalizer = LineNormalizer(language, config.keep_numeric_atoms)
    findings = []
    for function in functions:
        stream = TokenStream.from_body(function.body, normalizer)
        for pattern in patterns:
            finding = evaluate_function(pattern, function, stream, relative_path, target)
            if finding is not None:
                findings.append(finding)
    return findings, len(functions), None


def target_names(roots):
    """Nombres de los objetivos; los repetidos reciben un sufijo -2, -3..."""
    names = []
    for root in roots:
        name = Path(root).name or str(root)
        candidate, suffix = name, 2
        while candidate in names:
            candidate, suffix = f"{name}-{suffix}", suffix + 1
        names.append(candidate)
    return names


def scan_repo(roots, patterns, config, jobs=1):
    """Escanear uno o varios árboles; cada archivo se evalúa de forma independiente."""
    roots = [Path(root) for root in roots]
    work = [
        (path, relative_path, language, target)
        for root, target in zip(roots, target_names(roots))
        for path, relative_path, language in iter_source_files(root, config)
    ]

    def run(item):
        path, relative_path, language, target = item
        return scan_file(path, relative_path, language, patterns, target, config)

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as executor:
        results = list(executor.map(run, work))

    report = ScanReport()
    for (_, relative_path, _, target), (findings, functions, skipped) in zip(work, results):
        report.files_scanned += 1
        report.functions_scanned += functions
        report.findings.extend(findings)
        if skipped:
            report.skipped.append({'target': target, 'path': relative_path, 'reason': skipped})
    report.findings.sort(key=lambda finding: (finding.position, finding.target, finding.path, finding.line))
    logger.info(
        "%d archivos, %d funciones, %d hallazgos (%d vulnerables)",
        report.files_scanned, report.functions_scanned,
        len(report.findings), len(report.by_verdict(Verdict.VULNERABLE)),
    )
    return report
