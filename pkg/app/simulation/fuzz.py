"""
Fuzz döngüsü - tohumlar üzerinde simülasyon + tutarlılık kontrolü
"""

import logging
from typing import List

from app.analyzer import check_all
from app.config import settings
from app.history import derive_history, require_differentiated
from app.pattern_detection import validate_pattern
from app.schemas import PATTERN_ORDER, CaseResult, Criterion, FuzzReport, SimConfig
from app.simulation.simulator import run_sim

logger = logging.getLogger(__name__)


def run_case(config: SimConfig) -> CaseResult:
    """Tek tohum: simüle et, differentiated olduğunu doğrula, üç kriterle kontrol et"""
    history = derive_history(run_sim(config))
    require_differentiated(history)

    verdicts = check_all(history)
    kinds = set()
    evidence = {}
    for criterion, verdict in verdicts.items():
        evidence[criterion] = verdict.evidence
        kinds.update(pattern.kind for pattern in verdict.patterns)
        if verdict.evidence is not None and not validate_pattern(history, verdict.evidence):
            logger.error(
                f"seed={config.seed}: {verdict.evidence.describe()} tanığı yeniden doğrulanamadı"
            )

    return CaseResult(
        seed=config.seed,
        protocol=config.protocol,
        ops=len(history),
        verdicts={criterion: verdict.consistent for criterion, verdict in verdicts.items()},
        evidence=evidence,
        pattern_kinds=[kind for kind in PATTERN_ORDER if kind in kinds],
    )


def _run_local(configs: List[SimConfig]) -> List[CaseResult]:
    return [run_case(config) for config in configs]


def _run_celery(configs: List[SimConfig]) -> List[CaseResult]:
    from celery import group

    from app.tasks import fuzz_case

    job = group(fuzz_case.s(config.model_dump(mode="json")) for config in configs)
    group_result = job.apply_async()
    return [CaseResult.model_validate(child.get()) for child in group_result.results]


def fuzz(template: SimConfig, runs: int, first_seed: int = 1) -> FuzzReport:
    """
    Şablon konfigürasyonu ardışık tohumlarla çalıştır ve ihlalleri topla

    Args:
        template: Tohum dışındaki simülasyon parametreleri
        runs: Koşu sayısı (>= 1)
        first_seed: İlk tohum

    Returns:
        Tohum sırasında koşu sonuçları, kriter başına ihlal sayısı ve ilk tanıklar
    """
    if runs < 1:
        raise ValueError("runs en az 1 olmalı")

    configs = [
        template.model_copy(update={"seed": seed})
        for seed in range(first_seed, first_seed + runs)
    ]
    results = _run_celery(configs) if settings.FUZZ_USE_CELERY else _run_local(configs)
    results.sort(key=lambda result: result.seed)

    report = FuzzReport(
        protocol=template.protocol,
        runs=results,
        violations={criterion: 0 for criterion in Criterion},
    )
    for result in results:
        for criterion in Criterion:
            if result.verdicts[criterion]:
                continue
            report.violations[criterion] += 1
            witness = result.evidence.get(criterion)
            if witness is not None and criterion not in report.first_witnesses:
                report.first_witnesses[criterion] = witness

    logger.info(report.summary_line())
    return report
