import logging
import time
from enum import Enum
from typing import Dict, Optional, Union

from app import monitoring
from app.history import NotDifferentiatedError, is_differentiated
from app.models import History
from app.oracle.search import OracleChecker
from app.pattern_detection import detect_patterns
from app.relations import RelationSet, compute_relations
from app.schemas import (
    CRITERION_PATTERNS,
    Criterion,
    PatternReport,
    Verdict,
    VerdictMode,
)

logger = logging.getLogger(__name__)


class CheckMode(str, Enum):
    AUTO = "auto"
    FAST = "fast"
    ORACLE = "oracle"


class ConsistencyAnalyzer:
    """History'leri CC, CM ve CCv kriterlerine göre değerlendiren sınıf"""

    def __init__(self, oracle_max_ops: Optional[int] = None):
        self.oracle = OracleChecker(max_ops=oracle_max_ops)

    def check(
        self,
        history: History,
        criterion: Criterion,
        mode: Union[CheckMode, str] = CheckMode.AUTO,
        relations: Optional[RelationSet] = None,
    ) -> Verdict:
        """Tek bir kriter için karar üret"""
        return self.check_many(history, [criterion], mode, relations)[criterion]

    def check_all(
        self, history: History, mode: Union[CheckMode, str] = CheckMode.AUTO
    ) -> Dict[Criterion, Verdict]:
        """Üç kriter; ilişkiler bir kez hesaplanır"""
        return self.check_many(history, list(Criterion), mode)

    def check_many(
        self,
        history: History,
        criteria,
        mode: Union[CheckMode, str] = CheckMode.AUTO,
        relations: Optional[RelationSet] = None,
    ) -> Dict[Criterion, Verdict]:
        mode = CheckMode(mode)
        differentiated = is_differentiated(history)
        if mode is CheckMode.FAST and not differentiated:
            raise NotDifferentiatedError(
                "Hızlı yol sadece differentiated history'ler için; --mode oracle kullanın"
            )

        report: Optional[PatternReport] = None
        if differentiated:
            if relations is None:
                relations = compute_relations(history)
            report = detect_patterns(history, relations)

        verdicts: Dict[Criterion, Verdict] = {}
        for criterion in criteria:
            started = time.perf_counter()
            if mode is CheckMode.ORACLE or not differentiated:
                verdict = self._oracle_verdict(history, criterion, report)
            else:
                verdict = self._fast_verdict(criterion, report)
            monitoring.check_duration.labels(criterion=criterion.value).observe(
                time.perf_counter() - started
            )
            if not verdict.consistent:
                pattern = verdict.evidence.kind.value if verdict.evidence else "exhaustive"
                monitoring.violations_detected_total.labels(
                    criterion=criterion.value, pattern=pattern
                ).inc()
            verdicts[criterion] = verdict

        monitoring.histories_checked_total.labels(
            mode=VerdictMode.ORACLE.value if mode is CheckMode.ORACLE or not differentiated else VerdictMode.FAST_PATH.value
        ).inc()
        return verdicts

    def _fast_verdict(self, criterion: Criterion, report: PatternReport) -> Verdict:
        relevant = CRITERION_PATTERNS[criterion]
        found = [pattern for pattern in report.found if pattern.kind in relevant]
        return Verdict(
            criterion=criterion,
            consistent=not found,
            mode=VerdictMode.FAST_PATH,
            evidence=found[0] if found else None,
            patterns=found,
            not_evaluated=[kind for kind in report.not_evaluated if kind in relevant],
        )

    def _oracle_verdict(
        self, history: History, criterion: Criterion, report: Optional[PatternReport]
    ) -> Verdict:
        verdict = self.oracle.check(history, criterion)
        if verdict.consistent or report is None:
            return verdict

        # Differentiated girdilerde hızlı yolun deseni kanıt olarak eklenir
        fast = self._fast_verdict(criterion, report)
        if fast.consistent:
            logger.warning(
                f"Oracle {criterion.value} ihlali buldu fakat kötü desen bulunamadı"
            )
            return verdict
        return verdict.model_copy(
            update={"evidence": fast.evidence, "patterns": fast.patterns}
        )


def check_cc(history: History, mode: Union[CheckMode, str] = CheckMode.AUTO) -> Verdict:
    return ConsistencyAnalyzer().check(history, Criterion.CC, mode)


def check_cm(history: History, mode: Union[CheckMode, str] = CheckMode.AUTO) -> Verdict:
    return ConsistencyAnalyzer().check(history, Criterion.CM, mode)


def check_ccv(history: History, mode: Union[CheckMode, str] = CheckMode.AUTO) -> Verdict:
    return ConsistencyAnalyzer().check(history, Criterion.CCV, mode)


def check_all(
    history: History, mode: Union[CheckMode, str] = CheckMode.AUTO
) -> Dict[Criterion, Verdict]:
    return ConsistencyAnalyzer().check_all(history, mode)
