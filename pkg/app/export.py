"""
Export modülü - karar satırları, JSON karar raporu ve fuzz raporu
"""

import json
from typing import Dict, List

from app.models import format_op_id
from app.schemas import Criterion, FuzzReport, Verdict


def verdict_lines(verdicts: Dict[Criterion, Verdict]) -> List[str]:
    """Kriter başına bir satır, cc, cm, ccv sırasında"""
    return [verdicts[criterion].line() for criterion in Criterion if criterion in verdicts]


def export_verdicts_to_json(verdicts: Dict[Criterion, Verdict]) -> str:
    """
    Kararları tanıklarıyla birlikte JSON formatında export et

    Args:
        verdicts: Kriter -> karar

    Returns:
        Girintili, anahtar sıralı JSON metni
    """
    data = []
    for criterion in Criterion:
        verdict = verdicts.get(criterion)
        if verdict is None:
            continue
        entry = {
            "criterion": criterion.value,
            "consistent": verdict.consistent,
            "mode": verdict.mode.value,
            "patterns": [
                {
                    "kind": pattern.kind.value,
                    "witness": {item.role: format_op_id(item.op) for item in pattern.witness},
                }
                for pattern in verdict.patterns
            ],
            "not_evaluated": [kind.value for kind in verdict.not_evaluated],
        }
        if verdict.candidates_refuted is not None:
            entry["candidates_refuted"] = verdict.candidates_refuted
        if verdict.witness is not None:
            entry["causal_order"] = [
                [format_op_id(a), format_op_id(b)] for a, b in verdict.witness.co
            ]
            if verdict.witness.arb is not None:
                entry["arbitration"] = [format_op_id(op) for op in verdict.witness.arb]
        data.append(entry)
    return json.dumps({"verdicts": data}, indent=2, sort_keys=True) + "\n"


def fuzz_report_text(report: FuzzReport) -> str:
    """`<seed> <protocol> <cc> <cm> <ccv>` satırları ve özet satırı (1 = tutarlı)"""
    lines = [result.line() for result in report.runs]
    lines.append(report.summary_line())
    return "\n".join(lines) + "\n"


def write_fuzz_report(report: FuzzReport, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(fuzz_report_text(report))
