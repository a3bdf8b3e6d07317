"""
Kötü desen tespiti - yedi kötü desen ve bağımsız yeniden doğrulama
"""

import logging
from typing import List, Optional

import numpy as np

from app.history import require_differentiated, writer_index
from app.models import History, OpId
from app.relations import (
    HappenedBefore,
    Relation,
    RelationSet,
    compute_cf,
    compute_co,
    compute_hb,
    compute_relations,
    compute_rf,
    find_cycle,
    program_order,
)
from app.schemas import CO_DEPENDENT, BadPattern, PatternKind, PatternReport

logger = logging.getLogger(__name__)


def detect_patterns(
    history: History, relations: Optional[RelationSet] = None
) -> PatternReport:
    """
    History'deki tüm kötü desen türlerini tespit et

    Args:
        history: Differentiated history
        relations: Önceden hesaplanmış ilişkiler (yoksa hesaplanır)

    Returns:
        Tablo sırasında bulunan desenler (her tür için bir tanık) ve
        değerlendirilemeyen türler
    """
    require_differentiated(history)
    if relations is None:
        relations = compute_relations(history)

    report = PatternReport()
    if relations.co.is_cyclic:
        report.found.append(_cycle_pattern(PatternKind.CYCLIC_CO, relations.co.cycle))
        thin_air = find_thin_air_read(history)
        if thin_air:
            report.found.append(thin_air)
        report.not_evaluated = list(CO_DEPENDENT)
        return report

    detectors = [
        find_write_co_init_read(history, relations),
        find_thin_air_read(history),
        find_write_co_read(history, relations),
        find_write_hb_init_read(history, relations),
        find_cyclic_hb(relations),
        find_cyclic_cf(relations),
    ]
    report.found = [pattern for pattern in detectors if pattern is not None]
    logger.debug(f"Bulunan desenler: {[p.kind.value for p in report.found]}")
    return report


def _cycle_pattern(kind: PatternKind, cycle: List[OpId], observer: Optional[OpId] = None) -> BadPattern:
    entries = []
    if observer is not None:
        entries.append(("o", observer))
    entries.extend((f"c{i}", op_id) for i, op_id in enumerate(cycle))
    return BadPattern.build(kind, *entries)


def find_thin_air_read(history: History) -> Optional[BadPattern]:
    """rd(x) ▷ v, v ≠ 0 ve v'yi yazan hiçbir operasyon yok"""
    writers = writer_index(history)
    for op in history.ops:
        if op.is_read and op.value != 0 and (op.variable, op.value) not in writers:
            return BadPattern.build(PatternKind.THIN_AIR_READ, ("r", op.id))
    return None


def find_write_co_init_read(history: History, relations: RelationSet) -> Optional[BadPattern]:
    """rd(x) ▷ 0 okuması r ve x'e yazan w ile w <CO r"""
    co = relations.co.relation.matrix
    for r, op in enumerate(history.ops):
        if not (op.is_read and op.value == 0):
            continue
        for w in np.flatnonzero(co[:, r]).tolist():
            writer = history.ops[w]
            if writer.is_write and writer.variable == op.variable:
                return BadPattern.build(
                    PatternKind.WRITE_CO_INIT_READ, ("w", writer.id), ("r", op.id)
                )
    return None


def find_write_co_read(history: History, relations: RelationSet) -> Optional[BadPattern]:
    """w1 <CO w2 <CO r1, w1 →RF r1, hepsi aynı değişken üzerinde"""
    co = relations.co.relation.matrix
    rf = relations.rf.matrix
    for r1, op in enumerate(history.ops):
        if not op.is_read:
            continue
        sources = np.flatnonzero(rf[:, r1]).tolist()
        if not sources:
            continue
        w1 = sources[0]
        between = co[w1, :] & co[:, r1]
        for w2 in np.flatnonzero(between).tolist():
            candidate = history.ops[w2]
            if candidate.is_write and candidate.variable == op.variable:
                return BadPattern.build(
                    PatternKind.WRITE_CO_READ,
                    ("w1", history.ops[w1].id),
                    ("w2", candidate.id),
                    ("r1", op.id),
                )
    return None


def _observer_reads(history: History, observer: OpId) -> List[int]:
    site, seq = observer
    return [
        i for i, op in enumerate(history.ops) if op.site == site and op.seq <= seq and op.is_read
    ]


def find_write_hb_init_read(history: History, relations: RelationSet) -> Optional[BadPattern]:
    """r = rd(x) ▷ 0, r ≤po o, x'e yazan w ile w <HB_o r"""
    for observer in sorted(relations.hb):
        hb = relations.hb[observer].relation.matrix
        for r in _observer_reads(history, observer):
            op = history.ops[r]
            if op.value != 0:
                continue
            for w in np.flatnonzero(hb[:, r]).tolist():
                writer = history.ops[w]
                if writer.is_write and writer.variable == op.variable:
                    return BadPattern.build(
                        PatternKind.WRITE_HB_INIT_READ,
                        ("o", observer),
                        ("w", writer.id),
                        ("r", op.id),
                    )
    return None


def find_cyclic_hb(relations: RelationSet) -> Optional[BadPattern]:
    for observer in sorted(relations.hb):
        hb = relations.hb[observer]
        if hb.is_cyclic:
            return _cycle_pattern(PatternKind.CYCLIC_HB, hb.cycle, observer)
    return None


def find_cyclic_cf(relations: RelationSet) -> Optional[BadPattern]:
    """CF ∪ CO içinde döngü (CO yerine üreteci PO ∪ RF kullanılır)"""
    combined = relations.cf.matrix | relations.co.generators.matrix
    cycle = find_cycle(Relation(relations.ids, combined))
    if cycle is None:
        return None
    return _cycle_pattern(PatternKind.CYCLIC_CF, cycle)


def _closes_cycle(pairs_matrix: np.ndarray, index, cycle: List[OpId]) -> bool:
    if not cycle:
        return False
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if a not in index or b not in index or not pairs_matrix[index[a], index[b]]:
            return False
    return True


def validate_pattern(history: History, pattern: BadPattern) -> bool:
    """
    Tanığı, yeniden hesaplanan ilişkilerle desen tanımına karşı bağımsız olarak doğrula
    """
    index = history.index()
    if any(op_id not in index for op_id in pattern.ops()):
        return False
    op = {op_id: history.ops[i] for op_id, i in index.items()}
    kind = pattern.kind

    rf = compute_rf(history)
    if kind is PatternKind.THIN_AIR_READ:
        r = op[pattern.role("r")]
        return r.is_read and r.value != 0 and not rf.matrix[:, index[r.id]].any()

    co = compute_co(history, rf)
    if kind is PatternKind.CYCLIC_CO:
        base = program_order(history) | rf.matrix
        return _closes_cycle(base, index, pattern.cycle())
    if co.is_cyclic:
        return False
    closed = co.relation.matrix

    if kind is PatternKind.WRITE_CO_INIT_READ:
        w, r = op[pattern.role("w")], op[pattern.role("r")]
        return (
            w.is_write
            and r.is_read
            and r.value == 0
            and w.variable == r.variable
            and bool(closed[index[w.id], index[r.id]])
        )

    if kind is PatternKind.WRITE_CO_READ:
        w1, w2, r1 = (op[pattern.role(name)] for name in ("w1", "w2", "r1"))
        return (
            w1.is_write
            and w2.is_write
            and r1.is_read
            and w1.variable == w2.variable == r1.variable
            and bool(rf.matrix[index[w1.id], index[r1.id]])
            and bool(closed[index[w1.id], index[w2.id]])
            and bool(closed[index[w2.id], index[r1.id]])
        )

    if kind is PatternKind.CYCLIC_CF:
        cf = compute_cf(history, co.relation)
        return _closes_cycle(cf.matrix | closed, index, pattern.cycle())

    observer = pattern.role("o")
    hb: HappenedBefore = compute_hb(history, co.relation, observer)
    if kind is PatternKind.CYCLIC_HB:
        return _closes_cycle(hb.relation.matrix, index, pattern.cycle())

    if kind is PatternKind.WRITE_HB_INIT_READ:
        w, r = op[pattern.role("w")], op[pattern.role("r")]
        return (
            w.is_write
            and r.is_read
            and r.value == 0
            and w.variable == r.variable
            and r.site == observer[0]
            and r.seq <= observer[1]
            and bool(hb.relation.matrix[index[w.id], index[r.id]])
        )
    return False
