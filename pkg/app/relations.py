"""
Türetilmiş ilişkiler - RF, CO, CF ve HB_o

İlişkiler, operasyon kimliklerinin ardışık indekslenmesiyle n×n boolean
numpy matrisleri olarak tutulur. İndeks sırası (site, seq) sözlük sırasıdır,
bu yüzden "en küçük indeks önce" ile "en küçük kimlik önce" aynıdır.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from app.config import settings
from app.history import require_differentiated, writer_index
from app.models import History, OpId

logger = logging.getLogger(__name__)

IdPair = Tuple[OpId, OpId]


class Relation:
    """Kimlikler üzerinde ikili ilişki"""

    def __init__(self, ids: List[OpId], matrix: np.ndarray):
        self.ids = ids
        self.matrix = matrix
        self._index = {op_id: i for i, op_id in enumerate(ids)}

    @classmethod
    def from_pairs(cls, pairs: Iterable[IdPair]) -> "Relation":
        pairs = list(pairs)
        ids = sorted({a for a, _ in pairs} | {b for _, b in pairs})
        index = {op_id: i for i, op_id in enumerate(ids)}
        matrix = np.zeros((len(ids), len(ids)), dtype=bool)
        for a, b in pairs:
            matrix[index[a], index[b]] = True
        return cls(ids, matrix)

    def pairs(self) -> Set[IdPair]:
        rows, cols = np.nonzero(self.matrix)
        return {(self.ids[a], self.ids[b]) for a, b in zip(rows.tolist(), cols.tolist())}

    def __contains__(self, pair: IdPair) -> bool:
        a, b = pair
        if a not in self._index or b not in self._index:
            return False
        return bool(self.matrix[self._index[a], self._index[b]])

    def __len__(self) -> int:
        return int(self.matrix.sum())


@dataclass
class CausalOrder:
    """CO = (PO ∪ RF)+ ya da döngü tanığı"""

    generators: Relation
    relation: Optional[Relation] = None
    cycle: Optional[List[OpId]] = None

    @property
    def is_cyclic(self) -> bool:
        return self.cycle is not None


@dataclass
class HappenedBefore:
    """Bir gözlemci operasyon o için HB_o"""

    observer: OpId
    relation: Relation
    # PO ∪ RF (geçmişe kısıtlı) ve kural (iii) kenarları
    generators: Relation
    cycle: Optional[List[OpId]] = None

    @property
    def is_cyclic(self) -> bool:
        return self.cycle is not None


@dataclass
class RelationSet:
    n: int
    ids: List[OpId]
    po: Relation
    rf: Relation
    co: CausalOrder
    cf: Optional[Relation] = None
    hb: Dict[OpId, HappenedBefore] = field(default_factory=dict)


def transitive_closure(matrix: np.ndarray) -> np.ndarray:
    """Warshall kapanışı (vektörel)"""
    closed = matrix.copy()
    for k in range(closed.shape[0]):
        closed |= np.outer(closed[:, k], closed[k, :])
    return closed


def add_edge_closed(closed: np.ndarray, a: int, b: int) -> bool:
    """Kapalı bir ilişkiye a→b ekle ve kapalı tut; değişiklik olduysa True"""
    if closed[a, b]:
        return False
    sources = closed[:, a].copy()
    sources[a] = True
    targets = closed[b, :].copy()
    targets[b] = True
    closed |= np.outer(sources, targets)
    return True


def program_order(history: History) -> np.ndarray:
    n = len(history)
    matrix = np.zeros((n, n), dtype=bool)
    sites = np.array([op.site for op in history.ops], dtype=np.int64)
    # (site, seq) sırasında aynı sitedeki önceki tüm operasyonlar
    for i in range(n):
        matrix[i, i + 1 :] = sites[i + 1 :] == sites[i]
    return matrix


def compute_rf(history: History) -> Relation:
    """RF: aynı değişken ve aynı sıfırdan farklı değer ile yazma → okuma"""
    require_differentiated(history)
    index = history.index()
    writers = writer_index(history)
    ids = [op.id for op in history.ops]
    matrix = np.zeros((len(ids), len(ids)), dtype=bool)
    for op in history.ops:
        if op.is_read and op.value != 0:
            writer = writers.get((op.variable, op.value))
            if writer is not None:
                matrix[index[writer.id], index[op.id]] = True
    return Relation(ids, matrix)


def find_cycle(relation: Relation) -> Optional[List[OpId]]:
    """
    İlişkide bir döngü bul (en küçük kimlik önce DFS).

    Returns:
        Döngü üyeleri (kapanış kenarı sondan başa) ya da None
    """
    matrix = relation.matrix
    n = matrix.shape[0]
    adjacency = [np.flatnonzero(matrix[i]).tolist() for i in range(n)]
    color = [0] * n  # 0: görülmedi, 1: yığında, 2: bitti

    for start in range(n):
        if color[start]:
            continue
        color[start] = 1
        path = [start]
        stack = [iter(adjacency[start])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                stack.pop()
                continue
            if color[nxt] == 1:
                cycle = path[path.index(nxt) :]
                return [relation.ids[i] for i in cycle]
            if color[nxt] == 0:
                color[nxt] = 1
                path.append(nxt)
                stack.append(iter(adjacency[nxt]))
    return None


def compute_co(history: History, rf: Relation) -> CausalOrder:
    """CO = (PO ∪ RF)+; döngü varsa tanık döner"""
    ids = [op.id for op in history.ops]
    base = program_order(history) | rf.matrix
    generators = Relation(ids, base)
    closed = transitive_closure(base)
    if closed.diagonal().any():
        cycle = find_cycle(generators)
        logger.debug(f"CO döngüsel: {cycle}")
        return CausalOrder(generators=generators, cycle=cycle)
    return CausalOrder(generators=generators, relation=Relation(ids, closed))


def _variable_writes(history: History) -> Dict[str, np.ndarray]:
    masks: Dict[str, np.ndarray] = {}
    for i, op in enumerate(history.ops):
        if op.is_write:
            mask = masks.setdefault(op.variable, np.zeros(len(history), dtype=bool))
            mask[i] = True
    return masks


def _read_sources(history: History, rf: Relation) -> Dict[int, int]:
    """okuma indeksi -> yazan indeksi"""
    rows, cols = np.nonzero(rf.matrix)
    return {int(r): int(w) for w, r in zip(rows.tolist(), cols.tolist())}


def compute_cf(history: History, co: Relation) -> Relation:
    """CF: w1 <co r2, r2 w2'den okur, w1 ve w2 aynı değişkene farklı değer yazar"""
    rf = compute_rf(history)
    writes = _variable_writes(history)
    ids = [op.id for op in history.ops]
    matrix = np.zeros((len(ids), len(ids)), dtype=bool)
    for r2, w2 in _read_sources(history, rf).items():
        conflicting = co.matrix[:, r2] & writes[history.ops[r2].variable]
        conflicting[w2] = False
        matrix[conflicting, w2] = True
    return Relation(ids, matrix)


def compute_hb(history: History, co: Relation, o: OpId) -> HappenedBefore:
    """
    HB_o'yu üç kuralın en küçük sabit noktası olarak hesapla.

    Args:
        history: Differentiated history
        co: Döngüsüz CO
        o: Gözlemci operasyon

    Returns:
        HB_o; döngü varsa tanığı ile birlikte
    """
    index = history.index()
    if o not in index:
        raise KeyError(f"Operasyon history içinde yok: {o[0]}.{o[1]}")
    target = index[o]
    ids = [op.id for op in history.ops]

    past = co.matrix[:, target].copy()
    past[target] = True
    window = np.outer(past, past)

    rf = compute_rf(history)
    hb = co.matrix & window
    generators = (program_order(history) | rf.matrix) & window

    writes = _variable_writes(history)
    sources = _read_sources(history, rf)
    observer = history.ops[target]
    # o'nun sitesinde, PO'da o'ya kadar olan ve kaynağı olan okumalar
    reads = [
        i
        for i, op in enumerate(history.ops)
        if op.site == observer.site and op.seq <= observer.seq and i in sources
    ]

    rounds = 0
    while True:
        rounds += 1
        new_edges = set()
        for r2 in reads:
            w2 = sources[r2]
            candidates = hb[:, r2] & writes[history.ops[r2].variable]
            candidates[w2] = False
            for w1 in np.flatnonzero(candidates).tolist():
                if not hb[w1, w2]:
                    new_edges.add((w1, w2))
        if not new_edges:
            break
        for w1, w2 in sorted(new_edges):
            add_edge_closed(hb, w1, w2)
            generators[w1, w2] = True

    logger.debug(f"HB_{o[0]}.{o[1]} sabit noktası {rounds} turda bulundu")
    generator_relation = Relation(ids, generators)
    cycle = find_cycle(generator_relation) if hb.diagonal().any() else None
    return HappenedBefore(
        observer=o,
        relation=Relation(ids, hb),
        generators=generator_relation,
        cycle=cycle,
    )


def observers(history: History, per_operation: bool) -> List[OpId]:
    """HB hesaplanacak operasyonlar: her sitenin PO-maksimumu ya da hepsi"""
    if per_operation:
        return [op.id for op in history.ops]
    last: Dict[int, OpId] = {}
    for op in history.ops:
        last[op.site] = op.id
    return [last[site] for site in sorted(last)]


def compute_relations(history: History, per_operation: Optional[bool] = None) -> RelationSet:
    """Tüm ilişkileri tek geçişte hesapla"""
    if per_operation is None:
        per_operation = settings.HB_PER_OPERATION

    rf = compute_rf(history)
    co = compute_co(history, rf)
    ids = [op.id for op in history.ops]
    relations = RelationSet(
        n=len(history),
        ids=ids,
        po=Relation(ids, program_order(history)),
        rf=rf,
        co=co,
    )
    if co.is_cyclic:
        return relations

    relations.cf = compute_cf(history, co.relation)
    for o in observers(history, per_operation):
        relations.hb[o] = compute_hb(history, co.relation, o)
    return relations
