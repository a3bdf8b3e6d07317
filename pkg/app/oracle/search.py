"""
Aksiyom düzeyinde kaba kuvvet tutarlılık kontrolü (oracle)

Aday nedensellik sıraları co = (PO ∪ E)+ biçiminde sayılır; E, okumalara
aday yazma kaynaklarından gelen kenarlardır. Her co için kritere göre
operasyon başına diziler geri izlemeli topolojik sıralama ile aranır.
Küme işlemleri Python tamsayı bit maskeleri ile yapılır.
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

from app.config import settings
from app.models import History, OpId, Operation
from app.oracle.spec import (
    LabeledPoset,
    SpecSequence,
    hide_return_values,
    poset_refines,
    spec_member,
)
from app.schemas import Criterion, Verdict, VerdictMode, WitnessOrders

logger = logging.getLogger(__name__)


class OracleCapExceeded(ValueError):
    """History oracle için fazla büyük"""


def _bits(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class OracleChecker:
    """Bir history üzerinde tanımsal CC/CM/CCv kontrolü"""

    def __init__(self, max_ops: Optional[int] = None):
        self.max_ops = settings.ORACLE_MAX_OPS if max_ops is None else max_ops

    def check(self, history: History, criterion: Criterion) -> Verdict:
        """
        Args:
            history: Herhangi bir history (differentiated olması gerekmez)
            criterion: CC, CM ya da CCv

        Returns:
            Tutarlıysa tanık sıralarıyla, değilse çürütülen aday sayısıyla Verdict

        Raises:
            OracleCapExceeded: Operasyon sayısı sınırı aşarsa
        """
        if len(history) > self.max_ops:
            raise OracleCapExceeded(
                f"Oracle en fazla {self.max_ops} operasyon kabul eder, history {len(history)} operasyon içeriyor"
            )
        search = _Search(history, criterion)
        witness = search.run()
        logger.debug(
            f"Oracle {criterion.value}: {search.explored} aday co denendi, "
            f"{'tutarlı' if witness else 'tutarsız'}"
        )
        if witness is not None:
            return Verdict(
                criterion=criterion,
                consistent=True,
                mode=VerdictMode.ORACLE,
                witness=witness,
            )
        return Verdict(
            criterion=criterion,
            consistent=False,
            mode=VerdictMode.ORACLE,
            candidates_refuted=search.explored,
        )


class _Search:
    def __init__(self, history: History, criterion: Criterion):
        self.history = history
        self.criterion = criterion
        self.ops: List[Operation] = list(history.ops)
        self.n = len(self.ops)
        self.explored = 0

        variables = sorted({op.variable for op in self.ops})
        self.var_index = {name: i for i, name in enumerate(variables)}

        # Katı PO öncülleri ve ardılları (bit maskesi)
        self.po_succ = [0] * self.n
        self.po_pred = [0] * self.n
        for i, a in enumerate(self.ops):
            for j in range(i + 1, self.n):
                if self.ops[j].site == a.site:
                    self.po_succ[i] |= 1 << j
                    self.po_pred[j] |= 1 << i

        self.var_writes = [0] * len(variables)
        for i, op in enumerate(self.ops):
            if op.is_write:
                self.var_writes[self.var_index[op.variable]] |= 1 << i

    # ----- aday üretimi -----

    def _suppliers(self, r: int) -> List[Optional[int]]:
        """Okuma r için değeri sağlayabilecek yazmalar (None: başlangıç değeri)"""
        read = self.ops[r]
        options: List[Optional[int]] = [
            w
            for w, op in enumerate(self.ops)
            if op.is_write and op.variable == read.variable and op.value == read.value
        ]
        if read.value == 0:
            options.insert(0, None)
        return options

    def _slots(self) -> List[Tuple[int, int]]:
        """(okuma, hedef) çiftleri; CM'de hedef r ≤po o olan her o"""
        slots = []
        for r, op in enumerate(self.ops):
            if not op.is_read:
                continue
            if self.criterion is Criterion.CM:
                targets = [r] + _bits(self.po_succ[r])
            else:
                targets = [r]
            slots.extend((r, t) for t in targets)
        return slots

    def _closure(self, extra: Sequence[Tuple[int, int]]) -> Optional[Tuple[int, ...]]:
        after = list(self.po_succ)
        for w, t in extra:
            after[w] |= 1 << t
        for k in range(self.n):
            bit = 1 << k
            row = after[k]
            for i in range(self.n):
                if after[i] & bit:
                    after[i] |= row
        if any(after[i] >> i & 1 for i in range(self.n)):
            return None
        return tuple(after)

    def run(self) -> Optional[WitnessOrders]:
        slots = self._slots()
        options = [self._suppliers(r) for r, _ in slots]
        seen: Set[Tuple[int, ...]] = set()
        for choice in itertools.product(*options):
            extra = [(w, t) for (_, t), w in zip(slots, choice) if w is not None]
            after = self._closure(extra)
            if after is None or after in seen:
                continue
            seen.add(after)
            self.explored += 1
            witness = self._check_candidate(after)
            if witness is not None:
                return witness
        return None

    # ----- aday co üzerinde kontrol -----

    def _check_candidate(self, after: Tuple[int, ...]) -> Optional[WitnessOrders]:
        before = [0] * self.n
        for i in range(self.n):
            for j in _bits(after[i]):
                before[j] |= 1 << i
        self.after, self.before = after, before

        sequences: Dict[int, List[int]] = {}
        arb: Optional[List[int]] = None
        if self.criterion is Criterion.CCV:
            arb = self._arbitration()
            if arb is None:
                return None
            for o in range(self.n):
                past = self._past(o)
                sequences[o] = [i for i in arb if past >> i & 1]
        else:
            for o in range(self.n):
                if self.criterion is Criterion.CC:
                    found = self._cc_sequence(o)
                else:
                    found = self._cm_sequence(o)
                if found is None:
                    return None
                sequences[o] = found
        return self._witness(after, arb, sequences)

    def _past(self, o: int) -> int:
        return self.before[o] | (1 << o)

    def _topological(self, members: int) -> List[int]:
        """members kümesinin en küçük indeks önce doğrusal genişlemesi"""
        order = []
        remaining = members
        while remaining:
            for i in _bits(remaining):
                if not self.before[i] & remaining:
                    order.append(i)
                    remaining &= ~(1 << i)
                    break
        return order

    def _cc_sequence(self, o: int) -> Optional[List[int]]:
        """o'nun nedensel geçmişini, sadece o'nun dönüş değerini koruyarak sırala"""
        op = self.ops[o]
        past = self._past(o)
        rest = past & ~(1 << o)
        if op.is_write:
            return self._topological(rest) + [o]

        x_writes = rest & self.var_writes[self.var_index[op.variable]]
        if op.value == 0 and not x_writes:
            return self._topological(rest) + [o]
        for w in _bits(x_writes):
            if self.ops[w].value != op.value or self.after[w] & x_writes:
                continue
            # w'den sonra gelmeyenler önce, w, ardından w'nin ardılları
            head = rest & ~self.after[w] & ~(1 << w)
            tail = rest & self.after[w]
            return self._topological(head) + [w] + self._topological(tail) + [o]
        return None

    def _cm_sequence(self, o: int) -> Optional[List[int]]:
        """Nedensel geçmiş; o'nun sitesindeki önceki okumaların dönüşleri de korunur"""
        target = self._past(o)
        observer = self.ops[o]
        keep = {
            i
            for i in _bits(target)
            if self.ops[i].site == observer.site and self.ops[i].seq <= observer.seq
        }
        members = _bits(target)
        failed: Set[Tuple[int, Tuple[int, ...]]] = set()
        order: List[int] = []

        def extend(placed: int, memory: Tuple[int, ...]) -> bool:
            if placed == target:
                return True
            if (placed, memory) in failed:
                return False
            for i in members:
                if placed >> i & 1 or self.before[i] & target & ~placed:
                    continue
                op = self.ops[i]
                slot = self.var_index[op.variable]
                if op.is_write:
                    next_memory = memory[:slot] + (op.value,) + memory[slot + 1 :]
                else:
                    if i in keep and memory[slot] != op.value:
                        continue
                    next_memory = memory
                order.append(i)
                if extend(placed | (1 << i), next_memory):
                    return True
                order.pop()
            failed.add((placed, memory))
            return False

        if extend(0, (0,) * len(self.var_index)):
            return order
        return None

    def _arbitration(self) -> Optional[List[int]]:
        """co'yu içeren ve her okumayı açıklayan toplam sıra (arb)"""
        full = (1 << self.n) - 1
        failed: Set[Tuple[int, Tuple[Tuple[int, ...], ...]]] = set()
        order: List[int] = []
        nvars = len(self.var_index)

        def extend(placed: int, writes: Tuple[Tuple[int, ...], ...]) -> bool:
            if placed == full:
                return True
            if (placed, writes) in failed:
                return False
            for i in range(self.n):
                if placed >> i & 1 or self.before[i] & ~placed:
                    continue
                op = self.ops[i]
                slot = self.var_index[op.variable]
                next_writes = writes
                if op.is_write:
                    next_writes = writes[:slot] + (writes[slot] + (i,),) + writes[slot + 1 :]
                else:
                    # arb'de, r'nin nedensel geçmişindeki son x yazması
                    seen = 0
                    for w in reversed(writes[slot]):
                        if self.before[i] >> w & 1:
                            seen = self.ops[w].value
                            break
                    if seen != op.value:
                        continue
                order.append(i)
                if extend(placed | (1 << i), next_writes):
                    return True
                order.pop()
            failed.add((placed, writes))
            return False

        if extend(0, tuple(() for _ in range(nvars))):
            return order
        return None

    # ----- tanık -----

    def _witness(
        self,
        after: Tuple[int, ...],
        arb: Optional[List[int]],
        sequences: Dict[int, List[int]],
    ) -> WitnessOrders:
        ids = [op.id for op in self.ops]
        co_pairs = sorted((ids[i], ids[j]) for i in range(self.n) for j in _bits(after[i]))
        per_op: Dict[OpId, SpecSequence] = {}
        for o, sequence in sequences.items():
            per_op[ids[o]] = _replay([self.ops[i] for i in sequence])
        return WitnessOrders(
            co=co_pairs,
            arb=[ids[i] for i in arb] if arb is not None else None,
            per_op_seq=per_op,
        )


def _replay(ops: List[Operation]) -> SpecSequence:
    """Diziyi okuma-yazma belleği üzerinde oynat; okumalara dizinin verdiği dönüş değerini yaz"""
    memory: Dict[str, int] = {}
    values: Dict[OpId, Optional[int]] = {}
    for op in ops:
        if op.is_write:
            memory[op.variable] = op.value
        else:
            values[op.id] = memory.get(op.variable, 0)
    return SpecSequence.of_ops(ops, values)


def oracle_check(
    history: History, criterion: Criterion, max_ops: Optional[int] = None
) -> Verdict:
    """Tanımsal kontrol için kısa yol"""
    return OracleChecker(max_ops=max_ops).check(history, criterion)


def validate_witness(history: History, criterion: Criterion, witness: WitnessOrders) -> bool:
    """
    Tanık sıraların kriterin tüm aksiyomlarını sağladığını doğrudan yeniden kontrol et
    """
    ops = {op.id: op for op in history.ops}
    co = set(witness.co)

    # co: katı kısmi sıra ve PO ⊆ co
    if any(a == b or a not in ops or b not in ops for a, b in co):
        return False
    for a, b in co:
        for c, d in co:
            if b == c and (a, d) not in co:
                return False
    for a in history.ops:
        for b in history.ops:
            if a.site == b.site and a.seq < b.seq and (a.id, b.id) not in co:
                return False

    arb_pairs: Set[Tuple[OpId, OpId]] = set()
    if criterion is Criterion.CCV:
        if witness.arb is None or sorted(witness.arb) != sorted(ops):
            return False
        position = {op_id: i for i, op_id in enumerate(witness.arb)}
        # co ⊆ arb
        if any(position[a] >= position[b] for a, b in co):
            return False
        arb_pairs = {
            (a, b) for a in witness.arb for b in witness.arb if position[a] < position[b]
        }

    for o, op in ops.items():
        sequence = witness.per_op_seq.get(o)
        if sequence is None or not spec_member(sequence):
            return False
        past = [ops[a] for a in sorted(ops) if (a, o) in co] + [op]
        history_poset = LabeledPoset.of(past, co)
        if criterion is Criterion.CM:
            keep = {p.id for p in past if p.site == op.site and p.seq <= op.seq}
        else:
            keep = {o}
        try:
            if not poset_refines(hide_return_values(history_poset, keep), sequence):
                return False
            if criterion is Criterion.CCV:
                arb_poset = LabeledPoset.of(past, arb_pairs)
                if not poset_refines(hide_return_values(arb_poset, keep), sequence):
                    return False
        except ValueError:
            return False
    return True
