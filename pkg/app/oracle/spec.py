"""
Okuma-yazma belleği spesifikasyonu ve etiketli poset işlemleri
"""

from typing import Dict, FrozenSet, Iterable, Optional, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict

from app.models import Method, OpId, Operation, format_op_id


class Label(BaseModel):
    """
    Operasyon etiketi. Yazma için value argümandır; okuma için dönüş
    değeridir ve None ise gizlenmiştir.
    """

    model_config = ConfigDict(frozen=True)

    method: Method
    variable: str
    value: Optional[int] = None

    @classmethod
    def of(cls, op: Operation) -> "Label":
        return cls(method=op.method, variable=op.variable, value=op.value)

    @classmethod
    def write(cls, variable: str, value: int) -> "Label":
        return cls(method=Method.WRITE, variable=variable, value=value)

    @classmethod
    def read(cls, variable: str, value: Optional[int] = None) -> "Label":
        return cls(method=Method.READ, variable=variable, value=value)

    @property
    def hidden(self) -> bool:
        return self.method is Method.READ and self.value is None

    def hide(self) -> "Label":
        if self.method is Method.WRITE:
            return self
        return self.model_copy(update={"value": None})

    def refined_by(self, other: "Label") -> bool:
        """Aynı etiket ya da other'ın dönüşü gizlenmiş hali mi?"""
        if self.method is not other.method or self.variable != other.variable:
            return False
        return self.value == other.value or self.hidden

    def __str__(self) -> str:
        shown = "?" if self.value is None else str(self.value)
        return f"{self.method.value}({self.variable},{shown})"


class SpecEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    op: Optional[OpId] = None
    label: Label


class SpecSequence(BaseModel):
    """Etiket dizisi"""

    model_config = ConfigDict(frozen=True)

    seq: Tuple[SpecEntry, ...] = ()

    @classmethod
    def of_labels(cls, *labels: Label) -> "SpecSequence":
        return cls(seq=tuple(SpecEntry(label=label) for label in labels))

    @classmethod
    def of_ops(cls, ops: Iterable[Operation], values: Optional[Dict[OpId, Optional[int]]] = None) -> "SpecSequence":
        entries = []
        for op in ops:
            label = Label.of(op)
            if values is not None and op.is_read:
                label = label.model_copy(update={"value": values[op.id]})
            entries.append(SpecEntry(op=op.id, label=label))
        return cls(seq=tuple(entries))

    def ids(self) -> Tuple[Optional[OpId], ...]:
        return tuple(entry.op for entry in self.seq)

    def __len__(self) -> int:
        return len(self.seq)

    def __str__(self) -> str:
        return " ".join(str(entry.label) for entry in self.seq)


class LabeledPoset(BaseModel):
    """Dönüş değerleri kısmen gizlenebilen etiketli kısmi sıra"""

    model_config = ConfigDict(frozen=True)

    ids: Tuple[OpId, ...]
    order: FrozenSet[Tuple[OpId, OpId]] = frozenset()
    labels: Dict[OpId, Label]

    @classmethod
    def of(cls, ops: Iterable[Operation], order: Iterable[Tuple[OpId, OpId]]) -> "LabeledPoset":
        ops = list(ops)
        members = {op.id for op in ops}
        return cls(
            ids=tuple(op.id for op in ops),
            order=frozenset((a, b) for a, b in order if a in members and b in members),
            labels={op.id: Label.of(op) for op in ops},
        )


def spec_member(sequence: SpecSequence) -> bool:
    """
    Okuma-yazma belleği üyeliği: her okuma, değişkenine yapılan son yazmanın değerini,
    yoksa 0'ı döndürür. Gizli dönüşlü okumalar kısıt koymaz.
    """
    memory: Dict[str, int] = {}
    for entry in sequence.seq:
        label = entry.label
        if label.method is Method.WRITE:
            memory[label.variable] = label.value
        elif not label.hidden and memory.get(label.variable, 0) != label.value:
            return False
    return True


def hide_return_values(poset: LabeledPoset, keep: Set[OpId]) -> LabeledPoset:
    """keep dışındaki operasyonların dönüş değerlerini gizle"""
    labels = {
        op_id: label if op_id in keep else label.hide()
        for op_id, label in poset.labels.items()
    }
    return poset.model_copy(update={"labels": labels})


def poset_refines(poset: LabeledPoset, other: Union[SpecSequence, LabeledPoset]) -> bool:
    """
    poset ≼ other: other, poset'in sırasını içerir ve her etiket ya aynıdır
    ya da other'daki etiketin dönüşü gizlenmiş halidir.

    Raises:
        ValueError: Operasyon kümeleri farklıysa
    """
    if isinstance(other, SpecSequence):
        other_ids = other.ids()
        if None in other_ids or len(set(other_ids)) != len(other_ids):
            raise ValueError("Dizideki her girdi tekil bir operasyon kimliği taşımalı")
        other_labels = {entry.op: entry.label for entry in other.seq}
        position = {op_id: i for i, op_id in enumerate(other_ids)}

        def ordered(a: OpId, b: OpId) -> bool:
            return position[a] < position[b]

    else:
        other_labels = dict(other.labels)
        other_order = other.order

        def ordered(a: OpId, b: OpId) -> bool:
            return (a, b) in other_order

    if set(poset.ids) != set(other_labels):
        missing = sorted(set(poset.ids) ^ set(other_labels))
        raise ValueError(
            "Operasyon kümeleri farklı: " + ", ".join(format_op_id(op_id) for op_id in missing)
        )

    if not all(ordered(a, b) for a, b in poset.order):
        return False
    return all(poset.labels[op_id].refined_by(other_labels[op_id]) for op_id in poset.ids)
