"""
Çekirdek veri tipleri: operasyon, history, execution ve yeniden adlandırma (renaming)

Tüm tipler oluşturulduktan sonra değişmez (frozen); thread'ler arasında paylaşılabilir.
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, model_validator

# Operasyon kimliği: (site, seq)
OpId = Tuple[int, int]

VARIABLE_PATTERN = r"^[A-Za-z0-9_]+$"


def format_op_id(op_id: OpId) -> str:
    """Kimliği `site.seq` biçiminde yaz"""
    return f"{op_id[0]}.{op_id[1]}"


class Method(str, Enum):
    WRITE = "wr"
    READ = "rd"


class Operation(BaseModel):
    """Tek bir çağrı: wr(x, v) ya da rd(x) ▷ v"""

    model_config = ConfigDict(frozen=True)

    site: NonNegativeInt
    method: Method
    variable: str = Field(pattern=VARIABLE_PATTERN)
    # Yazma için yazılan değer, okuma için dönen değer (0 = başlangıç değeri)
    value: NonNegativeInt
    seq: NonNegativeInt = 0

    @property
    def id(self) -> OpId:
        return (self.site, self.seq)

    @property
    def is_write(self) -> bool:
        return self.method is Method.WRITE

    @property
    def is_read(self) -> bool:
        return self.method is Method.READ

    def label(self) -> str:
        return f"{self.method.value}({self.variable},{self.value})"

    def __str__(self) -> str:
        return f"{format_op_id(self.id)}:{self.label()}"


class History(BaseModel):
    """
    Site başına program sırası (PO) ile operasyon kümesi.

    Operasyonlar (site, seq) sırasında tutulur; her sitenin seq değerleri
    boşluksuz 0, 1, 2, ... şeklindedir.
    """

    model_config = ConfigDict(frozen=True)

    ops: Tuple[Operation, ...] = ()

    @classmethod
    def of(cls, ops: List[Operation]) -> "History":
        return cls(ops=tuple(sorted(ops, key=lambda op: op.id)))

    @model_validator(mode="after")
    def _check_program_order(self) -> "History":
        expected: Dict[int, int] = {}
        previous: Optional[OpId] = None
        for op in self.ops:
            if previous is not None and op.id <= previous:
                raise ValueError(
                    f"Operasyonlar (site, seq) sırasında ve tekil olmalı: {format_op_id(op.id)}"
                )
            want = expected.get(op.site, 0)
            if op.seq != want:
                raise ValueError(
                    f"Site {op.site} için seq {want} bekleniyordu, {op.seq} bulundu"
                )
            expected[op.site] = want + 1
            previous = op.id
        return self

    def __len__(self) -> int:
        return len(self.ops)

    def sites(self) -> List[int]:
        return sorted({op.site for op in self.ops})

    def site_ops(self, site: int) -> List[Operation]:
        return [op for op in self.ops if op.site == site]

    def index(self) -> Dict[OpId, int]:
        """Kimlikten ardışık indekse eşleme (relations matrisleri için)"""
        return {op.id: i for i, op in enumerate(self.ops)}

    def get(self, op_id: OpId) -> Operation:
        for op in self.ops:
            if op.id == op_id:
                return op
        raise KeyError(format_op_id(op_id))


class Execution(BaseModel):
    """Toplam sıralı olay dizisi (varış sırası)"""

    model_config = ConfigDict(frozen=True)

    events: Tuple[Operation, ...] = ()

    @model_validator(mode="after")
    def _check_site_order(self) -> "Execution":
        # Her sitenin olayları 0, 1, 2, ... seq ile sırayla gelir
        expected: Dict[int, int] = {}
        for op in self.events:
            if op.seq != expected.get(op.site, 0):
                raise ValueError(
                    f"Site {op.site} olayları ardışık seq ile gelmeli: {format_op_id(op.id)}"
                )
            expected[op.site] = op.seq + 1
        return self

    def __len__(self) -> int:
        return len(self.events)

    def prefix(self, length: int) -> "Execution":
        return Execution(events=self.events[:length])


class Renaming(BaseModel):
    """
    Veri değerlerini değiştiren toplam fonksiyon: sonlu tablo + varsayılan kural.

    default None ise tabloda olmayan değerler aynen kalır (identity),
    aksi halde tüm tablo dışı değerler default'a gider.
    """

    model_config = ConfigDict(frozen=True)

    table: Dict[NonNegativeInt, NonNegativeInt] = Field(default_factory=dict)
    default: Optional[NonNegativeInt] = None

    @classmethod
    def constant(cls, value: int) -> "Renaming":
        return cls(default=value)

    def __call__(self, value: int) -> int:
        if value in self.table:
            return self.table[value]
        return value if self.default is None else self.default
