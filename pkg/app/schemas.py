from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from app.models import OpId, format_op_id
from app.oracle.spec import SpecSequence


class Criterion(str, Enum):
    CC = "cc"
    CM = "cm"
    CCV = "ccv"


class VerdictMode(str, Enum):
    FAST_PATH = "fast-path"
    ORACLE = "oracle"


class PatternKind(str, Enum):
    CYCLIC_CO = "CyclicCO"
    WRITE_CO_INIT_READ = "WriteCOInitRead"
    THIN_AIR_READ = "ThinAirRead"
    WRITE_CO_READ = "WriteCORead"
    WRITE_HB_INIT_READ = "WriteHBInitRead"
    CYCLIC_HB = "CyclicHB"
    CYCLIC_CF = "CyclicCF"


# Kötü desen tablosunun satır sırası
PATTERN_ORDER: List[PatternKind] = list(PatternKind)

# CyclicCO varken değerlendirilemeyen desenler
CO_DEPENDENT = [
    PatternKind.WRITE_CO_INIT_READ,
    PatternKind.WRITE_CO_READ,
    PatternKind.WRITE_HB_INIT_READ,
    PatternKind.CYCLIC_HB,
    PatternKind.CYCLIC_CF,
]

CC_PATTERNS = [
    PatternKind.CYCLIC_CO,
    PatternKind.WRITE_CO_INIT_READ,
    PatternKind.THIN_AIR_READ,
    PatternKind.WRITE_CO_READ,
]

CRITERION_PATTERNS: Dict[Criterion, List[PatternKind]] = {
    Criterion.CC: CC_PATTERNS,
    Criterion.CM: CC_PATTERNS + [PatternKind.WRITE_HB_INIT_READ, PatternKind.CYCLIC_HB],
    Criterion.CCV: CC_PATTERNS + [PatternKind.CYCLIC_CF],
}


class WitnessEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    role: str
    op: OpId


class BadPattern(BaseModel):
    """Kötü desen ve rol etiketli tanık operasyonları"""

    model_config = ConfigDict(frozen=True)

    kind: PatternKind
    witness: Tuple[WitnessEntry, ...]

    @classmethod
    def build(cls, kind: PatternKind, *entries: Tuple[str, OpId]) -> "BadPattern":
        return cls(
            kind=kind,
            witness=tuple(WitnessEntry(role=role, op=op) for role, op in entries),
        )

    def role(self, name: str) -> OpId:
        for entry in self.witness:
            if entry.role == name:
                return entry.op
        raise KeyError(name)

    def ops(self) -> List[OpId]:
        return [entry.op for entry in self.witness]

    def cycle(self) -> List[OpId]:
        return [entry.op for entry in self.witness if entry.role.startswith("c")]

    def describe(self) -> str:
        ids = " ".join(format_op_id(op) for op in self.ops())
        return f"{self.kind.value} {ids}"


class PatternReport(BaseModel):
    found: List[BadPattern] = Field(default_factory=list)
    not_evaluated: List[PatternKind] = Field(default_factory=list)

    def kinds(self) -> List[PatternKind]:
        return [pattern.kind for pattern in self.found]

    def get(self, kind: PatternKind) -> Optional[BadPattern]:
        for pattern in self.found:
            if pattern.kind is kind:
                return pattern
        return None


class WitnessOrders(BaseModel):
    """Oracle'ın bulduğu nedensellik (co), hakemlik (arb) ve operasyon dizileri"""

    co: List[Tuple[OpId, OpId]]
    arb: Optional[List[OpId]] = None
    per_op_seq: Dict[OpId, SpecSequence]


class Verdict(BaseModel):
    criterion: Criterion
    consistent: bool
    mode: VerdictMode
    evidence: Optional[BadPattern] = None
    witness: Optional[WitnessOrders] = None
    patterns: List[BadPattern] = Field(default_factory=list)
    not_evaluated: List[PatternKind] = Field(default_factory=list)
    # Oracle reddi: çürütülen aday co sayısı
    candidates_refuted: Optional[int] = None

    def line(self) -> str:
        """`<criterion> <ok|violation> [<pattern> <ids...>]`"""
        if self.consistent:
            return f"{self.criterion.value} ok"
        if self.evidence is None:
            return f"{self.criterion.value} violation"
        return f"{self.criterion.value} violation {self.evidence.describe()}"


class Protocol(str, Enum):
    CORRECT = "correct"
    NO_CAUSAL_DELIVERY = "mutant-no-causal-delivery"
    DROP_READ_DEPS = "mutant-drop-read-deps"
    STALE_READ = "mutant-stale-read"
    REORDER_LOCAL = "mutant-reorder-local"


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    sites: int = Field(default=3, ge=1)
    variables: int = Field(default=2, ge=1)
    ops: NonNegativeInt = 60
    seed: int = Field(default=1, ge=0, lt=2**64)
    protocol: Protocol = Protocol.CORRECT
    write_ratio: float = Field(default=0.5, ge=0.0, le=1.0)


class CaseResult(BaseModel):
    """Tek bir fuzz koşusunun sonucu"""

    seed: int
    protocol: Protocol
    ops: int
    verdicts: Dict[Criterion, bool]
    evidence: Dict[Criterion, Optional[BadPattern]] = Field(default_factory=dict)
    pattern_kinds: List[PatternKind] = Field(default_factory=list)

    def line(self) -> str:
        flags = " ".join(
            "1" if self.verdicts[criterion] else "0" for criterion in Criterion
        )
        return f"{self.seed} {self.protocol.value} {flags}"


class FuzzReport(BaseModel):
    protocol: Protocol
    runs: List[CaseResult] = Field(default_factory=list)
    violations: Dict[Criterion, int] = Field(default_factory=dict)
    first_witnesses: Dict[Criterion, BadPattern] = Field(default_factory=dict)

    @property
    def any_violation(self) -> bool:
        return any(count > 0 for count in self.violations.values())

    def summary_line(self) -> str:
        return (
            f"summary {self.protocol.value} runs={len(self.runs)} "
            f"cc_violations={self.violations.get(Criterion.CC, 0)} "
            f"cm_violations={self.violations.get(Criterion.CM, 0)} "
            f"ccv_violations={self.violations.get(Criterion.CCV, 0)}"
        )
