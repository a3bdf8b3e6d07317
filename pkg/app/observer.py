"""
Çevrimiçi gözlemci - CC kötü desenlerini bulan nondeterministik register automaton

Üç dal vardır: ThinAirRead, WriteCORead (iki nedensellik zinciri) ve
WriteCOInitRead (bir nedensellik zinciri). Nedensellik zinciri (causal link)
iki durumlu bir alt otomattır: `a` durumunda reg_p sitesindeki bir yazma
zincire eklenir (reg_x, reg_d bağlanır), `b` durumunda bu yazmayı okuyan
okuma zinciri okuyucunun sitesine taşır.

Nondeterminizm, erişilebilir konfigürasyon kümesi (frontier) ile
alt küme simülasyonu yapılarak çözülür. Konfigürasyonlar, geçiş guard'larının
test ettiği register değerleriyle indekslenir; bir olay sadece eşleşen
konfigürasyonları dolaşır.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

from app import monitoring
from app.config import settings
from app.history import derive_history, require_differentiated
from app.models import Execution, Method, Operation
from app.schemas import PatternKind

logger = logging.getLogger(__name__)

REGISTERS = ("reg_x2", "reg_x", "reg_p", "reg_d", "role1")
REGISTER_INDEX = {name: i for i, name in enumerate(REGISTERS)}

# Sabit rol değerleri: 1 ve 2 desen yazmaları, 3/4/2 zincir değerleri, 5 joker
ROLE_W1 = 1
ROLE_W2 = 2
ROLE_WILDCARD = 5

Valuation = Tuple[Optional[Union[int, str]], ...]
Config = Tuple[str, Valuation]


class MonitorOverflow(RuntimeError):
    """Konfigürasyon sayısı MONITOR_MAX_FRONTIER sınırını aştı"""


class RoleBinding(str, Enum):
    # Olay değerleri zaten 0..5 rol alfabesine yeniden adlandırılmış
    FIXED = "fixed"
    # Roller somut değerlere tahmin anında bağlanır
    LAZY = "lazy"


@dataclass(frozen=True)
class Guard:
    """Olay alanı ile register ya da sabit arasında (eşit)sizlik testi"""

    event_field: str
    register: Optional[str] = None
    constant: Optional[int] = None
    negate: bool = False

    def is_satisfied(self, event: Operation, valuation: Valuation) -> bool:
        actual = getattr(event, self.event_field)
        if self.register is not None:
            expected = valuation[REGISTER_INDEX[self.register]]
        else:
            expected = self.constant
        return (actual != expected) if self.negate else (actual == expected)


@dataclass(frozen=True)
class FreshGuard:
    """(değişken, değer) çifti şimdiye kadar hiç yazılmadı"""

    def is_satisfied(self, event: Operation, written: FrozenSet[Tuple[str, int]]) -> bool:
        return (event.variable, event.value) not in written


@dataclass(frozen=True)
class Assignment:
    """register := olay alanı (alan None ise register temizlenir)"""

    register: str
    event_field: Optional[str] = None

    def apply(self, values: List, event: Operation) -> None:
        values[REGISTER_INDEX[self.register]] = (
            getattr(event, self.event_field) if self.event_field is not None else None
        )


@dataclass(frozen=True)
class RATransition:
    source: str
    target: str
    method: Method
    guards: Tuple[Guard, ...] = ()
    assignments: Tuple[Assignment, ...] = ()
    fresh: Optional[FreshGuard] = None

    def is_enabled(
        self, event: Operation, valuation: Valuation, written: FrozenSet[Tuple[str, int]]
    ) -> bool:
        if event.method is not self.method:
            return False
        if self.fresh is not None and not self.fresh.is_satisfied(event, written):
            return False
        return all(guard.is_satisfied(event, valuation) for guard in self.guards)

    def update(self, valuation: Valuation, event: Operation) -> Valuation:
        values = list(valuation)
        for assignment in self.assignments:
            assignment.apply(values, event)
        return tuple(values)

    @cached_property
    def dispatch(self) -> Tuple[Tuple[str, int], ...]:
        """(olay alanı, register) eşitlikleri; konfigürasyonlar bu anahtarla aranır"""
        return tuple(
            (guard.event_field, REGISTER_INDEX[guard.register])
            for guard in self.guards
            if guard.register is not None and not guard.negate
        )

    @cached_property
    def relevant(self) -> FrozenSet[int]:
        """Sonucu belirleyen registerlar: guard'larda geçenler ve atanmadan korunanlar"""
        guarded = {REGISTER_INDEX[g.register] for g in self.guards if g.register is not None}
        assigned = {REGISTER_INDEX[a.register] for a in self.assignments}
        return frozenset(i for i in range(len(REGISTERS)) if i in guarded or i not in assigned)

    def event_key(self, event: Operation) -> tuple:
        return tuple(getattr(event, name) for name, _ in self.dispatch)

    def config_key(self, valuation: Valuation) -> tuple:
        return tuple(valuation[i] for _, i in self.dispatch)

    def project(self, valuation: Valuation) -> Valuation:
        """İlgisiz registerları boşalt; aynı izdüşüm aynı sonucu verir"""
        return tuple(value if i in self.relevant else None for i, value in enumerate(valuation))


@dataclass
class RegisterAutomaton:
    binding: RoleBinding
    states: List[str] = field(default_factory=list)
    initial: List[str] = field(default_factory=list)
    # Kabul durumu -> bulunan desen
    accepting: Dict[str, PatternKind] = field(default_factory=dict)
    transitions: Dict[str, List[RATransition]] = field(default_factory=dict)
    # Nedensellik zinciri örnekleri: önek -> d0
    links: Dict[str, int] = field(default_factory=dict)

    def add_state(self, name: str) -> str:
        if name not in self.states:
            self.states.append(name)
            self.transitions[name] = []
        return name

    def add_transition(self, transition: RATransition) -> None:
        self.add_state(transition.source)
        self.add_state(transition.target)
        self.transitions[transition.source].append(transition)

    def slots(self) -> List[Tuple[Tuple[str, int], RATransition]]:
        return [
            ((state, position), transition)
            for state, transitions in self.transitions.items()
            for position, transition in enumerate(transitions)
        ]

    def skips(self, event: Operation) -> bool:
        """Olay tüketilmeden atlanabilir mi (self-loop)?"""
        if self.binding is RoleBinding.LAZY:
            return True
        return event.value == ROLE_WILDCARD

    def reachable(self) -> List[str]:
        seen = list(self.initial)
        stack = list(self.initial)
        while stack:
            state = stack.pop()
            for transition in self.transitions.get(state, []):
                if transition.target not in seen:
                    seen.append(transition.target)
                    stack.append(transition.target)
        return seen


def _value_guard(binding: RoleBinding, role: int, lazy: Guard) -> Guard:
    if binding is RoleBinding.FIXED:
        return Guard("value", constant=role)
    return lazy


NONZERO = Guard("value", constant=0, negate=True)
ENTER_LINK_A = (Assignment("reg_p", "site"), Assignment("reg_x"), Assignment("reg_d"))
ENTER_LINK_B = (
    Assignment("reg_p", "site"),
    Assignment("reg_x", "variable"),
    Assignment("reg_d", "value"),
)


def _causal_link(automaton: RegisterAutomaton, prefix: str, d0: int) -> Tuple[str, str]:
    """`a` ve `b` durumlarını ve zincir geçişlerini ekle"""
    state_a = automaton.add_state(f"{prefix}.a")
    state_b = automaton.add_state(f"{prefix}.b")
    automaton.links[prefix] = d0

    # a: reg_p sitesinde zincire eklenen yazma
    automaton.add_transition(
        RATransition(
            source=state_a,
            target=state_b,
            method=Method.WRITE,
            guards=(
                Guard("site", register="reg_p"),
                _value_guard(automaton.binding, d0, NONZERO),
            ),
            assignments=(Assignment("reg_x", "variable"), Assignment("reg_d", "value")),
        )
    )
    # b: zincirdeki yazmayı okuyan okuma, zinciri okuyucunun sitesine taşır
    automaton.add_transition(
        RATransition(
            source=state_b,
            target=state_a,
            method=Method.READ,
            guards=(Guard("variable", register="reg_x"), Guard("value", register="reg_d")),
            assignments=(Assignment("reg_p", "site"), Assignment("reg_x"), Assignment("reg_d")),
        )
    )
    return state_a, state_b


def _enter(
    automaton: RegisterAutomaton,
    source: str,
    link: Tuple[str, str],
    method: Method,
    guards: Tuple[Guard, ...],
    assignments: Tuple[Assignment, ...] = (),
) -> None:
    state_a, state_b = link
    automaton.add_transition(
        RATransition(source, state_a, method, guards, assignments + ENTER_LINK_A)
    )
    if method is Method.WRITE:
        # Giren yazmanın kendisi zincirin ilk RF kaynağı olabilir
        automaton.add_transition(
            RATransition(source, state_b, method, guards, assignments + ENTER_LINK_B)
        )


def _exit(
    automaton: RegisterAutomaton,
    link: Tuple[str, str],
    target: str,
    method: Method,
    guards: Tuple[Guard, ...],
) -> List[RATransition]:
    chain_end = (Guard("variable", register="reg_x2"), Guard("site", register="reg_p"))
    transitions = [RATransition(state, target, method, chain_end + guards) for state in link]
    for transition in transitions:
        automaton.add_transition(transition)
    return transitions


def build_mcc(binding: RoleBinding = RoleBinding.LAZY) -> RegisterAutomaton:
    """CC kötü desenlerini tanıyan gözlemciyi kur"""
    automaton = RegisterAutomaton(binding=binding)
    w1_value = _value_guard(binding, ROLE_W1, NONZERO)
    pattern_start = (Assignment("reg_x2", "variable"), Assignment("role1", "value"))

    # q0: ThinAirRead
    q0 = automaton.add_state("q0")
    q0_err = automaton.add_state("q0.err")
    automaton.add_transition(
        RATransition(
            q0,
            q0_err,
            Method.READ,
            guards=(w1_value,),
            fresh=FreshGuard() if binding is RoleBinding.LAZY else None,
        )
    )

    # q1: WriteCORead = wr(x,1) ⇝ wr(x,2) ⇝ rd(x,1)
    q1 = automaton.add_state("q1")
    q1_err = automaton.add_state("q1.err")
    first = _causal_link(automaton, "q1.l3", 3)
    second = _causal_link(automaton, "q1.l4", 4)
    for method in (Method.WRITE, Method.READ):
        _enter(automaton, q1, first, method, (w1_value,), pattern_start)
    w2_value = _value_guard(binding, ROLE_W2, Guard("value", register="role1", negate=True))
    for state in first:
        _enter(
            automaton,
            state,
            second,
            Method.WRITE,
            (
                Guard("variable", register="reg_x2"),
                Guard("site", register="reg_p"),
                w2_value,
            ),
        )
    _exit(automaton, second, q1_err, Method.READ, (Guard("value", register="role1"),))

    # q2: WriteCOInitRead = wr(x,1) ⇝ rd(x,0)
    q2 = automaton.add_state("q2")
    q2_err = automaton.add_state("q2.err")
    third = _causal_link(automaton, "q2.l2", 2)
    for method in (Method.WRITE, Method.READ):
        _enter(automaton, q2, third, method, (w1_value,), (Assignment("reg_x2", "variable"),))
    _exit(automaton, third, q2_err, Method.READ, (Guard("value", constant=0),))

    automaton.initial = [q0, q1, q2]
    automaton.accepting = {
        q0_err: PatternKind.THIN_AIR_READ,
        q1_err: PatternKind.WRITE_CO_READ,
        q2_err: PatternKind.WRITE_CO_INIT_READ,
    }
    return automaton


EMPTY_VALUATION: Valuation = (None,) * len(REGISTERS)

# (kaynak durum, geçiş sırası) -> olay anahtarı -> izdüşürülmüş valuation'lar
Slot = Tuple[str, int]
Index = Dict[Slot, Dict[tuple, FrozenSet[Valuation]]]


def _with(items: FrozenSet, item) -> FrozenSet:
    return items if item in items else items | {item}


def _extend_index(automaton: RegisterAutomaton, configs: Iterable[Config], base: Index) -> Index:
    """Konfigürasyonları geçiş yuvalarına ekle; base'in sadece değişen kovaları kopyalanır"""
    additions: Dict[Slot, Dict[tuple, Set[Valuation]]] = {}
    for current, valuation in configs:
        for position, transition in enumerate(automaton.transitions[current]):
            keyed = additions.setdefault((current, position), {})
            keyed.setdefault(transition.config_key(valuation), set()).add(
                transition.project(valuation)
            )

    index = dict(base)
    for slot, keyed in additions.items():
        buckets = dict(index.get(slot, {}))
        for key, valuations in keyed.items():
            buckets[key] = buckets.get(key, frozenset()) | valuations
        index[slot] = buckets
    return index


@dataclass(frozen=True)
class MonitorState:
    frontier: FrozenSet[Config]
    accepted: bool = False
    branch: Optional[PatternKind] = None
    written: FrozenSet[Tuple[str, int]] = frozenset()
    events: int = 0
    sites: FrozenSet[int] = frozenset()
    variables: FrozenSet[str] = frozenset()
    values: FrozenSet[int] = frozenset()
    index: Index = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def initial(cls, automaton: RegisterAutomaton) -> "MonitorState":
        frontier = frozenset((state, EMPTY_VALUATION) for state in automaton.initial)
        return cls(frontier=frontier, index=_extend_index(automaton, frontier, {}))


def frontier_bound(automaton: RegisterAutomaton, state: MonitorState) -> int:
    """
    Frontier büyüklüğü için üst sınır

    reg_p bir site, reg_x2 bir değişken, (reg_x, reg_d) yazılmış bir çift ve
    role1 görülmüş bir değer tutar; her biri ayrıca boş olabilir.
    """
    return (
        len(automaton.states)
        * (len(state.sites) + 1)
        * (len(state.variables) + 1)
        * (len(state.written) + 1)
        * (len(state.values) + 1)
    )


def feed(
    state: MonitorState,
    automaton: RegisterAutomaton,
    event: Operation,
    max_frontier: Optional[int] = None,
) -> MonitorState:
    """Bir olay tüket: frontier'i ilerlet, kabul durumuna girilirse mandalla"""
    monitoring.monitor_events_total.inc()
    written = state.written
    if event.is_write:
        written = _with(written, (event.variable, event.value))
    if state.accepted:
        return replace(state, written=written, events=state.events + 1)

    limit = max_frontier if max_frontier is not None else settings.MONITOR_MAX_FRONTIER
    successors: Set[Config] = set()
    reached: List[PatternKind] = []
    for slot, transition in automaton.slots():
        bucket = state.index.get(slot, {}).get(transition.event_key(event))
        if not bucket:
            continue
        for valuation in bucket:
            if not transition.is_enabled(event, valuation, state.written):
                continue
            if transition.target in automaton.accepting:
                reached.append(automaton.accepting[transition.target])
            else:
                successors.add((transition.target, transition.update(valuation, event)))

    if automaton.skips(event):
        # Self-loop: eski konfigürasyonlar kalır, sadece yeniler indekslenir
        added = successors - state.frontier
        frontier = state.frontier | added if added else state.frontier
        index = _extend_index(automaton, added, state.index)
    else:
        frontier = frozenset(successors)
        index = _extend_index(automaton, frontier, {})

    if len(frontier) > limit:
        raise MonitorOverflow(f"Gözlemci {len(frontier)} konfigürasyona ulaştı (sınır {limit})")

    branch = None
    if reached:
        branch = min(reached, key=list(automaton.accepting.values()).index)
        logger.info(f"Gözlemci {state.events + 1}. olayda {branch.value} buldu")
    advanced = MonitorState(
        frontier=frontier,
        accepted=branch is not None,
        branch=branch,
        written=written,
        events=state.events + 1,
        sites=_with(state.sites, event.site),
        variables=_with(state.variables, event.variable),
        values=_with(state.values, event.value),
        index=index,
    )
    bound = frontier_bound(automaton, advanced)
    if len(frontier) > bound:
        raise MonitorOverflow(f"Gözlemci {len(frontier)} konfigürasyonla {bound} sınırını aştı")
    return advanced


def run_monitor(
    events: Iterable[Operation],
    binding: RoleBinding = RoleBinding.LAZY,
    automaton: Optional[RegisterAutomaton] = None,
) -> MonitorState:
    """Olay dizisini baştan sona gözlemciden geçir"""
    automaton = automaton or build_mcc(binding)
    state = MonitorState.initial(automaton)
    for event in events:
        state = feed(state, automaton, event)
    logger.debug(f"{state.events} olay, frontier boyutu {len(state.frontier)}")
    return state


def monitor_execution(execution: Execution) -> bool:
    """
    Execution'da CC ihlali var mı?

    Kabul mandallandığı için her önek ayrıca değerlendirilmiş olur.

    Raises:
        NotDifferentiatedError: Türetilen history differentiated değilse
    """
    require_differentiated(derive_history(execution))
    return run_monitor(execution.events).accepted
