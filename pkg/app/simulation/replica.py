"""
Replika durumu - vektör saat, Lamport saati ve bekleyen güncellemeler

Güncellemeler (Lamport zaman damgası, site) etiket sırasında uygulanır;
bir güncelleme, diğer tüm sitelerden en az o kadar büyük bir zaman damgası
duyulduğunda (kararlılık) ve nedensel teslim koşulu sağlandığında uygulanır.
"""

import bisect
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

# (Lamport zaman damgası, kaynak site)
Tag = Tuple[int, int]


@dataclass(frozen=True)
class Update:
    tag: Tag
    # Kaynak sitenin, yazma anında uyguladığı güncelleme sayıları (kendi girdisi dahil)
    deps: Tuple[int, ...]
    variable: str
    value: int

    @property
    def origin(self) -> int:
        return self.tag[1]


@dataclass(frozen=True)
class Message:
    origin: int
    # Kaynak başına FIFO sıra numarası
    fifo_seq: int
    timestamp: int
    update: Optional[Update] = None


@dataclass
class SiteReplica:
    site: int
    sites: int
    lamport: int = 0
    store: Dict[str, int] = field(default_factory=dict)
    store_tags: Dict[str, Tag] = field(default_factory=dict)
    applied: List[int] = field(default_factory=list)
    last_ts: List[int] = field(default_factory=list)
    pending: List[Update] = field(default_factory=list)
    writes_issued: int = 0
    sent: int = 0
    # Kaynak başına bir sonraki beklenen FIFO numarası ve sıra dışı gelenler
    next_fifo: List[int] = field(default_factory=list)
    inbox: Dict[Tuple[int, int], Message] = field(default_factory=dict)

    def __post_init__(self):
        self.applied = [0] * self.sites
        self.last_ts = [0] * self.sites
        self.next_fifo = [0] * self.sites

    def read(self, variable: str) -> int:
        return self.store.get(variable, 0)

    def own_pending(self) -> bool:
        return any(update.origin == self.site for update in self.pending)

    def new_write(self, variable: str, value: int, full_deps: bool = True) -> Update:
        """Yerel yazma için etiketli güncelleme oluştur"""
        self.lamport += 1
        self.writes_issued += 1
        if full_deps:
            deps = list(self.applied)
        else:
            deps = [0] * self.sites
        deps[self.site] = self.writes_issued
        update = Update(
            tag=(self.lamport, self.site), deps=tuple(deps), variable=variable, value=value
        )
        return update

    def heartbeat(self) -> int:
        self.lamport += 1
        return self.lamport

    def outgoing(self, timestamp: int, update: Optional[Update] = None) -> Message:
        message = Message(origin=self.site, fifo_seq=self.sent, timestamp=timestamp, update=update)
        self.sent += 1
        return message

    def add_pending(self, update: Update) -> None:
        position = bisect.bisect([item.tag for item in self.pending], update.tag)
        self.pending.insert(position, update)

    def receive(self, message: Message) -> List[Message]:
        """Mesajı tampona al; kaynak FIFO sırasında işlenebilecekleri döndür"""
        self.inbox[(message.origin, message.fifo_seq)] = message
        ready = []
        key = (message.origin, self.next_fifo[message.origin])
        while key in self.inbox:
            ready.append(self.inbox.pop(key))
            self.next_fifo[message.origin] += 1
            key = (message.origin, self.next_fifo[message.origin])
        return ready

    def observe(self, message: Message, merge_clock: bool = True, queue: bool = True) -> None:
        self.last_ts[message.origin] = max(self.last_ts[message.origin], message.timestamp)
        if merge_clock:
            self.lamport = max(self.lamport, message.timestamp)
        if queue and message.update is not None:
            self.add_pending(message.update)

    def is_stable(self, update: Update) -> bool:
        timestamp = update.tag[0]
        return all(
            self.last_ts[q] >= timestamp
            for q in range(self.sites)
            if q not in (update.origin, self.site)
        )

    def is_deliverable(self, update: Update) -> bool:
        """Nedensel teslim: W[q] = V[q] - 1 ve diğer r için W[r] >= V[r]"""
        for q, needed in enumerate(update.deps):
            if q == update.origin:
                if self.applied[q] != needed - 1:
                    return False
            elif self.applied[q] < needed:
                return False
        return True

    def apply(self, update: Update) -> None:
        self.applied[update.origin] += 1
        current = self.store_tags.get(update.variable)
        if current is None or update.tag > current:
            self.store[update.variable] = update.value
            self.store_tags[update.variable] = update.tag

    def overwrite(self, update: Update) -> None:
        """Etiket karşılaştırmadan, geliş sırasında yaz"""
        self.applied[update.origin] += 1
        self.store[update.variable] = update.value
        self.store_tags[update.variable] = update.tag

    def apply_ready(self) -> int:
        """Etiket sırasında, kararlı ve teslim edilebilir güncellemeleri uygula"""
        count = 0
        while self.pending:
            head = self.pending[0]
            if not (self.is_stable(head) and self.is_deliverable(head)):
                break
            self.pending.pop(0)
            self.apply(head)
            count += 1
        return count

