"""
Ayrık olaylı replikalı depo simülasyonu

Olay kuyruğu (zaman, sayaç, tür, yük) girdilerinden oluşan bir heap'tir;
sayaç, aynı zamanlı olayları ekleme sırasına göre ayırır ve simülasyonu
tohum verildiğinde bit düzeyinde belirleyici yapar.
"""

import heapq
import logging
from typing import Dict, List, Optional, Tuple

from app import monitoring
from app.config import Settings, settings
from app.models import Execution, Method, Operation
from app.schemas import Protocol, SimConfig
from app.simulation.prng import SplitMix64
from app.simulation.replica import Message, SiteReplica, Update

logger = logging.getLogger(__name__)

ISSUE = "issue"
DELIVER = "deliver"
HEARTBEAT = "heartbeat"


class Simulator:
    """Tek bir SimConfig için istemcileri, replikaları ve ağı yürüten sınıf"""

    def __init__(self, config: SimConfig, policy: Optional[Settings] = None):
        self.config = config
        self.policy = policy or settings
        self.protocol = config.protocol
        self.rng = SplitMix64(config.seed)
        self.replicas = [SiteReplica(site=s, sites=config.sites) for s in range(config.sites)]
        self.queue: List[Tuple[int, int, str, object]] = []
        self.counter = 0
        self.next_value = 1
        self.events: List[Operation] = []
        self.seq = [0] * config.sites
        # Sitenin istemcisine kalan operasyon sayısı (operasyon k, k % sites sitesine)
        self.remaining = [len(range(s, config.ops, config.sites)) for s in range(config.sites)]
        self.blocked: Dict[int, str] = {}
        self.write_permille = round(config.write_ratio * 1000)

    # Olay kuyruğu

    def _schedule(self, time: int, kind: str, payload: object) -> None:
        heapq.heappush(self.queue, (time, self.counter, kind, payload))
        self.counter += 1

    def _done(self) -> bool:
        return not any(self.remaining)

    def _delay(self) -> int:
        """1 + adım × geometrik sayı, üst sınırlı"""
        failures = 0
        while (
            1 + self.policy.SIM_DELAY_STEP * failures < self.policy.SIM_MAX_DELAY
            and not self.rng.chance(self.policy.SIM_DELAY_SUCCESS_PERMILLE)
        ):
            failures += 1
        return min(1 + self.policy.SIM_DELAY_STEP * failures, self.policy.SIM_MAX_DELAY)

    def _broadcast(self, site: int, now: int, timestamp: int, update: Optional[Update] = None) -> None:
        message = self.replicas[site].outgoing(timestamp, update)
        for dest in range(self.config.sites):
            if dest != site:
                self._schedule(now + self._delay(), DELIVER, (dest, message))

    def run(self) -> Execution:
        gap = self.policy.SIM_OP_GAP
        for site in range(self.config.sites):
            if self.remaining[site]:
                self._schedule(self.rng.below(gap), ISSUE, site)
            if self.config.sites > 1:
                self._schedule(self.policy.SIM_HEARTBEAT_INTERVAL, HEARTBEAT, site)

        while self.queue and not self._done():
            now, _, kind, payload = heapq.heappop(self.queue)
            if kind == ISSUE:
                self._issue(payload, now)
            elif kind == DELIVER:
                dest, message = payload
                self._deliver(dest, message, now)
            else:
                self._heartbeat(payload, now)

        return Execution(events=tuple(self.events))

    # İstemciler

    def _record(self, site: int, method: Method, variable: str, value: int) -> None:
        self.events.append(
            Operation(site=site, method=method, variable=variable, value=value, seq=self.seq[site])
        )
        self.seq[site] += 1

    def _complete(self, site: int, now: int) -> None:
        self.remaining[site] -= 1
        if self.remaining[site]:
            gap = self.policy.SIM_OP_GAP
            self._schedule(now + gap + self.rng.below(gap), ISSUE, site)

    def _issue(self, site: int, now: int) -> None:
        replica = self.replicas[site]
        is_write = self.rng.chance(self.write_permille)
        variable = f"x{self.rng.below(self.config.variables)}"

        if is_write:
            value = self.next_value
            self.next_value += 1
            update = replica.new_write(
                variable, value, full_deps=self.protocol is not Protocol.DROP_READ_DEPS
            )
            if self.protocol is Protocol.NO_CAUSAL_DELIVERY:
                replica.overwrite(update)
            else:
                replica.add_pending(update)
                replica.apply_ready()
            self._broadcast(site, now, update.tag[0], update)
            self._record(site, Method.WRITE, variable, value)
            self._complete(site, now)
            return

        waits = self.protocol not in (Protocol.NO_CAUSAL_DELIVERY, Protocol.REORDER_LOCAL)
        if waits and replica.own_pending():
            # Okuma, sitenin kendi bekleyen yazmaları uygulanana kadar bekler
            self.blocked[site] = variable
            return
        self._complete_read(site, variable, now)

    def _complete_read(self, site: int, variable: str, now: int) -> None:
        value = self.replicas[site].read(variable)
        if self.protocol is Protocol.STALE_READ and self.rng.chance(
            self.policy.SIM_STALE_READ_PERMILLE
        ):
            value = self.next_value
            self.next_value += 1
        self._record(site, Method.READ, variable, value)
        self._complete(site, now)

    # Ağ

    def _deliver(self, dest: int, message: Message, now: int) -> None:
        replica = self.replicas[dest]
        if self.protocol is Protocol.NO_CAUSAL_DELIVERY:
            # Geliş sırası uygulama sırasıdır: ne nedensel teslim ne de LWW
            replica.observe(message, merge_clock=False, queue=False)
            if message.update is not None:
                replica.overwrite(message.update)
            return

        merge = self.protocol is not Protocol.DROP_READ_DEPS
        for ready in replica.receive(message):
            replica.observe(ready, merge_clock=merge)
        replica.apply_ready()

        if dest in self.blocked and not replica.own_pending():
            self._complete_read(dest, self.blocked.pop(dest), now)

    def _heartbeat(self, site: int, now: int) -> None:
        timestamp = self.replicas[site].heartbeat()
        self._broadcast(site, now, timestamp)
        self._schedule(now + self.policy.SIM_HEARTBEAT_INTERVAL, HEARTBEAT, site)


def run_sim(config: SimConfig, policy: Optional[Settings] = None) -> Execution:
    """
    Simülasyonu çalıştır ve istemcilerin gördüğü sırada execution üret

    Args:
        config: Site, değişken, operasyon sayısı, tohum ve protokol
        policy: Gecikme/aralık ayarları (varsayılan: global settings)

    Returns:
        Differentiated execution (yazma değerleri 1'den başlayan global sayaçtan)
    """
    execution = Simulator(config, policy).run()
    monitoring.simulated_runs_total.labels(protocol=config.protocol.value).inc()
    logger.debug(
        f"seed={config.seed} protocol={config.protocol.value}: {len(execution)} olay üretildi"
    )
    return execution
