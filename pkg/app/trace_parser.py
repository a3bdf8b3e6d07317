import logging
import re
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from app.models import Execution, Method, Operation

logger = logging.getLogger(__name__)


class TraceFormatError(ValueError):
    """Trace dosyasında hatalı satır"""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"satır {line_no}: {message}")
        self.line_no = line_no


class TraceParser:
    """Trace dosyalarını parse eden sınıf"""

    # <site> <wr|rd> <değişken> <değer>, isteğe bağlı @<seq> öneki ile
    EVENT_PATTERN = re.compile(
        r"^(?:@(?P<seq>\d+)\s+)?"
        r"(?P<site>\d+)\s+(?P<method>wr|rd)\s+(?P<variable>[A-Za-z0-9_]+)\s+(?P<value>-?\d+)$"
    )
    COMMENT_PREFIX = "#"

    def __init__(self):
        # Site başına bir sonraki seq
        self.next_seq: Dict[int, int] = {}
        self.explicit_ids: Set[Tuple[int, int]] = set()

    def reset(self) -> None:
        self.next_seq.clear()
        self.explicit_ids.clear()

    def parse_line(self, line: str, line_no: int) -> Optional[Operation]:
        """Bir trace satırını parse et; yorum ve boş satırlar için None"""
        line = line.strip()
        if not line or line.startswith(self.COMMENT_PREFIX):
            return None

        match = self.EVENT_PATTERN.match(line)
        if not match:
            raise TraceFormatError(line_no, f"hatalı satır: {line!r}")

        value = int(match.group("value"))
        if value < 0:
            raise TraceFormatError(line_no, f"negatif değer: {value}")

        site = int(match.group("site"))
        expected = self.next_seq.get(site, 0)
        seq = expected
        if match.group("seq") is not None:
            seq = int(match.group("seq"))
            if (site, seq) in self.explicit_ids:
                raise TraceFormatError(line_no, f"tekrarlanan (site, seq): {site}.{seq}")
            self.explicit_ids.add((site, seq))
            if seq != expected:
                raise TraceFormatError(
                    line_no, f"site {site} için seq {expected} bekleniyordu, {seq} bulundu"
                )
        self.next_seq[site] = seq + 1

        return Operation(
            site=site,
            method=Method(match.group("method")),
            variable=match.group("variable"),
            value=value,
            seq=seq,
        )

    def iter_events(self, lines: Iterable[str]) -> Iterator[Operation]:
        """Satırları akış halinde parse et (monitor modu için)"""
        for line_no, line in enumerate(lines, start=1):
            event = self.parse_line(line, line_no)
            if event is not None:
                yield event

    def parse_text(self, text: str) -> Execution:
        """Tüm trace metnini parse et"""
        self.reset()
        events: List[Operation] = list(self.iter_events(text.split("\n")))
        logger.debug(f"{len(events)} olay, {len(self.next_seq)} site parse edildi")
        return Execution(events=tuple(events))


def parse_trace(text: Union[str, bytes]) -> Execution:
    """Trace metnini (str ya da UTF-8 byte dizisi) execution'a çevir"""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return TraceParser().parse_text(text)


def serialize_trace(execution: Execution) -> str:
    """Execution'ı trace formatına yaz: global sırada, tek boşluk, sonda yeni satır"""
    if not execution.events:
        return ""
    lines = [
        f"{op.site} {op.method.value} {op.variable} {op.value}"
        for op in execution.events
    ]
    return "\n".join(lines) + "\n"
