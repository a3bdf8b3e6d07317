"""
History işlemleri: execution'dan türetme, differentiated kontrolü, renaming
"""

import logging
from typing import Dict, List, Set, Tuple

from app.models import Execution, History, Operation, Renaming

logger = logging.getLogger(__name__)


class NotDifferentiatedError(ValueError):
    """Hızlı yol differentiated olmayan bir history ile çağrıldı"""


def derive_history(execution: Execution) -> History:
    """Olayları siteye göre grupla; PO, execution içindeki sıradır"""
    return History.of(list(execution.events))


def linearize(history: History) -> Execution:
    """History'yi site-öncelikli sırada bir execution olarak yaz"""
    return Execution(events=history.ops)


def is_differentiated(history: History) -> bool:
    """Hiçbir değişkene aynı değer iki kez yazılmamış ve wr(x,0) yok mu?"""
    seen: Set[Tuple[str, int]] = set()
    for op in history.ops:
        if not op.is_write:
            continue
        key = (op.variable, op.value)
        if op.value == 0 or key in seen:
            return False
        seen.add(key)
    return True


def require_differentiated(history: History) -> None:
    if not is_differentiated(history):
        raise NotDifferentiatedError(
            "History differentiated değil (tekrarlanan yazma değeri ya da wr(x,0))"
        )


def apply_renaming(history: History, renaming: Renaming) -> History:
    """Sadece değerleri değiştir; site, değişken, metot ve PO aynı kalır"""
    renamed: List[Operation] = [
        op.model_copy(update={"value": renaming(op.value)}) for op in history.ops
    ]
    return History(ops=tuple(renamed))


def writer_index(history: History) -> Dict[Tuple[str, int], Operation]:
    """(değişken, değer) -> yazan operasyon; differentiated history varsayılır"""
    return {
        (op.variable, op.value): op for op in history.ops if op.is_write
    }
