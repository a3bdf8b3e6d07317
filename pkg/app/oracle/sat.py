"""
CNF formülleri: DIMACS okuma/yazma, kaba kuvvet SAT ve SAT → history kodlaması
"""

import itertools
import logging
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, Field

from app.models import History, Method, Operation

logger = logging.getLogger(__name__)

ENCODED_VARIABLE = "y"


class CnfError(ValueError):
    """Hatalı CNF girdisi"""


class Cnf(BaseModel):
    num_vars: int = Field(ge=0)
    clauses: List[List[int]]


def parse_dimacs(text: str) -> Cnf:
    """
    DIMACS CNF metnini parse et.

    Args:
        text: `p cnf <nvars> <nclauses>` satırı ve 0 ile biten cümle satırları

    Returns:
        Cnf
    """
    num_vars: Optional[int] = None
    declared_clauses = 0
    clauses: List[List[int]] = []
    pending: List[int] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        # Yorumları ve boş satırları atla
        if not line or line.startswith("c") or line.startswith("%"):
            continue

        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"satır {line_no}: geçersiz problem satırı: {line}")
            try:
                num_vars, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise CnfError(f"satır {line_no}: geçersiz problem satırı: {line}")
            continue

        try:
            literals = [int(token) for token in line.split()]
        except ValueError:
            raise CnfError(f"satır {line_no}: geçersiz literal: {line}")
        for literal in literals:
            if literal == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(literal)

    if pending:
        raise CnfError("Son cümle 0 ile bitmeli")
    if num_vars is None:
        raise CnfError("`p cnf` satırı bulunamadı")
    if declared_clauses != len(clauses):
        logger.warning(
            f"DIMACS başlığı {declared_clauses} cümle bildiriyor, {len(clauses)} okundu"
        )
    return Cnf(num_vars=num_vars, clauses=clauses)


def write_dimacs(cnf: Cnf) -> str:
    lines = [f"p cnf {cnf.num_vars} {len(cnf.clauses)}"]
    for clause in cnf.clauses:
        lines.append(" ".join(str(literal) for literal in clause) + " 0")
    return "\n".join(lines) + "\n"


def brute_force_sat(cnf: Cnf) -> Optional[Dict[int, bool]]:
    """Tüm atamaları dene; sağlayan ilk atamayı döndür"""
    for values in itertools.product([False, True], repeat=cnf.num_vars):
        assignment = {i + 1: value for i, value in enumerate(values)}
        if all(
            any(assignment[abs(literal)] == (literal > 0) for literal in clause)
            for clause in cnf.clauses
        ):
            return assignment
    return None


def _validate(cnf: Cnf, codes: Sequence[int]) -> None:
    if not cnf.clauses:
        raise CnfError("Boş cümle listesi kodlanamaz")
    for clause in cnf.clauses:
        if not clause:
            raise CnfError("Boş cümle kodlanamaz")
        for literal in clause:
            if literal == 0 or abs(literal) > cnf.num_vars:
                raise CnfError(f"Literal {literal} 1..{cnf.num_vars} aralığında değil")
    if len(codes) != len(cnf.clauses):
        raise CnfError("Her cümle için tam bir kod verilmeli")
    if len(set(codes)) != len(codes) or any(code <= cnf.num_vars for code in codes):
        raise CnfError(
            f"Cümle kodları tekil ve {cnf.num_vars} değerinden büyük olmalı (değişken/cümle çakışması)"
        )


def true_site(i: int) -> int:
    return 2 * (i - 1)


def false_site(i: int) -> int:
    return 2 * (i - 1) + 1


def encode_sat(cnf: Cnf, clause_codes: Optional[Sequence[int]] = None) -> History:
    """
    CNF formülünü, ancak ve ancak formül sağlanabilirse CC olan bir history'ye kodla

    Her x_i için iki site vardır. "Doğru" sitesi, ¬x_i içeren cümlelerin
    kodlarını ve ardından i'yi y'ye yazar; "yanlış" sitesi x_i içeren
    cümlelerin kodlarını ve ardından i'yi yazar. Değerlendirme sitesi önce
    rd(y,1..n), sonra her cümle kodunu okur.
    """
    codes = list(clause_codes) if clause_codes is not None else [
        cnf.num_vars + k + 1 for k in range(len(cnf.clauses))
    ]
    _validate(cnf, codes)
    clauses = [sorted(set(clause), key=lambda literal: (abs(literal), literal)) for clause in cnf.clauses]

    ops: List[Operation] = []

    def emit(site: int, method: Method, value: int) -> None:
        seq = sum(1 for op in ops if op.site == site)
        ops.append(
            Operation(site=site, method=method, variable=ENCODED_VARIABLE, value=value, seq=seq)
        )

    for i in range(1, cnf.num_vars + 1):
        for k, clause in enumerate(clauses):
            if -i in clause:
                emit(true_site(i), Method.WRITE, codes[k])
        emit(true_site(i), Method.WRITE, i)
        for k, clause in enumerate(clauses):
            if i in clause:
                emit(false_site(i), Method.WRITE, codes[k])
        emit(false_site(i), Method.WRITE, i)

    evaluator = 2 * cnf.num_vars
    for i in range(1, cnf.num_vars + 1):
        emit(evaluator, Method.READ, i)
    for code in codes:
        emit(evaluator, Method.READ, code)

    logger.debug(f"{cnf.num_vars} değişken, {len(codes)} cümle → {len(ops)} operasyon")
    return History.of(ops)
