"""
Test üreteçleri: tohumlu rastgele history/execution, kapsamlı sayım ve hypothesis stratejileri
"""

import itertools
import random
from typing import Iterator, List, Sequence

from hypothesis import strategies as st

from app.models import Execution, History, Method, Operation
from app.oracle.sat import Cnf


def _build(site_ops: Sequence[Sequence[tuple]]) -> History:
    ops = [
        Operation(site=site, method=method, variable=variable, value=value, seq=seq)
        for site, items in enumerate(site_ops)
        for seq, (method, variable, value) in enumerate(items)
    ]
    return History.of(ops)


def random_history(
    rng: random.Random,
    max_ops: int = 8,
    sites: int = 2,
    variables: Sequence[str] = ("x", "y"),
    thin_air_rate: float = 0.05,
) -> History:
    """Differentiated rastgele history; okumalar 0, yazılmış bir değer ya da nadiren havadan değer döner"""
    n = rng.randint(0, max_ops)
    shape = [[rng.randrange(sites), rng.random() < 0.5, rng.choice(variables)] for _ in range(n)]

    next_value = {variable: 1 for variable in variables}
    written = {variable: [] for variable in variables}
    for item in shape:
        if item[1]:
            variable = item[2]
            item.append(next_value[variable])
            written[variable].append(next_value[variable])
            next_value[variable] += 1

    per_site: List[List[tuple]] = [[] for _ in range(sites)]
    for item in shape:
        site, is_write, variable = item[0], item[1], item[2]
        if is_write:
            per_site[site].append((Method.WRITE, variable, item[3]))
            continue
        roll = rng.random()
        if roll < thin_air_rate:
            value = next_value[variable] + 10
        elif written[variable] and roll < 0.8:
            value = rng.choice(written[variable])
        else:
            value = 0
        per_site[site].append((Method.READ, variable, value))
    return _build(per_site)


def random_forward_execution(
    rng: random.Random,
    max_ops: int = 30,
    max_sites: int = 4,
    max_variables: int = 3,
    thin_air_rate: float = 0.02,
) -> Execution:
    """Her sıfırdan farklı okuma, yazıldıktan sonra gelen differentiated akış"""
    sites = rng.randint(1, max_sites)
    variables = [f"v{i}" for i in range(rng.randint(1, max_variables))]
    seq = [0] * sites
    written = {variable: [] for variable in variables}
    next_value = 1
    events = []
    for _ in range(rng.randint(0, max_ops)):
        site = rng.randrange(sites)
        variable = rng.choice(variables)
        if rng.random() < 0.5:
            value, method = next_value, Method.WRITE
            next_value += 1
            written[variable].append(value)
        else:
            method = Method.READ
            roll = rng.random()
            if roll < thin_air_rate:
                value = 10_000 + next_value
            elif written[variable] and roll < 0.85:
                value = rng.choice(written[variable])
            else:
                value = 0
        events.append(
            Operation(site=site, method=method, variable=variable, value=value, seq=seq[site])
        )
        seq[site] += 1
    return Execution(events=tuple(events))


def enumerate_histories(
    n: int, sites: int = 2, variables: Sequence[str] = ("x", "y"), max_value: int = 3
) -> Iterator[History]:
    """
    n operasyonlu tüm differentiated history'ler (simetri indirgemeli).

    Yazma değerleri değişken başına site-öncelikli sırada 1, 2, ... verilir
    (değer yeniden adlandırması); ilk operasyonun değişkeni ilk değişkendir;
    site 0 en az site 1 kadar operasyon içerir. Okuma değerleri 0, yazılmış
    değerler ve değişken başına tek bir havadan değerdir.
    """
    kinds = [(Method.WRITE, variable, None) for variable in variables] + [
        (Method.READ, variable, k) for variable in variables for k in range(max_value + 1)
    ]
    splits = [(n - low, low) for low in range(0, n // 2 + 1)] if sites == 2 else [(n,)]
    for split in splits:
        for combo in itertools.product(kinds, repeat=n):
            if n and combo[0][1] != variables[0]:
                continue
            counts = {variable: 0 for variable in variables}
            values = []
            for method, variable, _ in combo:
                if method is Method.WRITE:
                    counts[variable] += 1
                    values.append(counts[variable])
                else:
                    values.append(None)
            if any(count > max_value for count in counts.values()):
                continue
            if any(
                method is Method.READ and k > counts[variable] + 1
                for method, variable, k in combo
            ):
                continue
            items = [
                (method, variable, k if value is None else value)
                for (method, variable, k), value in zip(combo, values)
            ]
            per_site, start = [], 0
            for size in split:
                per_site.append(items[start : start + size])
                start += size
            yield _build(per_site)


def template_cnfs() -> Iterator[Cnf]:
    """1-2 değişken, 1-2 cümlelik sabit şablon ailesi"""
    for num_vars in (1, 2):
        literals = [i for v in range(1, num_vars + 1) for i in (v, -v)]
        clauses = [
            list(clause)
            for size in range(1, num_vars + 1)
            for clause in itertools.combinations(literals, size)
            if len({abs(literal) for literal in clause}) == size
        ]
        for count in (1, 2):
            for chosen in itertools.combinations(clauses, count):
                yield Cnf(num_vars=num_vars, clauses=[list(clause) for clause in chosen])


def random_cnf(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> Cnf:
    num_vars = rng.randint(1, max_vars)
    clauses = []
    for _ in range(rng.randint(1, max_clauses)):
        chosen = rng.sample(range(1, num_vars + 1), rng.randint(1, min(3, num_vars)))
        clauses.append([v if rng.random() < 0.5 else -v for v in chosen])
    return Cnf(num_vars=num_vars, clauses=clauses)


@st.composite
def executions(draw, max_ops: int = 12, max_sites: int = 3):
    """Sıralı seq'li rastgele execution'lar (differentiated olmaları gerekmez)"""
    sites = draw(st.integers(min_value=1, max_value=max_sites))
    raw = draw(
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=sites - 1),
                st.sampled_from([Method.WRITE, Method.READ]),
                st.sampled_from(["x", "y", "z_1"]),
                st.integers(min_value=0, max_value=9),
            ),
            max_size=max_ops,
        )
    )
    seq = [0] * sites
    events = []
    for site, method, variable, value in raw:
        events.append(
            Operation(site=site, method=method, variable=variable, value=value, seq=seq[site])
        )
        seq[site] += 1
    return Execution(events=tuple(events))


@st.composite
def differentiated_histories(draw, max_ops: int = 8):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    return random_history(random.Random(seed), max_ops=max_ops)
