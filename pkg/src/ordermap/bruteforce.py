"""Exhaustive enumeration over orderings for small variable counts.

Used as the independent referee for the search: the sweep builds the causal
input list of every permutation and records the arc-count landscape, so
optimality and containment claims can be checked without trusting the
operators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .core import (
    Dag,
    Ordering,
    SizeLimitError,
    VarSet,
    boundary_of,
    dag_from_boundaries,
    represented_model,
    statement,
)

SWEEP_LIMIT = 8
MODEL_LIMIT = 6


@dataclass(frozen=True)
class SweepRecord:
    order: Ordering
    arc_count: int
    boundaries: tuple[VarSet, ...]  # aligned with order.seq

    @cached_property
    def dag(self) -> Dag:
        return dag_from_boundaries(self.order, dict(zip(self.order.seq, self.boundaries)))


@dataclass
class OrderingSweep:
    n: int
    records: list[SweepRecord]
    min_count: int
    argmin: list[Ordering]


def sweep(oracle, n: int) -> OrderingSweep:
    """Causal-input-list DAGs of all n! orderings.

    Boundaries are memoized on (variable, predecessor set), which the
    records share, so the sweep costs far fewer oracle calls than n!·n
    boundary derivations.
    """
    if n > SWEEP_LIMIT:
        raise SizeLimitError(f"sweep covers up to {SWEEP_LIMIT} variables, got {n}")
    cache: dict[tuple[int, VarSet], VarSet] = {}
    records: list[SweepRecord] = []
    for perm in itertools.permutations(range(n)):
        bounds = []
        for k, u in enumerate(perm):
            key = (u, frozenset(perm[:k]))
            if key not in cache:
                cache[key] = boundary_of(oracle, u, key[1])
            bounds.append(cache[key])
        records.append(SweepRecord(Ordering(perm), sum(map(len, bounds)), tuple(bounds)))
    min_count = min(r.arc_count for r in records)
    argmin = [r.order for r in records if r.arc_count == min_count]
    return OrderingSweep(n=n, records=records, min_count=min_count, argmin=argmin)


def oracle_singleton_model(oracle, n: int, limit: int = MODEL_LIMIT):
    """All statements I(x, Z, y) over singletons the oracle affirms."""
    if n > limit:
        raise SizeLimitError(f"model enumeration covers up to {limit} variables, got {n}")
    out = set()
    for x, y in itertools.combinations(range(n), 2):
        rest = sorted(set(range(n)) - {x, y})
        for r in range(len(rest) + 1):
            for z in itertools.combinations(rest, r):
                if oracle.query({x}, z, {y}):
                    out.add(statement({x}, z, {y}))
    return frozenset(out)


def model_contains(dag_a: Dag, dag_b: Dag, limit: int = MODEL_LIMIT) -> bool:
    """True iff every singleton statement dag_a represents, dag_b does too."""
    if dag_a.n != dag_b.n:
        raise ValueError("DAGs must share the node set")
    return represented_model(dag_a, limit=limit) <= represented_model(dag_b, limit=limit)


def perfect_map_exists(oracle, n: int):
    """A sweep DAG representing exactly the oracle's singleton model, or
    None when no ordering produces one."""
    if n > MODEL_LIMIT:
        raise SizeLimitError(f"perfect-map search covers up to {MODEL_LIMIT} variables, got {n}")
    target = oracle_singleton_model(oracle, n)
    sw = sweep(oracle, n)
    seen: set[frozenset] = set()
    for rec in sw.records:
        fingerprint = frozenset(zip(rec.order.seq, rec.boundaries))
        if fingerprint in seen:
            continue
        seen.add(fingerprint)
        if represented_model(rec.dag) == target:
            return rec.dag
    return None
