"""Ordering optimization: clique work-set management and the main loop.

The driver keeps a set S of candidate cliques and a set R of cliques whose
reduction is blocked by restrictions from other cliques.  Each round picks
the most promising clique, tries to reverse the ancestor block of its first
node, gathers each of the clique's free sets into a contiguous run, and
searches the free-set permutations for an ordering that drops an arc.
Removed arcs split
the affected cliques; when S runs dry, R is re-examined for cliques whose
restrictions have meanwhile disappeared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

from .core import (
    BoundaryMap,
    Dag,
    Ordering,
    SizeLimitError,
    VarSet,
    build_causal_input_list,
    dag_from_boundaries,
    is_imap,
    maximal_cliques,
    represented_model,
    skeleton,
)
from .operators import (
    DEFAULT_MAX_PERMS,
    PermutationBudgetError,
    RejectedSwapError,
    ancestor_set,
    clique_reunion,
    reversal,
    unclique,
)


class Restriction(NamedTuple):
    i: int
    j: int


_clique_ids = itertools.count(1)


@dataclass(frozen=True)
class CliqueRecord:
    members: VarSet
    id: int = field(default_factory=lambda: next(_clique_ids))

    def key(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


def find_restrictions(bmap: BoundaryMap) -> list[Restriction]:
    """All pairs (i, j) with i in B_j whose boundaries do not nest, i.e.
    adjacent occurrences of which cannot be swapped admissibly."""
    out = [
        Restriction(i, j)
        for j, bs in bmap.items()
        for i in bs
        if bmap[i] != bs - {i}
    ]
    out.sort()
    return out


def _members(cl) -> VarSet:
    return cl.members if isinstance(cl, CliqueRecord) else frozenset(cl)


def clique_restricted_by_clique(cl, restrictions, cliques) -> bool:
    """True iff some member of cl is tied by a restriction to an outside
    node and the pair sits together inside one of the given cliques.  The
    direction of the restriction pair does not matter."""
    members = _members(cl)
    pools = [_members(c) for c in cliques]
    for i, j in restrictions:
        for a, b in ((i, j), (j, i)):
            if a in members and b not in members:
                if any(a in pool and b in pool for pool in pools):
                    return True
    return False


def _first_member(bmap: BoundaryMap, members: VarSet) -> int:
    # the clique member preceding all others is the one with no
    # fellow member in its own boundary
    for m in sorted(members):
        if not bmap[m] & members:
            return m
    raise ValueError(f"{sorted(members)} has no first member; not a clique?")


def clique_priority(cl, S, dag: Dag, bmap: BoundaryMap) -> int:
    """Classes, best first: 1 = touched by no restriction at all; 2 = no
    S-clique inside the ancestor set of the clique's first node and not
    restricted by another S-clique; 3 = merely not restricted by another
    S-clique; 4 = the rest."""
    members = _members(cl)
    restrictions = find_restrictions(bmap)
    if not any(i in members or j in members for i, j in restrictions):
        return 1
    others = [c for c in S if _members(c) != members]
    restricted = clique_restricted_by_clique(members, restrictions, others)
    if not restricted:
        block = ancestor_set(dag, _first_member(bmap, members))
        if not any(_members(c) <= block for c in others):
            return 2
        return 3
    return 4


def split_cliques(S, R, removed_arc: tuple[int, int]):
    """Replace, in both sets, every clique containing the removed arc's two
    endpoints by the endpoint-deleted remnants of size three or more."""
    a, b = removed_arc
    ab = {a, b}

    def split_one(records):
        out: dict[VarSet, CliqueRecord] = {}
        for rec in records:
            if ab <= rec.members:
                for drop in (a, b):
                    rest = rec.members - {drop}
                    if len(rest) >= 3 and rest not in out:
                        out[rest] = CliqueRecord(rest)
            else:
                out.setdefault(rec.members, rec)
        return out

    new_s = split_one(S)
    new_r = {m: r for m, r in split_one(R).items() if m not in new_s}
    return list(new_s.values()), list(new_r.values())


@dataclass
class TraceStep:
    op: str
    clique: tuple[int, ...]
    order_before: tuple[int, ...]
    order_after: tuple[int, ...]
    bmap_before: dict[int, tuple[int, ...]]
    bmap_after: dict[int, tuple[int, ...]]
    removed_arcs: tuple[tuple[int, int], ...] = ()
    queries: int = 0
    applied: bool = True
    note: str | None = None


@dataclass
class RunTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def record(self, op, clique, order_before, bmap_before, order_after, bmap_after,
               removed_arcs=(), queries=0, applied=True, note=None):
        self.steps.append(TraceStep(
            op=op,
            clique=tuple(sorted(clique)),
            order_before=order_before.seq,
            order_after=order_after.seq,
            bmap_before={v: tuple(sorted(b)) for v, b in bmap_before.items()},
            bmap_after={v: tuple(sorted(b)) for v, b in bmap_after.items()},
            removed_arcs=tuple(removed_arcs),
            queries=queries,
            applied=applied,
            note=note,
        ))


@dataclass
class RunStats:
    queries: int = 0
    permutations: int = 0
    splits: int = 0
    iterations: int = 0


@dataclass
class LearnResult:
    order: Ordering
    bmap: BoundaryMap
    dag: Dag
    trace: RunTrace
    stats: RunStats
    incomplete: bool = False


ITERATION_CEILING = 10_000


def optimize_ordering(oracle, order: Ordering, max_perms: int = DEFAULT_MAX_PERMS) -> LearnResult:
    """Drive the clique operators from the given initial ordering until no
    candidate clique remains.

    Budget-exceeded cliques are abandoned and flag the result incomplete.
    The returned DAG is the causal input list of the final ordering, hence a
    minimal I-map of the oracle's model by construction.
    """
    start_queries = oracle.query_count
    bmap = build_causal_input_list(oracle, order)
    dag = dag_from_boundaries(order, bmap)
    trace = RunTrace()
    stats = RunStats()
    incomplete = False

    S = {c: CliqueRecord(c) for c in maximal_cliques(dag)}
    R: dict[VarSet, CliqueRecord] = {}

    def is_clique(members: VarSet) -> bool:
        return all(dag.adjacent(u, v) for u, v in itertools.combinations(members, 2))

    def prune():
        for pool in (S, R):
            for m in [m for m in pool if not is_clique(m)]:
                del pool[m]

    while True:
        stats.iterations += 1
        if stats.iterations > ITERATION_CEILING:
            raise RuntimeError("clique loop exceeded the iteration ceiling")
        prune()
        if not S:
            restrictions = find_restrictions(bmap)
            released = [
                m for m in R
                if not clique_restricted_by_clique(
                    m, restrictions, [o for o in (*S, *R) if o != m])
            ]
            if not released:
                break
            for m in released:
                S[m] = R.pop(m)
            continue

        members = min(
            S,
            key=lambda m: (clique_priority(S[m], S.values(), dag, bmap), tuple(sorted(m))),
        )
        record = S[members]
        skel_at_pick = skeleton(dag)
        arcs_at_pick = dag.arc_count

        rev = reversal(oracle, order, bmap, members)
        if rev.applied:
            trace.record("reversal", members, order, bmap, rev.order, rev.bmap,
                         queries=rev.queries_used)
            order, bmap = rev.order, rev.bmap
            dag = dag_from_boundaries(order, bmap)
        else:
            trace.record("reversal", members, order, bmap, order, bmap,
                         queries=rev.queries_used, applied=False, note=rev.reason)

        blocked = False
        try:
            reunion = clique_reunion(oracle, order, bmap, members)
            if reunion.moved:
                trace.record("cliquereunion", members, order, bmap,
                             reunion.order, reunion.bmap, queries=reunion.queries_used)
            order, bmap = reunion.order, reunion.bmap
            dag = dag_from_boundaries(order, bmap)
        except RejectedSwapError as exc:
            blocked = True
            trace.record("cliquereunion", members, order, bmap, order, bmap,
                         applied=False, note=f"blocked at pair {exc.pair}")

        if not blocked:
            # gathering the clique can itself drop arcs (admissible swaps only
            # ever grow the model); in that case the permutation search has
            # nothing left to act on
            if all(dag.adjacent(u, v) for u, v in itertools.combinations(members, 2)):
                try:
                    before_q = oracle.query_count
                    result = unclique(oracle, order, bmap, members, max_perms=max_perms)
                    stats.permutations += result.permutations_tried
                    trace.record("unclique", members, order, bmap, result.order, result.bmap,
                                 removed_arcs=result.removed_arcs,
                                 queries=oracle.query_count - before_q,
                                 applied=result.removed is not None)
                    order, bmap = result.order, result.bmap
                    dag = dag_from_boundaries(order, bmap)
                except PermutationBudgetError as exc:
                    incomplete = True
                    trace.record("unclique", members, order, bmap, order, bmap,
                                 applied=False,
                                 note=f"permutation budget exceeded ({exc.total})")
                except ValueError:
                    # regathering can fail to settle when the crossing swaps
                    # keep rewriting the free-set partition
                    trace.record("unclique", members, order, bmap, order, bmap,
                                 applied=False, note="free sets not contiguous")
            else:
                trace.record("unclique", members, order, bmap, order, bmap,
                             applied=False, note="clique dissolved while gathering")

        new_skel = skeleton(dag)
        removed_pairs = skel_at_pick - new_skel
        if removed_pairs:
            s_list, r_list = list(S.values()), list(R.values())
            for pair in sorted(tuple(sorted(p)) for p in removed_pairs):
                s_list, r_list = split_cliques(s_list, r_list, pair)
                stats.splits += 1
            S = {r.members: r for r in s_list}
            R = {r.members: r for r in r_list if r.members not in S}
        # swaps may also have added arcs elsewhere; any clique born from a
        # fresh arc would be invisible to splitting
        added_pairs = new_skel - skel_at_pick
        if added_pairs:
            for c in maximal_cliques(dag):
                if c in S or c in R or c == members:
                    continue
                if any(pair <= c for pair in added_pairs):
                    S[c] = CliqueRecord(c)

        S.pop(members, None)
        if is_clique(members):
            if dag.arc_count < arcs_at_pick:
                # a removal that spared every member pair leaves the clique
                # whole; requeue it so the shrunken state gets another pass
                # (the strict arc decrease bounds how often this can happen)
                S[members] = record
            else:
                restrictions = find_restrictions(bmap)
                pool = [m for m in (*S, *R) if m != members]
                if clique_restricted_by_clique(members, restrictions, pool):
                    R[members] = record

    stats.queries = oracle.query_count - start_queries
    return LearnResult(order=order, bmap=bmap, dag=dag, trace=trace, stats=stats,
                       incomplete=incomplete)


@dataclass
class VerifyReport:
    ok: bool
    checked_steps: int
    failures: list[str] = field(default_factory=list)


def _step_dag(order_seq, bmap_ser) -> Dag:
    order = Ordering(tuple(order_seq))
    bmap = {int(v): frozenset(b) for v, b in bmap_ser.items()}
    return dag_from_boundaries(order, bmap)


def verify_trace(trace: RunTrace, oracle, limit: int = 6) -> VerifyReport:
    """Check the recorded run step by step: the singleton represented model
    must never shrink, reversals must leave it exactly unchanged, and the
    final DAG must be an I-map of the oracle."""
    failures: list[str] = []
    steps = trace.steps
    final_dag = None
    for idx, step in enumerate(steps):
        before = _step_dag(step.order_before, step.bmap_before)
        after = _step_dag(step.order_after, step.bmap_after)
        if before.n > limit:
            raise SizeLimitError(
                f"trace verification covers up to {limit} variables, got {before.n}")
        m_before = represented_model(before)
        m_after = represented_model(after)
        if not m_before <= m_after:
            lost = sorted(m_before - m_after)[:3]
            failures.append(f"step {idx} ({step.op}): model shrank, lost {lost}")
        if step.op == "reversal" and step.applied and m_before != m_after:
            failures.append(f"step {idx} (reversal): model changed")
        final_dag = after
    if final_dag is not None:
        if not is_imap(final_dag, oracle, limit=limit):
            failures.append("final DAG is not an I-map of the oracle")
    return VerifyReport(ok=not failures, checked_steps=len(steps), failures=failures)
