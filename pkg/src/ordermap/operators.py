"""Ordering operators: adjacent swaps, shifts, block reversal, clique
reunion, and bounded within-clique permutation search (unclique).

Operators are functional: they take an (ordering, boundary map) pair and
return fresh values.  Every exit point keeps the boundary map equal to the
causal input list of the returned ordering, so callers can chain operators
without re-deriving state.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .core import (
    BoundaryMap,
    Dag,
    Ordering,
    VarSet,
    boundary_of,
    dag_from_boundaries,
)


class RejectedSwapError(RuntimeError):
    """An inadmissible swap was requested without force.

    The offending pair is a restriction: the earlier variable sits in the
    later one's boundary and their boundaries do not nest.
    """

    def __init__(self, i: int, j: int):
        self.pair = (i, j)
        super().__init__(f"swap of ({i}, {j}) is blocked by a restriction")


class PermutationBudgetError(RuntimeError):
    def __init__(self, clique, total: int, max_perms: int):
        self.clique = tuple(sorted(clique))
        self.total = total
        super().__init__(
            f"unclique on {self.clique} needs {total} permutations, cap is {max_perms}"
        )


@dataclass
class SwapOutcome:
    order: Ordering
    bmap: BoundaryMap
    forced: bool
    connected: bool
    queries_used: int


@dataclass
class ReversalOutcome:
    applied: bool
    order: Ordering
    bmap: BoundaryMap
    reason: str | None = None
    queries_used: int = 0


@dataclass
class ReunionOutcome:
    order: Ordering
    bmap: BoundaryMap
    moved: bool
    queries_used: int


@dataclass
class UncliqueResult:
    removed: tuple[int, int] | None
    order: Ordering
    bmap: BoundaryMap
    permutations_tried: int
    removed_arcs: tuple[tuple[int, int], ...] = field(default=())


def _require_adjacent(order: Ordering, i: int, j: int) -> None:
    if order.rank(i) + 1 != order.rank(j):
        raise ValueError(f"{i} must immediately precede {j} in the ordering")


def _is_clique(bmap: BoundaryMap, clique: VarSet) -> bool:
    return all(u in bmap[v] or v in bmap[u]
               for u, v in itertools.combinations(clique, 2))


def _require_clique(bmap: BoundaryMap, clique: VarSet) -> None:
    for u, v in itertools.combinations(sorted(clique), 2):
        if u not in bmap[v] and v not in bmap[u]:
            raise ValueError(f"{sorted(clique)} is not a clique: {u} and {v} are not adjacent")


def _skel(bmap: BoundaryMap) -> frozenset[VarSet]:
    return frozenset(frozenset((u, p)) for u, bs in bmap.items() for p in bs)


def swap_admissible(order: Ordering, bmap: BoundaryMap, i: int, j: int) -> bool:
    """True iff exchanging adjacent i, j cannot lose represented statements:
    either the pair is unconnected or their boundaries nest exactly."""
    _require_adjacent(order, i, j)
    return i not in bmap[j] or bmap[i] == bmap[j] - {i}


def _shrink(oracle, u: int, start: VarSet, preds: VarSet, candidates: VarSet):
    """Greedy removal fixpoint of start, testing only the given candidates.

    Elements outside candidates are pinned; the caller guarantees they belong
    to the minimal boundary.
    """
    work = set(start)
    removed: set[int] = set()
    changed = True
    while changed:
        changed = False
        for a in sorted(work & candidates):
            cand = work - {a}
            if oracle.query({u}, cand, preds - cand):
                work.discard(a)
                removed.add(a)
                changed = True
    return frozenset(work), frozenset(removed)


def apply_swap(oracle, order: Ordering, bmap: BoundaryMap, i: int, j: int,
               force: bool = False) -> SwapOutcome:
    """Exchange adjacent i and j and restore the causal input list.

    For an unconnected pair nothing else changes.  For a connected pair the
    two boundaries are recomputed inside their known supersets: i keeps
    everything of B_i - B_j plus j and sheds only tested members of B_j;
    whatever i sheds is pinned into j's boundary before j's own tests run.
    """
    _require_adjacent(order, i, j)
    admissible = swap_admissible(order, bmap, i, j)
    if not admissible and not force:
        raise RejectedSwapError(i, j)
    start_queries = oracle.query_count
    new_order = order.swap_ranks(order.rank(i))
    new_bmap = dict(bmap)
    connected = i in bmap[j]
    if connected:
        bi, bj = bmap[i], bmap[j]
        preds_i = new_order.predecessors(i)
        preds_j = new_order.predecessors(j)
        new_bi, shed = _shrink(oracle, i, (bi | bj | {j}) - {i}, preds_i, bj - {i})
        start_j = (bi | bj) - {i}
        new_bj, _ = _shrink(oracle, j, start_j, preds_j, start_j - shed)
        new_bmap[i] = new_bi
        new_bmap[j] = new_bj
        # the union of the pair's boundaries, net of the pair itself, is
        # invariant under the swap; guaranteed by the candidate bookkeeping
        assert (new_bi | new_bj) - {j} == (bi | bj) - {i}
    return SwapOutcome(
        order=new_order,
        bmap=new_bmap,
        forced=not admissible,
        connected=connected,
        queries_used=oracle.query_count - start_queries,
    )


def shift(oracle, order: Ordering, bmap: BoundaryMap, v: int, target_rank: int,
          force: bool = False) -> tuple[Ordering, BoundaryMap]:
    """Move v to target_rank through adjacent swaps.

    Raises RejectedSwapError on the first blocked swap unless force is set;
    the caller's state is untouched in that case.
    """
    if not 1 <= target_rank <= order.n:
        raise ValueError(f"target rank {target_rank} out of range")
    cur_order, cur_bmap = order, bmap
    while cur_order.rank(v) > target_rank:
        w = cur_order.at(cur_order.rank(v) - 1)
        out = apply_swap(oracle, cur_order, cur_bmap, w, v, force=force)
        cur_order, cur_bmap = out.order, out.bmap
    while cur_order.rank(v) < target_rank:
        w = cur_order.at(cur_order.rank(v) + 1)
        out = apply_swap(oracle, cur_order, cur_bmap, v, w, force=force)
        cur_order, cur_bmap = out.order, out.bmap
    return cur_order, cur_bmap


def ancestor_set(dag: Dag, c: int) -> VarSet:
    """Ancestors of c, c itself included."""
    seen: set[int] = set()
    stack = [c]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        stack.extend(dag.parents(v))
    return frozenset(seen)


def has_head_to_head(dag: Dag, within: VarSet) -> bool:
    """True iff some node in `within` has two non-adjacent parents there."""
    within = frozenset(within)
    for b in sorted(within):
        ps = sorted(dag.parents(b) & within)
        for p, q in itertools.combinations(ps, 2):
            if not dag.adjacent(p, q):
                return True
    return False


def _tail_to_tail(dag: Dag, block: VarSet):
    for e in sorted(block):
        children = sorted(dag.children(e) & block)
        for d, f in itertools.combinations(children, 2):
            if not dag.adjacent(d, f):
                return e, d, f
    return None


def _reverse_arc(oracle, order, bmap, e: int, child: int):
    """Shift child down next to e and swap them, admissibly and without
    touching the skeleton.  Returns the new state or None if blocked."""
    cur_order, cur_bmap = order, bmap
    try:
        target = cur_order.rank(e) + 1
        while cur_order.rank(child) > target:
            w = cur_order.at(cur_order.rank(child) - 1)
            out = apply_swap(oracle, cur_order, cur_bmap, w, child)
            if _skel(out.bmap) != _skel(cur_bmap):
                return None
            cur_order, cur_bmap = out.order, out.bmap
        out = apply_swap(oracle, cur_order, cur_bmap, e, child)
        if _skel(out.bmap) != _skel(cur_bmap):
            return None
        return out.order, out.bmap
    except RejectedSwapError:
        return None


def reversal(oracle, order: Ordering, bmap: BoundaryMap, clique: VarSet) -> ReversalOutcome:
    """Reverse the ancestor block of the clique's first node.

    Three stages: pull the ancestor set of the first clique node to the front
    (only unconnected swaps are needed there), clear tail-to-tail triples
    inside it through admissible arc reversals, then reverse the block's
    ranks and transpose its induced subgraph.  The operation is skipped, with
    the incoming state returned untouched, whenever it cannot be completed
    without changing the represented model: a head-to-head node in the block,
    a blocked tail-to-tail elimination, or transposed boundaries that fail
    re-derivation against the oracle.
    """
    clique = frozenset(clique)
    _require_clique(bmap, clique)
    start_queries = oracle.query_count
    dag = dag_from_boundaries(order, bmap)
    first = min(clique, key=order.rank)
    block = ancestor_set(dag, first)
    if len(block) == 1:
        # transposing a single node is the identity; gathering it to the
        # front would only wedge outsiders between the clique members
        return ReversalOutcome(False, order, bmap, "first node has no ancestors", 0)
    if has_head_to_head(dag, block):
        return ReversalOutcome(False, order, bmap, "head-to-head node in the ancestor set", 0)

    cur_order, cur_bmap = order, bmap
    try:
        for target, v in enumerate(sorted(block, key=order.rank), start=1):
            cur_order, cur_bmap = shift(oracle, cur_order, cur_bmap, v, target)
    except RejectedSwapError:
        # cannot happen with a graphoid oracle (boundaries of ancestors stay
        # inside the ancestor set) but a statistical oracle may disagree
        return ReversalOutcome(False, order, bmap, "ancestor set could not be gathered",
                               oracle.query_count - start_queries)

    k = len(block)
    budget = 4 * k * k + 4
    while True:
        budget -= 1
        if budget < 0:
            return ReversalOutcome(False, order, bmap, "tail-to-tail elimination did not settle",
                                   oracle.query_count - start_queries)
        cur_dag = dag_from_boundaries(cur_order, cur_bmap)
        triple = _tail_to_tail(cur_dag, block)
        if triple is None:
            break
        e, d, f = triple
        for child in sorted((d, f), key=cur_order.rank):
            moved = _reverse_arc(oracle, cur_order, cur_bmap, e, child)
            if moved is not None:
                cur_order, cur_bmap = moved
                break
        else:
            return ReversalOutcome(False, order, bmap, "tail-to-tail elimination blocked",
                                   oracle.query_count - start_queries)

    cur_dag = dag_from_boundaries(cur_order, cur_bmap)
    if has_head_to_head(cur_dag, block):
        return ReversalOutcome(False, order, bmap, "arc flips introduced a head-to-head",
                               oracle.query_count - start_queries)
    new_order = Ordering(tuple(reversed(cur_order.seq[:k])) + cur_order.seq[k:])
    new_bmap = dict(cur_bmap)
    for v in block:
        new_bmap[v] = cur_dag.children(v) & block
    # the transpose is only installed if it already is the causal input list;
    # otherwise some ancestor clique was reducible and reversing here would
    # not preserve the model exactly
    for v in sorted(block, key=new_order.rank):
        if boundary_of(oracle, v, new_order.predecessors(v)) != new_bmap[v]:
            return ReversalOutcome(False, order, bmap, "transposed boundaries are not minimal",
                                   oracle.query_count - start_queries)
    return ReversalOutcome(True, new_order, new_bmap, None, oracle.query_count - start_queries)


def free_sets(order: Ordering, bmap: BoundaryMap, clique: VarSet) -> list[list[int]]:
    """Partition the clique, in ordering position, into maximal runs whose
    consecutive pairs (a, b) satisfy B_a strictly inside B_b with every extra
    member x of B_b (beyond B_a and a) carrying B_x = B_b - {x}."""
    clique = frozenset(clique)
    _require_clique(bmap, clique)
    members = sorted(clique, key=order.rank)
    sets = [[members[0]]]
    for a, b in zip(members, members[1:]):
        ba, bb = bmap[a], bmap[b]
        joined = ba < bb and all(bmap[x] == bb - {x} for x in bb - ba - {a})
        if joined:
            sets[-1].append(b)
        else:
            sets.append([b])
    return sets


def _contiguous(order: Ordering, run) -> bool:
    ranks = sorted(order.rank(v) for v in run)
    return ranks == list(range(ranks[0], ranks[0] + len(ranks)))


def clique_reunion(oracle, order: Ordering, bmap: BoundaryMap, clique: VarSet) -> ReunionOutcome:
    """Gather every free set of the clique into consecutive ranks, then try
    to pull the whole clique into one run.

    Each free-set member is first shifted down to sit right after its
    free-set predecessor.  The free-set conditions make every swap on the
    way either unconnected or exactly nested, so with a graphoid oracle
    none of these shifts is ever blocked; a statistical oracle may still
    reject one, in which case RejectedSwapError propagates and the caller's
    state stands.  Once the free sets are contiguous the runs themselves
    are pulled together; those crossing swaps are not guaranteed admissible,
    and a rejection there just ends the pull — the connected swaps that did
    go through may have simplified boundaries, so the partition is
    recomputed and regathered until contiguity holds again.
    """
    clique = frozenset(clique)
    _require_clique(bmap, clique)
    start_queries = oracle.query_count
    cur_order, cur_bmap = order, bmap
    moved = False
    pull_blocked = False
    for _ in range(2 * len(clique) + 2):
        if not _is_clique(cur_bmap, clique):
            # a shift's boundary updates severed a member pair; the caller's
            # clique bookkeeping picks the dissolution up from the skeleton
            break
        fsets = free_sets(cur_order, cur_bmap, clique)
        if not all(_contiguous(cur_order, fs) for fs in fsets):
            for fs in fsets:
                for prev, b in zip(fs, fs[1:]):
                    target = cur_order.rank(prev) + 1
                    if cur_order.rank(b) != target:
                        cur_order, cur_bmap = shift(oracle, cur_order, cur_bmap, b, target)
                        moved = True
            continue
        if pull_blocked or _contiguous(cur_order, clique):
            break
        members = sorted(clique, key=cur_order.rank)
        try:
            for prev, b in zip(members, members[1:]):
                target = cur_order.rank(prev) + 1
                if cur_order.rank(b) != target:
                    cur_order, cur_bmap = shift(oracle, cur_order, cur_bmap, b, target)
                    moved = True
        except RejectedSwapError:
            pull_blocked = True
    return ReunionOutcome(cur_order, cur_bmap, moved, oracle.query_count - start_queries)


def _total_arcs(bmap: BoundaryMap) -> int:
    return sum(len(b) for b in bmap.values())


DEFAULT_MAX_PERMS = 40320


def unclique(oracle, order: Ordering, bmap: BoundaryMap, clique: VarSet,
             max_perms: int = DEFAULT_MAX_PERMS) -> UncliqueResult:
    """Search the free-set-respecting permutations of the clique for an
    ordering whose DAG drops an arc.

    Every free set must already occupy consecutive ranks (clique_reunion's
    post-state); the search rearranges each free set within its own rank
    window.  Candidates are generated lexicographically (identity first) and
    the first one with strictly fewer arcs in total is taken; the dropped
    arc may also be one reaching into the clique from outside, since member
    boundaries are free to shed outside parents.  Boundaries of clique
    members, and of every later variable whose boundary touches the clique,
    are recomputed from the oracle for each candidate.  If no candidate
    improves, the incoming state is returned with removed=None.
    """
    clique = frozenset(clique)
    _require_clique(bmap, clique)
    fsets = free_sets(order, bmap, clique)
    for fs in fsets:
        if not _contiguous(order, fs):
            raise ValueError("free sets must occupy consecutive ranks; run clique_reunion first")
    total = math.prod(math.factorial(len(fs)) for fs in fsets)
    if total > max_perms:
        raise PermutationBudgetError(clique, total, max_perms)

    starts = [min(order.rank(v) for v in fs) for fs in fsets]
    first = min(starts)
    later = [v for v in order.seq[first - 1:] if v not in clique and bmap[v] & clique]
    current_total = _total_arcs(bmap)
    old_skel = _skel(bmap)
    seq = list(order.seq)
    identity = tuple(tuple(fs) for fs in fsets)
    tried = 0
    for combo in itertools.product(*(itertools.permutations(fs) for fs in fsets)):
        if combo == identity:
            continue
        tried += 1
        cand_seq = seq[:]
        for start, perm in zip(starts, combo):
            cand_seq[start - 1 : start - 1 + len(perm)] = perm
        cand_order = Ordering(tuple(cand_seq))
        cand_bmap = dict(bmap)
        for v in sorted(clique, key=cand_order.rank):
            cand_bmap[v] = boundary_of(oracle, v, cand_order.predecessors(v))
        for v in later:
            cand_bmap[v] = boundary_of(oracle, v, cand_order.predecessors(v))
        if _total_arcs(cand_bmap) < current_total:
            # fewer arcs in total forces at least one old skeleton pair out
            dropped = sorted(
                tuple(sorted(pair, key=lambda u: order.rank(u)))
                for pair in old_skel - _skel(cand_bmap)
            )
            # dropped pairs are reported tail-first in the pre-search direction
            arcs = tuple((p, c) if p in bmap[c] else (c, p) for p, c in dropped)
            return UncliqueResult(arcs[0], cand_order, cand_bmap, tried, arcs)
    return UncliqueResult(None, order, bmap, tried)
