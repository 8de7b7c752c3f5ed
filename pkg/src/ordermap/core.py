"""Orderings, boundaries, DAG construction, and graphical separation.

Variables are plain integer indices 0..n-1 throughout; mapping to names is
the concern of the file layer.  Every container here is immutable (or treated
as such), so operators can fork state freely and keep old snapshots around
for verification.
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple

VarSet = frozenset[int]

# represented_model enumerates 2^(n-2) conditioning sets per pair; above this
# many variables the enumeration is refused rather than silently attempted.
DEFAULT_MODEL_LIMIT = 7


class SizeLimitError(RuntimeError):
    """An enumeration would exceed its configured size cap."""


class Statement(NamedTuple):
    """A canonical independence statement I(x, z, y).

    x and y are interchangeable; the canonical form stores the lexicographically
    smaller side first so symmetric duplicates collapse.
    """

    x: tuple[int, ...]
    z: tuple[int, ...]
    y: tuple[int, ...]


def statement(x: Iterable[int], z: Iterable[int], y: Iterable[int]) -> Statement:
    xs, ys = tuple(sorted(x)), tuple(sorted(y))
    if ys < xs:
        xs, ys = ys, xs
    return Statement(xs, tuple(sorted(z)), ys)


class Ordering:
    """A total ordering of variables 0..n-1.  Ranks are 1-based."""

    __slots__ = ("seq", "_rank")

    def __init__(self, seq: Iterable[int]):
        self.seq = tuple(int(v) for v in seq)
        if sorted(self.seq) != list(range(len(self.seq))):
            raise ValueError(f"not a permutation of 0..{len(self.seq) - 1}: {self.seq!r}")
        self._rank = {v: r for r, v in enumerate(self.seq, start=1)}

    @property
    def n(self) -> int:
        return len(self.seq)

    def rank(self, v: int) -> int:
        return self._rank[v]

    def at(self, rank: int) -> int:
        return self.seq[rank - 1]

    def predecessors(self, v: int) -> VarSet:
        """Variables strictly before v."""
        return frozenset(self.seq[: self._rank[v] - 1])

    def swap_ranks(self, rank: int) -> "Ordering":
        """New ordering with the variables at rank and rank+1 exchanged."""
        if not 1 <= rank < self.n:
            raise ValueError(f"rank {rank} out of range for adjacent swap")
        s = list(self.seq)
        s[rank - 1], s[rank] = s[rank], s[rank - 1]
        return Ordering(s)

    def position(self) -> dict[int, int]:
        return dict(self._rank)

    def __iter__(self):
        return iter(self.seq)

    def __len__(self):
        return len(self.seq)

    def __eq__(self, other):
        return isinstance(other, Ordering) and self.seq == other.seq

    def __hash__(self):
        return hash(self.seq)

    def __repr__(self):
        return f"Ordering({list(self.seq)!r})"


# A boundary map assigns every variable the minimal subset of its ordering
# predecessors that screens it off from the rest of them.  Plain dicts keep
# the call sites light; validate_boundaries is the consistency check.
BoundaryMap = dict[int, VarSet]


def validate_boundaries(order: Ordering, bmap: BoundaryMap) -> None:
    if set(bmap) != set(order.seq):
        raise ValueError("boundary map does not cover the ordering's variables")
    for v in order.seq:
        preds = order.predecessors(v)
        if not bmap[v] <= preds:
            raise ValueError(f"boundary of {v} is not a subset of its predecessors")


class Dag:
    """Immutable DAG over variables 0..n-1."""

    __slots__ = ("n", "arcs", "_parents", "_children")

    def __init__(self, n: int, arcs: Iterable[tuple[int, int]]):
        self.n = int(n)
        self.arcs = frozenset((int(p), int(c)) for p, c in arcs)
        parents = [set() for _ in range(self.n)]
        children = [set() for _ in range(self.n)]
        for p, c in self.arcs:
            if not (0 <= p < self.n and 0 <= c < self.n) or p == c:
                raise ValueError(f"bad arc ({p}, {c}) for n={self.n}")
            parents[c].add(p)
            children[p].add(c)
        self._parents = tuple(frozenset(s) for s in parents)
        self._children = tuple(frozenset(s) for s in children)
        self._check_acyclic()

    def _check_acyclic(self):
        indeg = [len(self._parents[v]) for v in range(self.n)]
        queue = [v for v in range(self.n) if indeg[v] == 0]
        seen = 0
        while queue:
            v = queue.pop()
            seen += 1
            for c in self._children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if seen != self.n:
            raise ValueError("arcs contain a directed cycle")

    def parents(self, v: int) -> VarSet:
        return self._parents[v]

    def children(self, v: int) -> VarSet:
        return self._children[v]

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs or (v, u) in self.arcs

    @property
    def arc_count(self) -> int:
        return len(self.arcs)

    def __eq__(self, other):
        return isinstance(other, Dag) and self.n == other.n and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.n, self.arcs))

    def __repr__(self):
        return f"Dag({self.n}, {sorted(self.arcs)!r})"


def descendants(dag: Dag, v: int) -> VarSet:
    """All variables reachable from v along arcs, v itself excluded."""
    seen: set[int] = set()
    stack = list(dag.children(v))
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(dag.children(u))
    return frozenset(seen)


def _check_query(dag: Dag, x: VarSet, z: VarSet, y: VarSet) -> None:
    if not x or not y:
        raise ValueError("x and y must be non-empty")
    if x & y or x & z or y & z:
        raise ValueError("x, z, y must be pairwise disjoint")
    for v in x | y | z:
        if not 0 <= v < dag.n:
            raise ValueError(f"variable {v} out of range")


def d_separated(dag: Dag, x: Iterable[int], z: Iterable[int], y: Iterable[int]) -> bool:
    """True iff every undirected path between x and y is blocked given z.

    Computed as non-reachability in the moralized ancestral subgraph of
    x, y and z, which is equivalent to the path-blocking definition.
    """
    x, z, y = frozenset(x), frozenset(z), frozenset(y)
    _check_query(dag, x, z, y)

    closure: set[int] = set()
    stack = list(x | y | z)
    while stack:
        v = stack.pop()
        if v in closure:
            continue
        closure.add(v)
        stack.extend(dag.parents(v))

    neighbours: dict[int, set[int]] = {v: set() for v in closure}
    for c in closure:
        ps = dag.parents(c)  # inside the closure by construction
        for p in ps:
            neighbours[p].add(c)
            neighbours[c].add(p)
        for p, q in itertools.combinations(ps, 2):
            neighbours[p].add(q)
            neighbours[q].add(p)

    seen = set(x)
    stack = list(x)
    while stack:
        v = stack.pop()
        for w in neighbours[v]:
            if w in z or w in seen:
                continue
            if w in y:
                return False
            seen.add(w)
            stack.append(w)
    return True


def boundary_of(oracle, u: int, preds: Iterable[int]) -> VarSet:
    """Smallest B subseteq preds with I(u, B, preds - B).

    Greedy single-element removal in ascending variable order, repeated until
    a fixpoint.  Under positivity the minimal set is unique and one pass
    already lands on it; the extra pass is a cheap safeguard for oracles that
    are only approximately consistent.
    """
    preds = frozenset(preds)
    work = set(preds)
    changed = True
    while changed:
        changed = False
        for a in sorted(work):
            cand = work - {a}
            rest = preds - cand  # always contains a, never empty
            if oracle.query({u}, cand, rest):
                work.discard(a)
                changed = True
    return frozenset(work)


def build_causal_input_list(oracle, order: Ordering) -> BoundaryMap:
    """Boundary of every variable against its ordering predecessors."""
    bmap: BoundaryMap = {}
    for r, u in enumerate(order.seq):
        bmap[u] = boundary_of(oracle, u, order.seq[:r])
    return bmap


def dag_from_boundaries(order: Ordering, bmap: BoundaryMap) -> Dag:
    validate_boundaries(order, bmap)
    return Dag(order.n, [(p, u) for u in order.seq for p in bmap[u]])


def represented_model(dag: Dag, limit: int = DEFAULT_MODEL_LIMIT, full: bool = False) -> frozenset[Statement]:
    """Every independence statement the DAG represents, canonicalized.

    The default enumerates singleton x, y against all conditioning subsets,
    which is what containment checks between DAG models need (d-separation
    is compositional).  full=True enumerates compound x and y as well.
    """
    if dag.n > limit:
        raise SizeLimitError(f"model enumeration needs n <= {limit}, got {dag.n}")
    stmts: set[Statement] = set()
    if full:
        for assign in itertools.product(range(4), repeat=dag.n):
            x = frozenset(v for v, a in enumerate(assign) if a == 1)
            y = frozenset(v for v, a in enumerate(assign) if a == 2)
            z = frozenset(v for v, a in enumerate(assign) if a == 3)
            if not x or not y:
                continue
            if d_separated(dag, x, z, y):
                stmts.add(statement(x, z, y))
        return frozenset(stmts)
    for u, v in itertools.combinations(range(dag.n), 2):
        rest = [w for w in range(dag.n) if w != u and w != v]
        for k in range(len(rest) + 1):
            for z in itertools.combinations(rest, k):
                if d_separated(dag, {u}, z, {v}):
                    stmts.add(statement({u}, z, {v}))
    return frozenset(stmts)


def is_imap(dag: Dag, oracle, limit: int = DEFAULT_MODEL_LIMIT) -> bool:
    """True iff every statement the DAG represents holds in the oracle."""
    return all(oracle.query(s.x, s.z, s.y) for s in sorted(represented_model(dag, limit)))


def is_minimal_imap(dag: Dag, oracle, limit: int = DEFAULT_MODEL_LIMIT) -> bool:
    """True iff the DAG is an I-map and no single arc can be dropped."""
    if not is_imap(dag, oracle, limit):
        return False
    for arc in sorted(dag.arcs):
        if is_imap(Dag(dag.n, dag.arcs - {arc}), oracle, limit):
            return False
    return True


def skeleton(dag: Dag) -> frozenset[VarSet]:
    return frozenset(frozenset(arc) for arc in dag.arcs)


def maximal_cliques(dag: Dag) -> list[VarSet]:
    """Maximal cliques of the skeleton with at least three members.

    Bron-Kerbosch with pivoting; output sorted by member tuple so callers see
    a stable inventory.
    """
    adj: dict[int, set[int]] = {v: set() for v in range(dag.n)}
    for p, c in dag.arcs:
        adj[p].add(c)
        adj[c].add(p)
    out: list[VarSet] = []

    def expand(r: set[int], p: set[int], x: set[int]):
        if not p and not x:
            if len(r) >= 3:
                out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(set(), set(range(dag.n)), set())
    return sorted(out, key=lambda c: tuple(sorted(c)))
