"""Definition-literal reference implementations used to cross-check the
package.  Everything here is deliberately naive — exhaustive enumeration over
configurations, paths, and subsets — so that agreement with the fast
implementations is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np

from ordermap import Dag


def table_independent(table: np.ndarray, x, z, y, eps: float = 1e-9) -> bool:
    """I(x, z, y) checked directly from the joint table: for every z-config
    with positive mass, P(x,y|z) must factor into P(x|z)P(y|z) cell by cell."""
    x, z, y = sorted(x), sorted(z), sorted(y)
    arities = table.shape
    axes = list(range(table.ndim))

    def marg(keep, fix):
        # sum out everything not kept, then pick the fixed configuration
        out = table.sum(axis=tuple(a for a in axes if a not in keep))
        idx = tuple(fix[v] for v in sorted(keep))
        return float(out[idx])

    for zcfg in itertools.product(*(range(arities[v]) for v in z)):
        fix = dict(zip(z, zcfg))
        pz = marg(z, fix) if z else 1.0
        if pz <= 0:
            continue
        for xcfg in itertools.product(*(range(arities[v]) for v in x)):
            for ycfg in itertools.product(*(range(arities[v]) for v in y)):
                fx = {**fix, **dict(zip(x, xcfg))}
                fy = {**fix, **dict(zip(y, ycfg))}
                fxy = {**fx, **dict(zip(y, ycfg))}
                pxyz = marg(x + y + z, fxy)
                pxz = marg(x + z, fx)
                pyz = marg(y + z, fy)
                if abs(pxyz / pz - (pxz / pz) * (pyz / pz)) > eps:
                    return False
    return True


def exhaustive_boundary(oracle, u: int, preds) -> frozenset:
    """Smallest B ⊆ preds with I(u, B, preds\\B), by trying every subset in
    ascending size; asserts the minimum is unique."""
    preds = sorted(preds)
    rest = frozenset(preds)
    for size in range(len(preds) + 1):
        hits = [frozenset(c) for c in itertools.combinations(preds, size)
                if not (rest - frozenset(c)) or oracle.query({u}, frozenset(c), rest - frozenset(c))]
        if hits:
            assert len(hits) == 1, f"minimal boundary of {u} not unique: {hits}"
            return hits[0]
    raise AssertionError("unreachable: full predecessor set always works")


def _adjacency(dag: Dag):
    adj: dict[int, set[int]] = {v: set() for v in range(dag.n)}
    for p, c in dag.arcs:
        adj[p].add(c)
        adj[c].add(p)
    return adj


def _descendants(dag: Dag, v: int) -> set[int]:
    seen: set[int] = set()
    stack = [v]
    while stack:
        u = stack.pop()
        for p, c in dag.arcs:
            if p == u and c not in seen:
                seen.add(c)
                stack.append(c)
    return seen


def path_d_separated(dag: Dag, x, z, y) -> bool:
    """Literal path rule: every undirected simple path from x to y must hold
    a blocking node — a head-to-head node whose closure (itself plus
    descendants) avoids z, or a non-head-to-head node inside z."""
    x, z, y = frozenset(x), frozenset(z), frozenset(y)
    adj = _adjacency(dag)
    arcs = set(dag.arcs)

    def blocked(path) -> bool:
        for k in range(1, len(path) - 1):
            a, w, b = path[k - 1], path[k], path[k + 1]
            head_to_head = (a, w) in arcs and (b, w) in arcs
            if head_to_head:
                if w not in z and not (_descendants(dag, w) & z):
                    return True
            elif w in z:
                return True
        return False

    def paths(u, goal, path):
        if u in goal and len(path) > 1:
            yield tuple(path)
            return
        for w in adj[u]:
            if w not in path:
                path.append(w)
                yield from paths(w, goal, path)
                path.pop()

    for s in x:
        for path in paths(s, y, [s]):
            if not blocked(path):
                return False
    return True


def naive_maximal_cliques(dag: Dag) -> list[frozenset]:
    """All maximal pairwise-adjacent sets of size >= 3, by subset enumeration."""
    adj = _adjacency(dag)
    nodes = range(dag.n)

    def is_clique(c):
        return all(v in adj[u] for u, v in itertools.combinations(c, 2))

    cliques = [frozenset(c)
               for size in range(3, dag.n + 1)
               for c in itertools.combinations(nodes, size)
               if is_clique(c)]
    return sorted((c for c in cliques
                   if not any(c < d for d in cliques)),
                  key=lambda c: tuple(sorted(c)))


def singleton_ci_set(oracle, n: int) -> frozenset:
    """Every true singleton statement, as canonical (x, z, y) triples with
    x < y; the frozen fixture expectations are asserted against this."""
    out = set()
    for u, v in itertools.combinations(range(n), 2):
        others = [w for w in range(n) if w not in (u, v)]
        for size in range(len(others) + 1):
            for zc in itertools.combinations(others, size):
                if oracle.query({u}, frozenset(zc), {v}):
                    out.add((u, tuple(sorted(zc)), v))
    return frozenset(out)
