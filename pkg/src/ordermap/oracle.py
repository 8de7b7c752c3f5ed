"""Independence oracles.

All oracles answer I(x, z, y) queries on disjoint variable sets and count
how often they were asked.  DagOracle answers from d-separation on a known
DAG, TableOracle from an exact joint probability table, DataOracle from a
G-squared test on records, and CachedOracle memoizes any of them under the
query's canonical key.
"""

from __future__ import annotations

import warnings
from typing import Iterable

import numpy as np
from scipy.stats import chi2

from .core import Dag, d_separated


def canonical_key(x: Iterable[int], z: Iterable[int], y: Iterable[int]) -> tuple:
    """Symmetry-normalized key: I(x, z, y) and I(y, z, x) collide."""
    xs, ys = tuple(sorted(x)), tuple(sorted(y))
    if ys < xs:
        xs, ys = ys, xs
    return (xs, tuple(sorted(z)), ys)


class Oracle:
    """Base class.  Subclasses implement _decide on validated frozensets."""

    def __init__(self):
        self.query_count = 0

    def query(self, x: Iterable[int], z: Iterable[int], y: Iterable[int]) -> bool:
        x, z, y = frozenset(x), frozenset(z), frozenset(y)
        if not x or not y:
            raise ValueError("x and y must be non-empty")
        if x & y or x & z or y & z:
            raise ValueError("x, z, y must be pairwise disjoint")
        self.query_count += 1
        return self._decide(x, z, y)

    def _decide(self, x: frozenset, z: frozenset, y: frozenset) -> bool:
        raise NotImplementedError


class DagOracle(Oracle):
    """Ground-truth oracle: the model is exactly what the DAG d-separates."""

    def __init__(self, truth: Dag):
        super().__init__()
        self.truth = truth
        self.n = truth.n

    def _decide(self, x, z, y):
        return d_separated(self.truth, x, z, y)


class TableOracle(Oracle):
    """Exact oracle over a dense joint table.

    Independence holds iff for every z-configuration with positive mass the
    conditional joint factorizes within epsilon, entrywise.
    """

    def __init__(self, table: np.ndarray, epsilon: float = 1e-9):
        super().__init__()
        table = np.asarray(table, dtype=float)
        if table.ndim < 2:
            raise ValueError("joint table needs at least two variables")
        if np.any(table < 0):
            raise ValueError("joint table has a negative entry")
        if abs(float(table.sum()) - 1.0) > 1e-9:
            raise ValueError(f"joint table sums to {table.sum()!r}, not 1")
        self.table = table
        self.n = table.ndim
        self.epsilon = float(epsilon)
        # zero cells break boundary uniqueness; flag them loudly but proceed
        self.positivity_warning = bool(np.any(table == 0.0))
        if self.positivity_warning:
            warnings.warn("joint table has zero entries; minimal boundaries may not be unique")

    def _decide(self, x, z, y):
        xs, ys, zs = sorted(x), sorted(y), sorted(z)
        keep = xs + ys + zs
        drop = tuple(v for v in range(self.n) if v not in set(keep))
        marg = self.table.sum(axis=drop) if drop else self.table
        kept_sorted = sorted(keep)
        marg = np.transpose(marg, [kept_sorted.index(v) for v in keep])
        nx = int(np.prod(marg.shape[: len(xs)], dtype=int))
        ny = int(np.prod(marg.shape[len(xs): len(xs) + len(ys)], dtype=int))
        pxyz = marg.reshape(nx, ny, -1)
        pz = pxyz.sum(axis=(0, 1))
        pxz = pxyz.sum(axis=1)
        pyz = pxyz.sum(axis=0)
        for k in range(pxyz.shape[2]):
            if pz[k] <= 0.0:
                continue
            gap = np.abs(pxyz[:, :, k] / pz[k] - np.outer(pxz[:, k], pyz[:, k]) / (pz[k] * pz[k]))
            if float(gap.max()) > self.epsilon:
                return False
        return True


class DataOracle(Oracle):
    """G-squared conditional independence test on integer records.

    Strata are the observed z-configurations; within each stratum only the
    observed x and y categories enter the contingency table, so zero-expected
    cells are skipped and the degrees of freedom shrink with them.
    """

    def __init__(self, rows: np.ndarray, arities: Iterable[int], alpha: float = 0.05):
        super().__init__()
        rows = np.asarray(rows, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError("need a non-empty 2-d array of records")
        self.arities = tuple(int(a) for a in arities)
        if rows.shape[1] != len(self.arities):
            raise ValueError("record width does not match the arity list")
        if np.any(rows < 0) or np.any(rows >= np.asarray(self.arities)):
            raise ValueError("record value out of range for its arity")
        self.rows = rows
        self.n = len(self.arities)
        self.alpha = float(alpha)
        self.test_count = 0

    def _code(self, cols: list[int]) -> np.ndarray:
        code = np.zeros(self.rows.shape[0], dtype=np.int64)
        for v in cols:
            code = code * self.arities[v] + self.rows[:, v]
        return code

    def _decide(self, x, z, y):
        self.test_count += 1
        xc = self._code(sorted(x))
        yc = self._code(sorted(y))
        zc = self._code(sorted(z))
        g2 = 0.0
        dof = 0
        for zv in np.unique(zc):
            m = zc == zv
            xi, xinv = np.unique(xc[m], return_inverse=True)
            yi, yinv = np.unique(yc[m], return_inverse=True)
            if len(xi) < 2 or len(yi) < 2:
                continue
            obs = np.zeros((len(xi), len(yi)))
            np.add.at(obs, (xinv, yinv), 1.0)
            exp = np.outer(obs.sum(axis=1), obs.sum(axis=0)) / obs.sum()
            pos = obs > 0
            g2 += 2.0 * float((obs[pos] * np.log(obs[pos] / exp[pos])).sum())
            dof += (len(xi) - 1) * (len(yi) - 1)
        if dof <= 0:
            return True
        return float(chi2.sf(g2, dof)) >= self.alpha


class CachedOracle(Oracle):
    """Memoizing wrapper; the inner oracle only sees cache misses."""

    def __init__(self, inner: Oracle):
        super().__init__()
        self.inner = inner
        self.n = getattr(inner, "n", None)
        self.cache: dict[tuple, bool] = {}
        self.hit_count = 0

    def _decide(self, x, z, y):
        key = canonical_key(x, z, y)
        hit = self.cache.get(key)
        if hit is not None:
            self.hit_count += 1
            return hit
        val = self.inner.query(x, z, y)
        self.cache[key] = val
        return val
