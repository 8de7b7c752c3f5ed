"""Synthetic benchmark: sample data from a known network, learn the
structure back, and score the skeleton against the generating DAG."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algorithm import optimize_ordering
from .core import Dag, Ordering, skeleton
from .fixtures import diamond_dag
from .operators import DEFAULT_MAX_PERMS
from .oracle import CachedOracle, DagOracle, DataOracle

GENERATION_LIMIT = 10


@dataclass
class SimulationConfig:
    n: int = 4
    max_parents: int = 3
    rows: int = 50_000
    restarts: int = 1
    seed: int = 0
    alpha: float = 0.05
    oracle: str = "data"  # "data" (G² tests on samples) or "exact" (truth DAG)
    truth: str = "random"  # "random" or "diamond"
    max_perms: int = DEFAULT_MAX_PERMS

    def validate(self) -> None:
        if not 1 <= self.n <= GENERATION_LIMIT:
            raise ValueError(f"n must be in 1..{GENERATION_LIMIT}")
        if self.rows < 1:
            raise ValueError("rows must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_parents < 0:
            raise ValueError("max_parents must be non-negative")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.oracle not in ("data", "exact"):
            raise ValueError("oracle must be 'data' or 'exact'")
        if self.truth not in ("random", "diamond"):
            raise ValueError("truth must be 'random' or 'diamond'")
        if self.truth == "diamond" and self.n != 4:
            raise ValueError("the diamond ground truth has exactly 4 variables")


def random_dag(n: int, max_parents: int, rng: np.random.Generator) -> Dag:
    """Random ordering, then random parent sets drawn from the predecessors."""
    perm = rng.permutation(n)
    arcs = []
    for k in range(1, n):
        v = int(perm[k])
        cap = min(max_parents, k)
        npar = int(rng.integers(0, cap + 1))
        for p in rng.choice(perm[:k], size=npar, replace=False):
            arcs.append((int(p), v))
    return Dag(n, arcs)


def random_cpts(dag: Dag, arities, rng: np.random.Generator) -> dict[int, np.ndarray]:
    """Per node: a (parent-configurations × arity) row-stochastic table.
    Entries are bounded away from zero so every joint state has mass."""
    cpts = {}
    for v in range(dag.n):
        ps = sorted(dag.parents(v))
        rows = int(np.prod([arities[p] for p in ps])) if ps else 1
        raw = rng.uniform(0.05, 1.0, size=(rows, arities[v]))
        cpts[v] = raw / raw.sum(axis=1, keepdims=True)
    return cpts


def _topological(dag: Dag) -> list[int]:
    pending = {v: len(dag.parents(v)) for v in range(dag.n)}
    ready = sorted(v for v, c in pending.items() if c == 0)
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for c in sorted(dag.children(v)):
            pending[c] -= 1
            if pending[c] == 0:
                ready.append(c)
    return out


def forward_sample(dag: Dag, cpts, arities, rows: int, rng: np.random.Generator) -> np.ndarray:
    samples = np.zeros((rows, dag.n), dtype=np.int64)
    for v in _topological(dag):
        ps = sorted(dag.parents(v))
        cfg = np.zeros(rows, dtype=np.int64)
        for p in ps:
            cfg = cfg * arities[p] + samples[:, p]
        probs = cpts[v][cfg]  # rows × arity_v
        cum = np.cumsum(probs, axis=1)
        u = rng.random((rows, 1))
        samples[:, v] = np.minimum((u >= cum).sum(axis=1), arities[v] - 1)
    return samples


def skeleton_metrics(learned: Dag, truth: Dag) -> tuple[float, float, int]:
    """(precision, recall, structural Hamming distance) between skeletons."""
    ls, ts = skeleton(learned), skeleton(truth)
    hit = len(ls & ts)
    precision = hit / len(ls) if ls else 1.0
    recall = hit / len(ts) if ts else 1.0
    return precision, recall, len(ls ^ ts)


@dataclass
class RestartReport:
    index: int
    initial_order: tuple[int, ...]
    learned_arcs: int
    true_arcs: int
    precision: float
    recall: float
    shd: int
    queries: int
    ci_tests: int
    incomplete: bool


@dataclass
class SimulationReport:
    config: SimulationConfig
    truth: Dag
    restarts: list[RestartReport] = field(default_factory=list)

    @property
    def mean_shd(self) -> float:
        return sum(r.shd for r in self.restarts) / len(self.restarts)


def run_simulation(cfg: SimulationConfig) -> SimulationReport:
    """Deterministic under the seed: truth, initial orderings, and sample
    draws each consume an independent child seed, so switching the oracle
    kind changes nothing else about the run."""
    cfg.validate()
    truth_seed, order_seed, data_seed = np.random.SeedSequence(cfg.seed).spawn(3)
    truth_rng = np.random.default_rng(truth_seed)
    if cfg.truth == "diamond":
        truth = diamond_dag()
    else:
        truth = random_dag(cfg.n, cfg.max_parents, truth_rng)
    arities = [2] * cfg.n

    report = SimulationReport(config=cfg, truth=truth)
    order_rngs = [np.random.default_rng(s) for s in order_seed.spawn(cfg.restarts)]
    data_rngs = [np.random.default_rng(s) for s in data_seed.spawn(cfg.restarts)]
    for k in range(cfg.restarts):
        order = Ordering(int(v) for v in order_rngs[k].permutation(cfg.n))
        if cfg.oracle == "exact":
            oracle = CachedOracle(DagOracle(truth))
        else:
            cpts = random_cpts(truth, arities, data_rngs[k])
            rows = forward_sample(truth, cpts, arities, cfg.rows, data_rngs[k])
            oracle = CachedOracle(DataOracle(rows, arities, alpha=cfg.alpha))
        result = optimize_ordering(oracle, order, max_perms=cfg.max_perms)
        precision, recall, shd = skeleton_metrics(result.dag, truth)
        report.restarts.append(RestartReport(
            index=k,
            initial_order=order.seq,
            learned_arcs=result.dag.arc_count,
            true_arcs=truth.arc_count,
            precision=precision,
            recall=recall,
            shd=shd,
            queries=oracle.query_count,
            ci_tests=getattr(oracle.inner, "test_count", 0),
            incomplete=result.incomplete,
        ))
    return report
