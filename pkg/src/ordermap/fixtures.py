"""Small exactly-solvable fixtures.

Three models recur across the test suite and the simulator:

* noisy_xor: three binary variables; a and b are fair independent coins and
  c indicates a == b with 2% noise.  Pairwise independent, jointly dependent,
  so no DAG is a perfect map.
* fork_join: four binary variables; b and c branch off a and d depends on
  all three.  The only conditional independence among single variables is
  I(b, {a}, c); the constants below are generic enough that nothing else
  holds, which the oracle tests verify exhaustively.
* diamond: the DAG a -> b, a -> c, b -> d, c -> d, queried exactly through
  d-separation.

Variables are indexed in name order: a=0, b=1, c=2, d=3.
"""

from __future__ import annotations

import numpy as np

from .core import Dag, Ordering
from .oracle import DagOracle, TableOracle

XOR_NAMES = ("a", "b", "c")
FORK_JOIN_NAMES = ("a", "b", "c", "d")
DIAMOND_NAMES = ("a", "b", "c", "d")

XOR_NOISE = 0.02

FORK_JOIN_B = (0.8, 0.3)  # P(b=1 | a)
FORK_JOIN_C = (0.7, 0.2)  # P(c=1 | a)
# P(d=1 | a, b, c) indexed [a][b][c]; eight distinct generic values
FORK_JOIN_D = (
    ((0.12, 0.47), (0.83, 0.26)),
    ((0.55, 0.91), (0.34, 0.68)),
)


def noisy_xor_table() -> np.ndarray:
    t = np.zeros((2, 2, 2))
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                pc = (1.0 - XOR_NOISE) if c == int(a == b) else XOR_NOISE
                t[a, b, c] = 0.25 * pc
    return t


def fork_join_table() -> np.ndarray:
    t = np.zeros((2, 2, 2, 2))
    for a in (0, 1):
        for b in (0, 1):
            pb = FORK_JOIN_B[a] if b else 1.0 - FORK_JOIN_B[a]
            for c in (0, 1):
                pc = FORK_JOIN_C[a] if c else 1.0 - FORK_JOIN_C[a]
                for d in (0, 1):
                    pd = FORK_JOIN_D[a][b][c] if d else 1.0 - FORK_JOIN_D[a][b][c]
                    t[a, b, c, d] = 0.5 * pb * pc * pd
    return t


def diamond_dag() -> Dag:
    return Dag(4, [(0, 1), (0, 2), (1, 3), (2, 3)])


def noisy_xor_oracle() -> TableOracle:
    return TableOracle(noisy_xor_table())


def fork_join_oracle() -> TableOracle:
    return TableOracle(fork_join_table())


def diamond_oracle() -> DagOracle:
    return DagOracle(diamond_dag())


# The ordering (d, c, b, a) over the diamond model; its causal input list is
# a worked example in several operator tests.
REVERSED_DIAMOND_ORDER = Ordering((3, 2, 1, 0))
