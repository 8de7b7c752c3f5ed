"""Model files, run configuration, and the DOT/JSON graph formats.

A model file is a JSON document naming the variables and exactly one oracle
source: a DAG (arc list), a joint probability table (flat row-major, last
variable fastest), or a CSV of integer-coded records.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Dag
from .oracle import DagOracle, DataOracle, TableOracle


class ModelFileError(ValueError):
    """Malformed model file, CSV, or DOT input."""


@dataclass
class Config:
    alpha: float = 0.05
    epsilon: float = 1e-9
    seed: int = 0
    verify_limit: int = 6
    max_perms: int = 40320
    order: tuple[str, ...] | None = None

    def validate(self) -> None:
        if not 0 < self.alpha < 1:
            raise ModelFileError("alpha must lie in (0, 1)")
        if self.epsilon < 0:
            raise ModelFileError("epsilon must be non-negative")
        if self.max_perms < 1:
            raise ModelFileError("max_perms must be positive")
        if self.verify_limit < 1:
            raise ModelFileError("verify_limit must be positive")


@dataclass
class ModelFile:
    variables: tuple[str, ...]
    arity: tuple[int, ...]
    dag: Dag | None = None
    table: np.ndarray | None = None
    data: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ModelFileError(f"unknown variable {name!r}") from None

    def oracle(self, config: Config):
        if self.dag is not None:
            return DagOracle(self.dag)
        if self.table is not None:
            return TableOracle(self.table, epsilon=config.epsilon)
        return DataOracle(self.data, self.arity, alpha=config.alpha)


def _arc_endpoint(value, variables) -> int:
    if isinstance(value, str):
        if value not in variables:
            raise ModelFileError(f"unknown variable {value!r} in arcs")
        return variables.index(value)
    if isinstance(value, int) and 0 <= value < len(variables):
        return value
    raise ModelFileError(f"bad arc endpoint {value!r}")


def load_model_file(path: str | Path) -> ModelFile:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFileError(f"{path}: top level must be an object")
    variables = doc.get("variables")
    if (not isinstance(variables, list) or not variables
            or not all(isinstance(v, str) for v in variables)):
        raise ModelFileError(f"{path}: 'variables' must be a non-empty list of names")
    if len(set(variables)) != len(variables):
        raise ModelFileError(f"{path}: variable names must be unique")
    variables = tuple(variables)
    n = len(variables)

    sources = [k for k in ("dag", "table", "data") if k in doc]
    if len(sources) != 1:
        raise ModelFileError(f"{path}: exactly one of 'dag', 'table', 'data' required, "
                             f"found {sources or 'none'}")

    arity = doc.get("arity")
    if arity is not None:
        if (not isinstance(arity, list) or len(arity) != n
                or not all(isinstance(a, int) and a >= 2 for a in arity)):
            raise ModelFileError(f"{path}: 'arity' must list one integer ≥ 2 per variable")
        arity = tuple(arity)

    if sources[0] == "dag":
        spec = doc["dag"]
        if not isinstance(spec, dict) or not isinstance(spec.get("arcs"), list):
            raise ModelFileError(f"{path}: 'dag' must hold an 'arcs' list")
        arcs = []
        for pair in spec["arcs"]:
            if not isinstance(pair, list) or len(pair) != 2:
                raise ModelFileError(f"{path}: each arc must be a [parent, child] pair")
            arcs.append((_arc_endpoint(pair[0], variables), _arc_endpoint(pair[1], variables)))
        try:
            dag = Dag(n, arcs)
        except ValueError as exc:
            raise ModelFileError(f"{path}: {exc}") from exc
        return ModelFile(variables, arity or (2,) * n, dag=dag)

    if sources[0] == "table":
        spec = doc["table"]
        if arity is None:
            raise ModelFileError(f"{path}: 'table' requires explicit 'arity'")
        if not isinstance(spec, dict) or not isinstance(spec.get("probs"), list):
            raise ModelFileError(f"{path}: 'table' must hold a 'probs' list")
        expected = math.prod(arity)
        if len(spec["probs"]) != expected:
            raise ModelFileError(
                f"{path}: 'probs' must have {expected} entries, got {len(spec['probs'])}")
        try:
            table = np.asarray(spec["probs"], dtype=float).reshape(arity)
        except (TypeError, ValueError) as exc:
            raise ModelFileError(f"{path}: bad 'probs': {exc}") from exc
        return ModelFile(variables, arity, table=table)

    spec = doc["data"]
    if not isinstance(spec, dict) or not isinstance(spec.get("csv_path"), str):
        raise ModelFileError(f"{path}: 'data' must hold a 'csv_path'")
    csv_path = Path(spec["csv_path"])
    if not csv_path.is_absolute():
        csv_path = path.parent / csv_path
    rows, arity = load_csv(csv_path, variables, arity)
    return ModelFile(variables, arity, data=rows)


def load_csv(path: str | Path, variables: tuple[str, ...], arity=None):
    """Integer-coded records with a header row; violations are reported with
    their line number."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ModelFileError(f"{path}: empty file") from None
    if tuple(h.strip() for h in header) != tuple(variables):
        raise ModelFileError(
            f"{path}:1: header {header} does not match variables {list(variables)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(variables):
            raise ModelFileError(f"{path}:{lineno}: expected {len(variables)} fields, "
                                 f"got {len(row)}")
        try:
            values = [int(cell) for cell in row]
        except ValueError:
            raise ModelFileError(f"{path}:{lineno}: non-integer value in {row}") from None
        if any(v < 0 for v in values):
            raise ModelFileError(f"{path}:{lineno}: negative value in {row}")
        rows.append(values)
    if not rows:
        raise ModelFileError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.int64)
    if arity is None:
        arity = tuple(int(data[:, k].max()) + 1 for k in range(data.shape[1]))
        arity = tuple(max(a, 2) for a in arity)
    else:
        for k in range(data.shape[1]):
            bad = np.nonzero(data[:, k] >= arity[k])[0]
            if bad.size:
                lineno = int(bad[0]) + 2
                raise ModelFileError(
                    f"{path}:{lineno}: value {data[bad[0], k]} out of range for "
                    f"{variables[k]} (arity {arity[k]})")
    return data, tuple(arity)


def dag_to_json(dag: Dag, names) -> str:
    names = tuple(names)
    arcs = sorted(dag.arcs)
    doc = {
        "variables": list(names),
        "dag": {"arcs": [[names[p], names[c]] for p, c in arcs]},
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_dot(dag: Dag, names) -> str:
    names = tuple(names)
    lines = ["digraph {"]
    lines.extend(f'  "{names[v]}";' for v in range(dag.n))
    arcs = sorted(dag.arcs)
    lines.extend(f'  "{names[p]}" -> "{names[c]}";' for p, c in arcs)
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_NODE = re.compile(r'^\s*"([^"]+)"\s*;\s*$')
_DOT_ARC = re.compile(r'^\s*"([^"]+)"\s*->\s*"([^"]+)"\s*;\s*$')


def parse_dot(text: str) -> tuple[tuple[str, ...], Dag]:
    """Inverse of emit_dot; only the quoted node/arc statement forms are
    understood."""
    names: list[str] = []
    arcs: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped in ("digraph {", "}") or stripped.startswith("digraph"):
            continue
        m = _DOT_ARC.match(line)
        if m:
            arcs.append((m.group(1), m.group(2)))
            continue
        m = _DOT_NODE.match(line)
        if m:
            if m.group(1) in names:
                raise ModelFileError(f"line {lineno}: duplicate node {m.group(1)!r}")
            names.append(m.group(1))
            continue
        raise ModelFileError(f"line {lineno}: cannot parse {stripped!r}")
    for a, b in arcs:
        for v in (a, b):
            if v not in names:
                names.append(v)
    index = {v: k for k, v in enumerate(names)}
    return tuple(names), Dag(len(names), [(index[a], index[b]) for a, b in arcs])
