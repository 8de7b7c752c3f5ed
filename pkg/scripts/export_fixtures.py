"""Write the built-in example models as ready-to-run files.

Produces, per fixture, a model JSON usable by the CLI, plus a DOT rendering
for the DAG fixture and a sampled CSV for the table fixtures:

    python3 scripts/export_fixtures.py --out-dir demo --rows 5000
    ordermap learn demo/fork_join.json --order b,a,d,c
"""

import argparse
import csv
import json
from pathlib import Path

import numpy as np

from ordermap.fixtures import (
    DIAMOND_NAMES,
    FORK_JOIN_NAMES,
    XOR_NAMES,
    diamond_dag,
    fork_join_table,
    noisy_xor_table,
)
from ordermap.modelfile import dag_to_json, emit_dot


def write_table_model(out_dir: Path, name: str, names, table, rows: int, rng) -> None:
    doc = {
        "variables": list(names),
        "arity": list(table.shape),
        "table": {"probs": table.reshape(-1).tolist()},
    }
    (out_dir / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    if rows:
        flat = table.reshape(-1)
        draws = rng.choice(flat.size, size=rows, p=flat)
        samples = np.column_stack(np.unravel_index(draws, table.shape))
        with (out_dir / f"{name}.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(names)
            w.writerows(samples.tolist())
        data_doc = {"variables": list(names), "data": {"csv_path": f"{name}.csv"}}
        (out_dir / f"{name}_data.json").write_text(json.dumps(data_doc, indent=2) + "\n")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="demo")
    ap.add_argument("--rows", type=int, default=5000,
                    help="sample size for the CSV companions (0 to skip)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    write_table_model(out_dir, "fork_join", FORK_JOIN_NAMES, fork_join_table(),
                      args.rows, rng)
    write_table_model(out_dir, "noisy_xor", XOR_NAMES, noisy_xor_table(),
                      args.rows, rng)
    (out_dir / "diamond.json").write_text(dag_to_json(diamond_dag(), DIAMOND_NAMES))
    (out_dir / "diamond.dot").write_text(emit_dot(diamond_dag(), DIAMOND_NAMES))

    for p in sorted(out_dir.iterdir()):
        print(p)


if __name__ == "__main__":
    main()
