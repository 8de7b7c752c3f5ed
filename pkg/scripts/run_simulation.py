"""Sample-size study: how skeleton recovery degrades with fewer rows.

Samples a ground-truth network once per seed, then learns it back from
independence tests at several sample sizes, e.g.

    python3 scripts/run_simulation.py --n 5 --rows 1000 5000 20000 --restarts 3
"""

import argparse

from ordermap import SimulationConfig, run_simulation


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--max-parents", type=int, default=3)
    ap.add_argument("--rows", type=int, nargs="+", default=[1000, 10_000, 50_000])
    ap.add_argument("--restarts", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--alpha", type=float, default=0.05)
    ap.add_argument("--truth", choices=("random", "diamond"), default="random")
    args = ap.parse_args()

    print(f"{'rows':>8}  {'mean shd':>8}  {'precision':>9}  {'recall':>7}  {'tests':>7}")
    for rows in args.rows:
        cfg = SimulationConfig(n=args.n, max_parents=args.max_parents, rows=rows,
                               restarts=args.restarts, seed=args.seed,
                               alpha=args.alpha, truth=args.truth)
        report = run_simulation(cfg)
        rs = report.restarts
        precision = sum(r.precision for r in rs) / len(rs)
        recall = sum(r.recall for r in rs) / len(rs)
        tests = sum(r.ci_tests for r in rs) / len(rs)
        flag = " (budget hit)" if any(r.incomplete for r in rs) else ""
        print(f"{rows:>8}  {report.mean_shd:>8.3f}  {precision:>9.3f}  "
              f"{recall:>7.3f}  {tests:>7.0f}{flag}")


if __name__ == "__main__":
    main()
