"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 verification failure, 4 incomplete
optimization (permutation budget), 5 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .algorithm import optimize_ordering, verify_trace
from .bruteforce import MODEL_LIMIT, perfect_map_exists, sweep
from .core import Ordering, SizeLimitError, d_separated, is_minimal_imap
from .modelfile import (
    Config,
    ModelFile,
    ModelFileError,
    dag_to_json,
    emit_dot,
    load_model_file,
    parse_dot,
)
from .oracle import CachedOracle
from .simulate import SimulationConfig, run_simulation

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_INCOMPLETE = 4
EXIT_SIZE = 5


def _seed_from_env(seed: int) -> int:
    env = os.environ.get("ORDERMAP_SEED")
    if env is None:
        return seed
    try:
        return int(env)
    except ValueError:
        raise ModelFileError(f"ORDERMAP_SEED must be an integer, got {env!r}") from None


def _parse_names(raw: str, model: ModelFile) -> list[int]:
    return [model.index(name.strip()) for name in raw.split(",") if name.strip()]


def _trace_jsonl(trace, names) -> str:
    def nm(vs):
        return [names[v] for v in vs]

    lines = []
    for step in trace.steps:
        lines.append(json.dumps({
            "op": step.op,
            "clique": nm(step.clique),
            "order_before": nm(step.order_before),
            "order_after": nm(step.order_after),
            "bmap_before": {names[v]: nm(b) for v, b in sorted(step.bmap_before.items())},
            "bmap_after": {names[v]: nm(b) for v, b in sorted(step.bmap_after.items())},
            "removed_arcs": [nm(arc) for arc in step.removed_arcs],
            "queries": step.queries,
            "applied": step.applied,
            "note": step.note,
        }))
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_learn(args) -> int:
    model = load_model_file(args.model)
    config = Config(alpha=args.alpha, epsilon=args.epsilon, seed=_seed_from_env(args.seed),
                    verify_limit=args.verify_limit, max_perms=args.max_perms)
    config.validate()

    if args.order:
        indices = _parse_names(args.order, model)
        if sorted(indices) != list(range(model.n)):
            raise ModelFileError(f"--order must be a permutation of the variables, "
                                 f"got {args.order!r}")
        order = Ordering(indices)
    else:
        order = Ordering(range(model.n))

    oracle = CachedOracle(model.oracle(config))
    result = optimize_ordering(oracle, order, max_perms=config.max_perms)

    if args.trace:
        Path(args.trace).write_text(_trace_jsonl(result.trace, model.variables))

    artifact = dag_to_json(result.dag, model.variables)
    if args.emit == "dot":
        artifact = emit_dot(result.dag, model.variables)
    if args.out:
        Path(args.out).write_text(dag_to_json(result.dag, model.variables))
        sys.stdout.write(artifact if args.emit == "dot" else "")
    else:
        sys.stdout.write(artifact)

    print(f"arcs: {result.dag.arc_count}", file=sys.stderr)
    print(f"queries: {result.stats.queries}", file=sys.stderr)
    print(f"splits: {result.stats.splits}", file=sys.stderr)

    if args.verify:
        if model.n > config.verify_limit:
            raise SizeLimitError(f"--verify covers up to {config.verify_limit} variables")
        report = verify_trace(result.trace, oracle, limit=config.verify_limit)
        minimal = is_minimal_imap(result.dag, oracle, limit=config.verify_limit)
        if not report.ok or not minimal:
            for failure in report.failures:
                print(f"verify: {failure}", file=sys.stderr)
            if not minimal:
                print("verify: final DAG is not a minimal I-map", file=sys.stderr)
            return EXIT_VERIFY
        print(f"verify: {report.checked_steps} steps ok", file=sys.stderr)

    if result.incomplete:
        print("warning: optimization incomplete (permutation budget)", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_dsep(args) -> int:
    model = load_model_file(args.model)
    if model.dag is None:
        raise ModelFileError("dsep needs a model file with a 'dag' source")
    x = _parse_names(args.x, model)
    y = _parse_names(args.y, model)
    z = _parse_names(args.given, model) if args.given else []
    try:
        verdict = d_separated(model.dag, x, z, y)
    except ValueError as exc:
        raise ModelFileError(str(exc)) from exc
    print("true" if verdict else "false")
    return EXIT_OK


def cmd_brute(args) -> int:
    model = load_model_file(args.model)
    config = Config(alpha=args.alpha, epsilon=args.epsilon)
    config.validate()
    oracle = CachedOracle(model.oracle(config))
    sw = sweep(oracle, model.n)
    print(f"variables: {model.n}")
    print(f"min arcs: {sw.min_count}")
    print(f"optimal orderings: {len(sw.argmin)} of {len(sw.records)}")
    if model.n <= MODEL_LIMIT:
        pm = perfect_map_exists(oracle, model.n)
        print(f"perfect map: {'yes' if pm is not None else 'no'}")
    else:
        print(f"perfect map: unchecked (cap {MODEL_LIMIT})")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = SimulationConfig(
        n=args.n,
        max_parents=args.max_parents,
        rows=args.rows,
        restarts=args.restarts,
        seed=_seed_from_env(args.seed),
        alpha=args.alpha,
        oracle=args.oracle,
        truth=args.truth,
        max_perms=args.max_perms,
    )
    try:
        report = run_simulation(cfg)
    except ValueError as exc:
        raise ModelFileError(str(exc)) from exc
    print(f"truth arcs: {report.truth.arc_count}")
    for r in report.restarts:
        order = ",".join(map(str, r.initial_order))
        print(f"restart {r.index}: order={order} arcs={r.learned_arcs} "
              f"precision={r.precision:.3f} recall={r.recall:.3f} shd={r.shd} "
              f"queries={r.queries} tests={r.ci_tests}")
    print(f"mean shd: {report.mean_shd:.3f}")
    if any(r.incomplete for r in report.restarts):
        print("warning: some restarts hit the permutation budget", file=sys.stderr)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_convert(args) -> int:
    path = Path(args.input)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    to = args.to
    if to is None:
        to = "json" if path.suffix == ".dot" else "dot"
    if to == "dot":
        model = load_model_file(path)
        if model.dag is None:
            raise ModelFileError("convert to DOT needs a 'dag' model file")
        out = emit_dot(model.dag, model.variables)
    else:
        names, dag = parse_dot(text)
        out = dag_to_json(dag, names)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def _add_oracle_options(p):
    p.add_argument("--alpha", type=float, default=0.05,
                   help="significance level for data oracles")
    p.add_argument("--epsilon", type=float, default=1e-9,
                   help="tolerance for table oracles")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordermap",
        description="Learn a minimal I-map DAG by optimizing a variable ordering "
                    "against an independence oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="run the ordering optimization on a model file")
    p.add_argument("model", help="model JSON file")
    p.add_argument("--order", help="comma-separated initial ordering (default: file order)")
    p.add_argument("--trace", help="write the step log as JSON lines")
    p.add_argument("--emit", choices=("json", "dot"), default="json")
    p.add_argument("--out", help="write the learned DAG JSON here instead of stdout")
    p.add_argument("--verify", action="store_true",
                   help="re-check the run against the oracle (small models)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify-limit", type=int, default=6)
    p.add_argument("--max-perms", type=int, default=40320)
    _add_oracle_options(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("dsep", help="query d-separation in a DAG model file")
    p.add_argument("model")
    p.add_argument("x", help="comma-separated variable names")
    p.add_argument("y", help="comma-separated variable names")
    p.add_argument("--given", "-z", help="comma-separated conditioning set")
    p.set_defaults(func=cmd_dsep)

    p = sub.add_parser("brute", help="exhaustive ordering sweep (small models)")
    p.add_argument("model")
    _add_oracle_options(p)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("simulate", help="sample from a known network and learn it back")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--max-parents", type=int, default=3)
    p.add_argument("--rows", type=int, default=50_000)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--oracle", choices=("data", "exact"), default="data")
    p.add_argument("--truth", choices=("random", "diamond"), default="random")
    p.add_argument("--max-perms", type=int, default=40320)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("convert", help="convert between DAG JSON and DOT")
    p.add_argument("input")
    p.add_argument("--to", choices=("json", "dot"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_convert)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE


if __name__ == "__main__":
    sys.exit(main())
