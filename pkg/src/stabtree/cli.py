"""Command-line front end: run one execution, certify an instance, or
sweep a seeded benchmark corpus against the worst-case bounds."""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import analysis, daemon as daemon_mod, engine, explorer
from .analysis import CheckResult
from .daemon import DaemonSpecError, parse_daemon_spec
from .engine import Configuration
from .graph import GraphError, WeightedGraph, component_info, generate_random_graph, load_graph

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_BUDGET = 3


class InitSpecError(ValueError):
    pass


def build_initial_config(spec: str, g: WeightedGraph) -> Configuration:
    """Parse an --init spec: ``normal``, ``file:<path>``, or
    ``rand:<seed>:<dcap>``."""
    if spec == "normal":
        return engine.normal_initial_configuration(g)
    if spec.startswith("file:"):
        return engine.load_configuration(spec[len("file:"):], g)
    if spec.startswith("rand:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise InitSpecError(f"expected rand:<seed>:<dcap>, got {spec!r}")
        try:
            seed, d_cap = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InitSpecError(f"bad rand spec {spec!r}") from exc
        return engine.random_configuration(g, seed, d_cap)
    raise InitSpecError(f"unknown init spec {spec!r}")


def _print_report(results: Sequence[CheckResult], out=None) -> None:
    out = out or sys.stdout
    width = max(len(r.name) for r in results)
    for r in results:
        verdict = "PASS" if r.ok else "FAIL"
        line = f"{r.name:<{width}}  {verdict}"
        if r.detail:
            line += f"  {r.detail}"
        print(line, file=out)


def _write_machine_report(results: Sequence[CheckResult], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps({"check": r.name, "verdict": "PASS" if r.ok else "FAIL", "detail": r.detail})
                + "\n"
            )


def cmd_run(args) -> int:
    try:
        g = load_graph(args.graph)
        config = build_initial_config(args.init, g)
        policy = parse_daemon_spec(args.daemon, args.seed)
    except (GraphError, engine.ConfigurationError, DaemonSpecError, InitSpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    trace = engine.run(config, g, policy, args.max_steps)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            engine.write_trace(
                trace, fh, graph_name=args.graph, seed=args.seed, daemon=policy.name
            )
    results = analysis.full_trace_report(trace, g)
    rounds = analysis.count_rounds(trace, g)
    print(f"steps={trace.step_count} rounds={rounds} terminated={trace.terminated}")
    _print_report(results)
    if args.report:
        _write_machine_report(results, args.report)
    return EXIT_OK if all(r.ok for r in results) else EXIT_CHECK_FAILED


def cmd_explore(args) -> int:
    try:
        g = load_graph(args.graph)
    except (GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    limits = explorer.ExplorationLimits(
        max_visited=args.max_visited, max_enabled=args.max_enabled
    )
    try:
        result = explorer.certify_instance(g, args.dcap, limits)
    except explorer.BudgetExceededError as exc:
        print(f"INCONCLUSIVE: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(
        f"verdict={result.verdict} initial_configs={result.initial_configs} "
        f"reachable={result.reachable_count} max_steps={result.max_steps_any_path} "
        f"step_limit={result.step_limit}"
    )
    for violation in result.violations:
        print(f"violation: {violation}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "verdict": result.verdict,
                        "initial_configs": result.initial_configs,
                        "reachable": result.reachable_count,
                        "max_steps": result.max_steps_any_path,
                        "step_limit": result.step_limit,
                        "violations": result.violations,
                    }
                )
                + "\n"
            )
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


@dataclass
class BenchRun:
    instance: int
    daemon: str
    n: int
    steps: int
    rounds: int
    step_limit: int
    round_limit: int
    failures: list[str]


def corpus_instances(
    count: int,
    seed: int,
    min_n: int = 4,
    max_n: int = 20,
    max_weight: int = 5,
    max_components: int = 3,
) -> Iterator[WeightedGraph]:
    """Deterministic stream of benchmark graphs."""
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(min_n, max_n)
        p = rng.uniform(0.25, 0.9)
        w = rng.randint(1, max_weight)
        hint = rng.randint(1, max_components)
        yield generate_random_graph(
            seed=rng.randrange(2**32),
            node_count=n,
            edge_probability=p,
            max_weight=w,
            component_hint=hint if hint > 1 else None,
        )


def bench_corpus(
    count: int,
    seed: int,
    daemons: Iterable[str],
    min_n: int = 4,
    max_n: int = 20,
    max_weight: int = 5,
) -> list[BenchRun]:
    """Run every daemon on every corpus instance from a random initial
    configuration and collect all per-trace check failures."""
    daemons = list(daemons)
    runs: list[BenchRun] = []
    rng = random.Random(seed ^ 0x5BD1E995)
    for idx, g in enumerate(
        corpus_instances(count, seed, min_n=min_n, max_n=max_n, max_weight=max_weight)
    ):
        info = component_info(g)
        d_cap = max(1, info.w_max * g.node_count)
        init = engine.random_configuration(g, rng.randrange(2**32), d_cap)
        for spec in daemons:
            policy = parse_daemon_spec(spec, seed=rng.randrange(2**32))
            trace = engine.run(init, g, policy)
            results = analysis.full_trace_report(trace, g)
            failures = [r.name for r in results if not r.ok]
            rounds = analysis.count_rounds(trace, g)
            runs.append(
                BenchRun(
                    instance=idx,
                    daemon=spec,
                    n=g.node_count,
                    steps=trace.step_count,
                    rounds=rounds,
                    step_limit=analysis.step_bound_for(g, info),
                    round_limit=analysis.round_bound_for(g, info),
                    failures=failures,
                )
            )
    return runs


def cmd_bench(args) -> int:
    daemons = [d.strip() for d in args.daemons.split(",") if d.strip()]
    try:
        for spec in daemons:
            parse_daemon_spec(spec, 0)
    except DaemonSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    runs = bench_corpus(
        count=args.count,
        seed=args.seed,
        daemons=daemons,
        min_n=args.min_n,
        max_n=args.max_n,
        max_weight=args.max_weight,
    )
    bad = [r for r in runs if r.failures]
    max_step_ratio = max((r.steps / r.step_limit for r in runs if r.step_limit), default=0.0)
    max_round_ratio = max((r.rounds / r.round_limit for r in runs if r.round_limit), default=0.0)
    print(f"runs={len(runs)} violations={len(bad)}")
    print(f"max steps/limit={max_step_ratio:.3f} max rounds/limit={max_round_ratio:.3f}")
    for r in bad:
        print(f"instance={r.instance} daemon={r.daemon} failures={','.join(r.failures)}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            for r in runs:
                fh.write(
                    json.dumps(
                        {
                            "instance": r.instance,
                            "daemon": r.daemon,
                            "n": r.n,
                            "steps": r.steps,
                            "rounds": r.rounds,
                            "step_limit": r.step_limit,
                            "round_limit": r.round_limit,
                            "failures": r.failures,
                        }
                    )
                    + "\n"
                )
    return EXIT_OK if not bad else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabtree",
        description="Simulate and verify the self-stabilizing shortest-path tree protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one execution and check the trace")
    p_run.add_argument("-g", "--graph", required=True, help="graph file")
    p_run.add_argument(
        "--init",
        default="normal",
        help="initial configuration: normal | file:<path> | rand:<seed>:<dcap>",
    )
    p_run.add_argument(
        "-d",
        "--daemon",
        default="sync",
        help="daemon: sync | central | rand:p=<float> | adv:starve | adv:churn",
    )
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--max-steps", type=int, default=None)
    p_run.add_argument("--trace", help="write the trace to this path")
    p_run.add_argument("--report", help="write machine-readable verdicts to this path")
    p_run.set_defaults(func=cmd_run)

    p_exp = sub.add_parser("explore", help="exhaustively certify a small instance")
    p_exp.add_argument("-g", "--graph", required=True)
    p_exp.add_argument("--dcap", type=int, required=True, help="initial distance cap")
    p_exp.add_argument("--max-visited", type=int, default=2_000_000)
    p_exp.add_argument("--max-enabled", type=int, default=10)
    p_exp.add_argument("--report", help="write machine-readable result to this path")
    p_exp.set_defaults(func=cmd_explore)

    p_bench = sub.add_parser("bench", help="seeded corpus sweep against the bounds")
    p_bench.add_argument("--count", type=int, default=100)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--min-n", type=int, default=4)
    p_bench.add_argument("--max-n", type=int, default=20)
    p_bench.add_argument("--max-weight", type=int, default=5)
    p_bench.add_argument(
        "--daemons",
        default="sync,central,rand:p=0.5,adv:starve,adv:churn",
        help="comma-separated daemon specs",
    )
    p_bench.add_argument("--report", help="write per-run records to this path")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
