"""Command line front end: ``kssp solve``, ``kssp gen``, ``kssp bench``.

Node ids on the command line and in output are 1-based, like the DIMACS files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from kssp.bench import WORKERS_ENV, BenchConfig, run_bench, summarize, write_csv
from kssp.graph import DimacsError, generate_random, is_strongly_connected, parse_dimacs, write_dimacs
from kssp.solver import Query, Variant, solve


def _fmt_length(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(x)


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        with open(args.graph) as fh:
            graph = parse_dimacs(fh)
    except (OSError, DimacsError) as exc:
        print(f"kssp solve: {exc}", file=sys.stderr)
        return 2
    n = graph.node_count
    for name, v in (("source", args.source), ("target", args.target)):
        if not 1 <= v <= n:
            print(f"kssp solve: {name} {v} out of range 1..{n}", file=sys.stderr)
            return 2
    try:
        query = Query(args.source - 1, args.target - 1, args.k, Variant.parse(args.variant))
    except ValueError as exc:
        print(f"kssp solve: {exc}", file=sys.stderr)
        return 2
    paths, stats = solve(graph, query)
    if args.format == "json":
        payload = {
            "source": args.source,
            "target": args.target,
            "k": args.k,
            "variant": query.variant.value,
            "paths": [{"length": p.length, "nodes": [v + 1 for v in p.nodes]} for p in paths],
            "stats": vars(stats),
        }
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for p in paths:
            print(f"{_fmt_length(p.length)}\t{' '.join(str(v + 1) for v in p.nodes)}")
        print(f"# paths={len(paths)} exhausted={int(stats.exhausted)}")
        print(f"# dijkstra_calls={stats.dijkstra_calls} polls={stats.polls} time_s={stats.wall_time:.6f}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        graph = generate_random(args.n, args.m, args.max_weight, args.seed)
    except ValueError as exc:
        print(f"kssp gen: {exc}", file=sys.stderr)
        return 2
    if args.check and not is_strongly_connected(graph):
        print("kssp gen: generated graph is not strongly connected", file=sys.stderr)
        return 1
    text = write_dimacs(
        graph,
        comments=[f"random graph n={args.n} m={args.m} max_weight={args.max_weight} seed={args.seed}"],
    )
    try:
        if args.output == "-":
            sys.stdout.write(text)
        else:
            Path(args.output).write_text(text)
    except OSError as exc:
        print(f"kssp gen: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    try:
        config = BenchConfig.load(args.config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"kssp bench: bad config: {exc}", file=sys.stderr)
        return 2
    records = run_bench(config, workers=args.workers)
    write_csv(records, summarize(records), sys.stdout)
    return 0 if all(r.status == "ok" for r in records) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kssp", description="k shortest simple paths in directed graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="enumerate k shortest simple paths in a DIMACS .gr file")
    p.add_argument("graph", help="DIMACS shortest-path file")
    p.add_argument("-s", "--source", type=int, required=True, help="source node (1-based)")
    p.add_argument("-t", "--target", type=int, required=True, help="target node (1-based)")
    p.add_argument("-k", type=int, default=1, help="number of paths (default: 1)")
    p.add_argument("--variant", default="sb-o", choices=[v.value for v in Variant])
    p.add_argument("--format", default="text", choices=["text", "json"])
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a random strongly connected multigraph")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--max-weight", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-", help="output file (default: stdout)")
    p.add_argument("--check", action="store_true", help="verify strong connectivity before writing")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark grid from a JSON config, CSV to stdout")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None, help=f"worker processes (default: ${WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
