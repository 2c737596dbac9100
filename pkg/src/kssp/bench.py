"""Benchmark protocol: instance grid x s-t pairs x variants x k, raw rows plus median / Q.9 cells."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from kssp.graph import Graph, generate_random, parse_dimacs
from kssp.oracle import OracleStats, yen
from kssp.solver import Query, Variant, solve

RAW_FIELDS = [
    "n", "m", "seed", "s", "t", "variant", "k", "time_s",
    "dijkstra_calls", "polls", "pushed", "extracted", "parallel", "status", "instance",
]
SUMMARY_FIELDS = [
    "instance", "n", "m", "variant", "k", "trials", "failed",
    "median_time_s", "q90_time_s", "median_dijkstra_calls", "median_polls",
]
WORKERS_ENV = "KSSP_BENCH_WORKERS"
BENCH_VARIANTS = tuple(v.value for v in Variant) + ("yen",)


@dataclass(frozen=True)
class InstanceSpec:
    """A random instance ``(n, m, seed)`` or a DIMACS file."""

    n: int = 0
    m: int = 0
    seed: int | None = None
    max_weight: int = 10_000
    path: str | None = None

    @property
    def name(self) -> str:
        if self.path is not None:
            return Path(self.path).stem
        return f"rand-n{self.n}-m{self.m}-s{self.seed}"

    @property
    def cell(self) -> str:
        return self.name if self.path is not None else f"rand-n{self.n}-m{self.m}"


@dataclass
class BenchRecord:
    n: int
    m: int
    seed: int | None
    s: int
    t: int
    variant: str
    k: int
    time_s: float | None = None
    dijkstra_calls: int | None = None
    polls: int | None = None
    pushed: int | None = None
    extracted: int | None = None
    parallel: bool = False
    status: str = "ok"
    instance: str = ""
    lengths: list[float] = field(default_factory=list, repr=False)

    def row(self) -> dict:
        d = asdict(self)
        d.pop("lengths")
        d["seed"] = "" if self.seed is None else self.seed
        d["parallel"] = int(self.parallel)
        if self.time_s is not None:
            d["time_s"] = f"{self.time_s:.6f}"
        return {k: ("" if v is None else v) for k, v in d.items()}


@dataclass
class BenchConfig:
    instances: list[InstanceSpec]
    variants: list[str]
    k: list[int]
    pairs: int = 1
    pair_seed: int = 0

    @classmethod
    def from_dict(cls, raw: dict, base_dir: Path | None = None) -> "BenchConfig":
        instances: list[InstanceSpec] = []
        grid = raw.get("random")
        if grid:
            max_weight = int(grid.get("max_weight", 10_000))
            base_seed = int(grid.get("seed", 0))
            for n in grid["n"]:
                for density in grid["density"]:
                    for g in range(int(grid.get("graphs", 1))):
                        instances.append(InstanceSpec(int(n), int(round(n * density)), base_seed + g, max_weight))
        for f in raw.get("files", []):
            p = Path(f)
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            instances.append(InstanceSpec(path=str(p)))
        if not instances:
            raise ValueError("config lists no instances")
        variants = [str(v) for v in raw.get("variants", ["sb-o"])]
        for v in variants:
            if v not in BENCH_VARIANTS:
                raise ValueError(f"unknown variant {v!r}")
        ks = raw.get("k", [100])
        ks = [int(x) for x in (ks if isinstance(ks, list) else [ks])]
        return cls(instances, variants, ks, int(raw.get("pairs", 1)), int(raw.get("pair_seed", 0)))

    @classmethod
    def load(cls, path: str | Path) -> "BenchConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), path.parent)


@lru_cache(maxsize=4)
def load_instance(spec: InstanceSpec) -> Graph:
    if spec.path is not None:
        with open(spec.path) as fh:
            return parse_dimacs(fh)
    return generate_random(spec.n, spec.m, spec.max_weight, spec.seed)


def sample_pairs(node_count: int, count: int, pair_seed: int, instance: str) -> list[tuple[int, int]]:
    """Distinct ordered pairs ``s != t``, uniform without replacement, reproducible per instance."""
    total = node_count * (node_count - 1)
    if count > total:
        raise ValueError(f"cannot draw {count} distinct pairs from {node_count} nodes")
    rng = random.Random(f"{pair_seed}:{instance}")
    pairs = []
    for code in rng.sample(range(total), count):
        s, r = divmod(code, node_count - 1)
        pairs.append((s, r if r < s else r + 1))
    return pairs


def run_one(spec: InstanceSpec, s: int, t: int, variant: str, k: int, parallel: bool = False) -> BenchRecord:
    rec = BenchRecord(spec.n, spec.m, spec.seed, s, t, variant, k, parallel=parallel, instance=spec.name)
    try:
        graph = load_instance(spec)
        rec.n, rec.m = graph.node_count, graph.edge_count
        if variant == "yen":
            ostats = OracleStats()
            started = time.perf_counter()
            paths = yen(graph, s, t, k, stats=ostats)
            rec.time_s = time.perf_counter() - started
            rec.dijkstra_calls, rec.polls = ostats.dijkstra_calls, ostats.polls
        else:
            paths, stats = solve(graph, Query(s, t, k, Variant(variant)))
            rec.time_s = stats.wall_time
            rec.dijkstra_calls, rec.polls = stats.dijkstra_calls, stats.polls
            rec.pushed, rec.extracted = stats.pushed, stats.extracted
        rec.lengths = [p.length for p in paths]
    except Exception as exc:  # a failed run becomes a failed row
        rec.status = f"error: {type(exc).__name__}: {exc}"
        rec.time_s = rec.dijkstra_calls = rec.polls = rec.pushed = rec.extracted = None
    return rec


def _jobs(config: BenchConfig) -> tuple[list[tuple[InstanceSpec, int, int, str, int]], list[BenchRecord]]:
    jobs, failed = [], []
    for spec in config.instances:
        try:
            n = spec.n if spec.path is None else load_instance(spec).node_count
            pairs = sample_pairs(n, config.pairs, config.pair_seed, spec.name)
        except Exception as exc:  # an unloadable instance becomes one failed row per variant and k
            for k in config.k:
                for variant in config.variants:
                    failed.append(BenchRecord(
                        spec.n, spec.m, spec.seed, 0, 0, variant, k,
                        status=f"error: {type(exc).__name__}: {exc}", instance=spec.name,
                    ))
            continue
        for s, t in pairs:
            for k in config.k:
                for variant in config.variants:
                    jobs.append((spec, s, t, variant, k))
    return jobs, failed


def _run_job(job) -> BenchRecord:
    return run_one(*job, parallel=True)


def run_bench(config: BenchConfig, workers: int | None = None) -> list[BenchRecord]:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    jobs, failed = _jobs(config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs)) + failed
    return [run_one(*job) for job in jobs] + failed


def nearest_rank(values: Sequence[float], q: float) -> float:
    """Smallest value with at least ``q`` of the sample at or below it."""
    if not values:
        raise ValueError("empty sample")
    ordered = sorted(values)
    rank = max(1, math.ceil(q * len(ordered)))
    return ordered[rank - 1]


def summarize(records: Iterable[BenchRecord]) -> list[dict]:
    cells: dict[tuple, list[BenchRecord]] = {}
    for r in records:
        cell = r.instance if r.seed is None else f"rand-n{r.n}-m{r.m}"
        cells.setdefault((cell, r.n, r.m, r.variant, r.k), []).append(r)
    rows = []
    for (cell, n, m, variant, k), recs in cells.items():
        ok = [r for r in recs if r.status == "ok"]
        row = {
            "instance": cell, "n": n, "m": m, "variant": variant, "k": k,
            "trials": len(recs), "failed": len(recs) - len(ok),
            "median_time_s": "", "q90_time_s": "", "median_dijkstra_calls": "", "median_polls": "",
        }
        if ok:
            times = [r.time_s for r in ok]
            row["median_time_s"] = f"{statistics.median(times):.6f}"
            row["q90_time_s"] = f"{nearest_rank(times, 0.9):.6f}"
            row["median_dijkstra_calls"] = statistics.median(r.dijkstra_calls for r in ok)
            row["median_polls"] = statistics.median(r.polls for r in ok)
        rows.append(row)
    return rows


def write_csv(records: Sequence[BenchRecord], summary_rows: Sequence[dict], out: io.TextIOBase) -> None:
    """Raw rows, a blank line, then the summary table, each with its own header."""
    writer = csv.DictWriter(out, fieldnames=RAW_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in records:
        writer.writerow(r.row())
    out.write("\n")
    writer = csv.DictWriter(out, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(summary_rows)


def read_csv(text: str) -> tuple[list[dict], list[dict]]:
    raw_part, _, summary_part = text.partition("\n\n")
    return list(csv.DictReader(io.StringIO(raw_part))), list(csv.DictReader(io.StringIO(summary_part)))
