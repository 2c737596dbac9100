"""Shared helpers for the test suite: fixture graphs, instance generators, independent checks."""

from __future__ import annotations

import random
from pathlib import Path

from kssp.graph import Graph, build_graph, generate_random, parse_dimacs
from kssp.oracle import EnumerationLimitExceeded, enumerate_all_simple_paths

DATA = Path(__file__).parent / "data"

# six-node node ids
S, V1, V2, V3, V4, T = range(6)
NAMES = ("s", "v1", "v2", "v3", "v4", "t")
# edge ids in six_node.gr order
E_S_V1, E_V1_V3, E_V3_T, E_V2_V1, E_V4_V3, A, B, C, D = range(9)


def six_node() -> Graph:
    with open(DATA / "six_node.gr") as fh:
        return parse_dimacs(fh)


def named(nodes) -> str:
    return " ".join(NAMES[v] for v in nodes)


def random_multigraph(rng: random.Random, n: int, m: int, max_weight: int, min_weight: int = 0) -> Graph:
    """Uniform random edges, self-loops and parallel edges included."""
    return build_graph(
        n, [(rng.randrange(n), rng.randrange(n), rng.randint(min_weight, max_weight)) for _ in range(m)]
    )


def small_instances(count: int, seed: int, *, n_range=(5, 40), limit: int = 1500):
    """``count`` instances ``(graph, s, t, reference_paths)`` with at least one and at most ``limit`` simple paths.

    Graphs alternate between uniform random multigraphs and the benchmark
    generator (Hamiltonian cycle plus random chords); weights are integers in
    [0, 10].  Draws whose path count exceeds ``limit`` are rejected.
    """
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(*n_range)
        m = rng.randint(n, 4 * n)
        if len(out) % 2:
            g = generate_random(n, m, 10, rng.randrange(1 << 30), min_weight=0)
        else:
            g = random_multigraph(rng, n, m, 10)
        for _ in range(8):
            s, t = rng.sample(range(n), 2)
            try:
                ref = enumerate_all_simple_paths(g, s, t, limit=limit, max_steps=20 * limit)
            except EnumerationLimitExceeded:
                continue
            if ref:
                out.append((g, s, t, ref))
                break
    return out


def check_path(graph: Graph, s: int, t: int, edges, nodes, length) -> None:
    """Independent validity check: connected s-t walk, no repeated node, matching length."""
    assert nodes[0] == s and nodes[-1] == t
    assert len(nodes) == len(edges) + 1
    for i, e in enumerate(edges):
        assert graph.tails[e] == nodes[i] and graph.heads[e] == nodes[i + 1]
    assert len(set(nodes)) == len(nodes), f"repeated node in {nodes}"
    assert sum(graph.weights[e] for e in edges) == length
