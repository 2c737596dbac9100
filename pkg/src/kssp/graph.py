"""Immutable weighted directed multigraph, DIMACS ``.gr`` I/O and instance generation."""

from __future__ import annotations

import io
import math
import random
from typing import Iterable, NamedTuple, Sequence, TextIO


class EdgeRecord(NamedTuple):
    id: int
    tail: int
    head: int
    weight: float


class DimacsError(ValueError):
    """Malformed DIMACS shortest-path input."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class Graph:
    """Directed multigraph with forward and reverse star adjacency.

    Edges are identified by their dense integer id, never by their endpoints,
    so parallel edges and self-loops are distinct objects.  The per-edge
    arrays ``tails``, ``heads`` and ``weights`` are exposed directly because
    the shortest-path and enumeration loops index them millions of times.
    """

    __slots__ = ("node_count", "tails", "heads", "weights", "forward_index", "reverse_index")

    def __init__(
        self,
        node_count: int,
        tails: Sequence[int],
        heads: Sequence[int],
        weights: Sequence[float],
    ):
        forward: list[list[int]] = [[] for _ in range(node_count)]
        reverse: list[list[int]] = [[] for _ in range(node_count)]
        for e, (u, v) in enumerate(zip(tails, heads)):
            forward[u].append(e)
            reverse[v].append(e)
        self.node_count = node_count
        self.tails = tuple(tails)
        self.heads = tuple(heads)
        self.weights = tuple(weights)
        self.forward_index = tuple(tuple(lst) for lst in forward)
        self.reverse_index = tuple(tuple(lst) for lst in reverse)

    @property
    def edge_count(self) -> int:
        return len(self.tails)

    def edge(self, e: int) -> EdgeRecord:
        return EdgeRecord(e, self.tails[e], self.heads[e], self.weights[e])

    @property
    def edges(self) -> list[EdgeRecord]:
        return [self.edge(e) for e in range(self.edge_count)]

    def edge_multiset(self) -> list[tuple[int, int, float]]:
        """Sorted ``(tail, head, weight)`` triples; equal for graphs that differ only in edge ids."""
        return sorted(zip(self.tails, self.heads, self.weights))

    def path_nodes(self, edges: Sequence[int], start: int | None = None) -> list[int]:
        if not edges:
            if start is None:
                raise ValueError("empty edge sequence needs an explicit start node")
            return [start]
        heads = self.heads
        nodes = [self.tails[edges[0]]]
        nodes.extend(heads[e] for e in edges)
        return nodes

    def path_length(self, edges: Iterable[int]) -> float:
        weights = self.weights
        return sum(weights[e] for e in edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, m={self.edge_count})"


def build_graph(node_count: int, edge_list: Iterable[tuple[int, int, float]]) -> Graph:
    """Validate ``(tail, head, weight)`` triples and build a graph; edge ids follow input order."""
    if node_count < 0:
        raise ValueError(f"negative node count {node_count}")
    tails: list[int] = []
    heads: list[int] = []
    weights: list[float] = []
    for i, (u, v, w) in enumerate(edge_list):
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise ValueError(f"edge {i}: endpoint out of range ({u}, {v}) for n={node_count}")
        w = float(w)
        if not math.isfinite(w) or w < 0:
            raise ValueError(f"edge {i}: weight must be finite and non-negative, got {w}")
        tails.append(u)
        heads.append(v)
        weights.append(w)
    return Graph(node_count, tails, heads, weights)


def parse_dimacs(stream: TextIO | str) -> Graph:
    """Read a 9th DIMACS challenge shortest-path file (``p sp n m`` / ``a u v w``).

    Node ids are 1-based in the file and 0-based in the returned graph.
    Repeated arcs become parallel edges.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    n = m = None
    edges: list[tuple[int, int, float]] = []
    for line_no, raw in enumerate(stream, 1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        tag = parts[0]
        if tag == "p":
            if n is not None:
                raise DimacsError("duplicate problem line", line_no)
            if len(parts) != 4 or parts[1] != "sp":
                raise DimacsError(f"expected 'p sp <n> <m>', got {raw.strip()!r}", line_no)
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError(f"non-integer problem sizes in {raw.strip()!r}", line_no) from None
            if n < 0 or m < 0:
                raise DimacsError("negative problem sizes", line_no)
        elif tag == "a":
            if n is None:
                raise DimacsError("arc line before problem line", line_no)
            if len(parts) != 4:
                raise DimacsError(f"expected 'a <u> <v> <w>', got {raw.strip()!r}", line_no)
            try:
                u, v = int(parts[1]), int(parts[2])
                w = float(parts[3])
            except ValueError:
                raise DimacsError(f"malformed arc {raw.strip()!r}", line_no) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise DimacsError(f"node id out of range 1..{n}: {raw.strip()!r}", line_no)
            if not math.isfinite(w) or w < 0:
                raise DimacsError(f"invalid weight {parts[3]!r}", line_no)
            edges.append((u - 1, v - 1, w))
        else:
            raise DimacsError(f"unknown line type {tag!r}", line_no)
    if n is None:
        raise DimacsError("missing problem line")
    if len(edges) != m:
        raise DimacsError(f"problem line declares {m} arcs, found {len(edges)}")
    return build_graph(n, edges)


def _format_weight(w: float) -> str:
    return str(int(w)) if w.is_integer() else repr(w)


def write_dimacs(graph: Graph, comments: Iterable[str] = ()) -> str:
    out = [f"c {c}" for c in comments]
    out.append(f"p sp {graph.node_count} {graph.edge_count}")
    for u, v, w in zip(graph.tails, graph.heads, graph.weights):
        out.append(f"a {u + 1} {v + 1} {_format_weight(w)}")
    return "\n".join(out) + "\n"


def generate_random(
    n: int,
    m: int,
    max_weight: int,
    seed: int,
    *,
    min_weight: int = 1,
) -> Graph:
    """Random multigraph in the spirit of DIMACS ``sprand``.

    The first ``n`` edges form a random Hamiltonian cycle so every node can
    reach every other node; the remaining ``m - n`` edges join uniformly drawn
    ordered pairs of distinct nodes (drawn with replacement, so parallel edges
    occur).  Weights are uniform integers in ``[min_weight, max_weight]``.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if m < n:
        raise ValueError(f"m={m} < n={n}: not enough edges for the connecting cycle")
    if max_weight < 1 or min_weight < 0 or min_weight > max_weight:
        raise ValueError(f"bad weight range [{min_weight}, {max_weight}]")
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    tails = perm[:]
    heads = perm[1:] + perm[:1]
    randrange = rng.randrange
    for _ in range(m - n):
        u = randrange(n)
        v = randrange(n - 1)
        if v >= u:
            v += 1
        tails.append(u)
        heads.append(v)
    randint = rng.randint
    weights = [float(randint(min_weight, max_weight)) for _ in range(m)]
    return Graph(n, tails, heads, weights)


def _reach_all(node_count: int, adjacency: Sequence[Sequence[int]], ends: Sequence[int]) -> bool:
    seen = bytearray(node_count)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        v = stack.pop()
        for e in adjacency[v]:
            w = ends[e]
            if not seen[w]:
                seen[w] = 1
                count += 1
                stack.append(w)
    return count == node_count


def is_strongly_connected(graph: Graph) -> bool:
    """Forward and reverse DFS from node 0 both cover every node."""
    if graph.node_count == 0:
        return True
    return _reach_all(graph.node_count, graph.forward_index, graph.heads) and _reach_all(
        graph.node_count, graph.reverse_index, graph.tails
    )
