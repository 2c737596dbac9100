"""Reference answers for tests and benchmarks: exhaustive enumeration and Yen's algorithm.

Nothing here shares code with the solver beyond the graph container.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from kssp.graph import Graph
from kssp.solver import KPath

INF = float("inf")


class EnumerationLimitExceeded(RuntimeError):
    pass


@dataclass
class OracleStats:
    dijkstra_calls: int = 0
    polls: int = 0


def _reaches_target(graph: Graph, t: int) -> bytearray:
    ok = bytearray(graph.node_count)
    ok[t] = 1
    stack = [t]
    while stack:
        v = stack.pop()
        for e in graph.reverse_index[v]:
            u = graph.tails[e]
            if not ok[u]:
                ok[u] = 1
                stack.append(u)
    return ok


def enumerate_all_simple_paths(
    graph: Graph,
    s: int,
    t: int,
    limit: int = 100_000,
    max_steps: int | None = None,
) -> list[KPath]:
    """Every simple s-t path, sorted by length then by edge ids.

    Depth-first backtracking over edges, so parallel edges give distinct
    paths.  Raises :class:`EnumerationLimitExceeded` past ``limit`` paths or,
    if ``max_steps`` is given, after that many edge extensions.
    """
    if s == t:
        raise ValueError("source and target must differ")
    useful = _reaches_target(graph, t)
    found: list[KPath] = []
    if not useful[s]:
        return found
    on_path = bytearray(graph.node_count)
    on_path[s] = 1
    edges: list[int] = []
    nodes = [s]
    heads, weights, forward = graph.heads, graph.weights, graph.forward_index
    budget = [max_steps if max_steps is not None else -1]

    def extend(v: int, length: float) -> None:
        for e in forward[v]:
            w = heads[e]
            if on_path[w] or not useful[w]:
                continue
            if budget[0] == 0:
                raise EnumerationLimitExceeded(f"more than {max_steps} search steps")
            budget[0] -= 1
            edges.append(e)
            nodes.append(w)
            if w == t:
                if len(found) >= limit:
                    raise EnumerationLimitExceeded(f"more than {limit} simple paths")
                found.append(KPath(length + weights[e], tuple(edges), tuple(nodes)))
            else:
                on_path[w] = 1
                extend(w, length + weights[e])
                on_path[w] = 0
            edges.pop()
            nodes.pop()

    extend(s, 0.0)
    found.sort(key=lambda p: (p.length, p.edges))
    return found


def _distances_to(graph: Graph, t: int, stats: OracleStats | None) -> list[float]:
    dist = [INF] * graph.node_count
    dist[t] = 0.0
    heap = [(0.0, t)]
    polls = 0
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        polls += 1
        for e in graph.reverse_index[v]:
            u = graph.tails[e]
            nd = d + graph.weights[e]
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    if stats is not None:
        stats.dijkstra_calls += 1
        stats.polls += polls
    return dist


def _spur_search(
    graph: Graph,
    source: int,
    t: int,
    banned_nodes: set[int],
    banned_edges: set[int] | dict,
    potential: list[float] | None,
    stats: OracleStats,
) -> list[int] | None:
    """Single-pair Dijkstra that stops once ``t`` is settled.

    With ``potential`` (exact distances to ``t`` in the full graph) the keys
    are shifted by it, which keeps them monotone and settles far fewer nodes.
    """
    stats.dijkstra_calls += 1
    heads, weights, forward = graph.heads, graph.weights, graph.forward_index
    best = {source: 0.0}
    pred: dict[int, int] = {}
    done = set()
    start_key = potential[source] if potential is not None else 0.0
    if start_key == INF:
        return None
    heap = [(start_key, source)]
    while heap:
        _, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        stats.polls += 1
        if v == t:
            path = []
            while v != source:
                e = pred[v]
                path.append(e)
                v = graph.tails[e]
            path.reverse()
            return path
        dv = best[v]
        for e in forward[v]:
            if e in banned_edges:
                continue
            w = heads[e]
            if w in banned_nodes or w in done:
                continue
            nd = dv + weights[e]
            if nd < best.get(w, INF):
                if potential is None:
                    key = nd
                else:
                    pw = potential[w]
                    if pw == INF:
                        continue
                    key = nd + pw
                best[w] = nd
                pred[w] = e
                heapq.heappush(heap, (key, w))
    return None


def yen(
    graph: Graph,
    s: int,
    t: int,
    k: int,
    *,
    potential: bool = True,
    stats: OracleStats | None = None,
) -> list[KPath]:
    """Yen's k shortest simple paths.

    Every accepted path is spurred at each of its nodes; edges leaving the
    spur node along accepted paths with the same root are banned, found with
    a trie over accepted paths.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if s == t:
        raise ValueError("source and target must differ")
    if stats is None:
        stats = OracleStats()
    pot = _distances_to(graph, t, stats) if potential else None
    first = _spur_search(graph, s, t, set(), set(), pot, stats)
    if first is None:
        return []
    weights = graph.weights

    def as_kpath(edges: tuple[int, ...]) -> KPath:
        return KPath(sum(weights[e] for e in edges), edges, tuple(graph.path_nodes(edges)))

    accepted = [as_kpath(tuple(first))]
    trie: dict = {}

    def remember(edges: tuple[int, ...]) -> None:
        node = trie
        for e in edges:
            node = node.setdefault(e, {})

    remember(accepted[0].edges)
    seen = {accepted[0].edges}
    pool: list[tuple[float, tuple[int, ...]]] = []
    while len(accepted) < k:
        last = accepted[-1]
        node = trie
        root_len = 0.0
        for i, spur in enumerate(last.nodes[:-1]):
            banned_nodes = set(last.nodes[:i])
            spur_path = _spur_search(graph, spur, t, banned_nodes, node, pot, stats)
            if spur_path is not None:
                full = last.edges[:i] + tuple(spur_path)
                if full not in seen:
                    seen.add(full)
                    heapq.heappush(pool, (root_len + sum(weights[e] for e in spur_path), full))
            e = last.edges[i]
            node = node[e]
            root_len += weights[e]
        if not pool:
            break
        _, edges = heapq.heappop(pool)
        accepted.append(as_kpath(edges))
        remember(edges)
    return accepted
