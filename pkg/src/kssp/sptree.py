"""Reversed single-target shortest-path trees over node-restricted subgraphs."""

from __future__ import annotations

from heapq import heappop, heappush
from typing import Iterable, Protocol

from kssp.graph import Graph

INF = float("inf")
NO_EDGE = -1


class UnreachableNodeError(ValueError):
    """A node has no path to the tree's target."""


class _CallCounter(Protocol):
    dijkstra_calls: int
    polls: int


class NodeMarks:
    """Epoch-stamped node set that clears in O(1).

    One instance is scratch space for one worker; it must not be shared
    between concurrently running computations.
    """

    __slots__ = ("stamp", "epoch")

    def __init__(self, node_count: int):
        self.stamp = [0] * node_count
        self.epoch = 0

    def reset(self, nodes: Iterable[int] = ()) -> int:
        self.epoch += 1
        epoch = self.epoch
        stamp = self.stamp
        for v in nodes:
            stamp[v] = epoch
        return epoch

    def add(self, v: int) -> None:
        self.stamp[v] = self.epoch

    def __contains__(self, v: int) -> bool:
        return self.stamp[v] == self.epoch


class SpTree:
    """Shortest-path tree towards ``target``.

    ``dist[v]`` is ``INF`` and ``tree_edge[v]`` is ``NO_EDGE`` for nodes that
    cannot reach the target (including forbidden nodes).  Instances are never
    mutated after construction apart from the lazily built child lists.
    """

    __slots__ = ("tree_id", "target", "tree_edge", "dist", "polls", "forbidden", "_children")

    def __init__(
        self,
        tree_id: int,
        target: int,
        tree_edge: list[int],
        dist: list[float],
        polls: int,
        forbidden: frozenset[int] = frozenset(),
    ):
        self.tree_id = tree_id
        self.target = target
        self.tree_edge = tree_edge
        self.dist = dist
        self.polls = polls
        self.forbidden = forbidden
        self._children: list[list[int]] | None = None

    def reaches(self, v: int) -> bool:
        return self.dist[v] != INF

    def children(self, graph: Graph) -> list[list[int]]:
        """``children[v]``: nodes whose tree edge points at ``v``."""
        if self._children is None:
            kids: list[list[int]] = [[] for _ in range(graph.node_count)]
            heads = graph.heads
            for v, e in enumerate(self.tree_edge):
                if e != NO_EDGE:
                    kids[heads[e]].append(v)
            self._children = kids
        return self._children

    def __repr__(self) -> str:
        reached = sum(1 for d in self.dist if d != INF)
        return f"SpTree(id={self.tree_id}, target={self.target}, reached={reached}, polls={self.polls})"


def compute_sp_tree(
    graph: Graph,
    target: int,
    forbidden: Iterable[int] = (),
    *,
    tree_id: int = 0,
    marks: NodeMarks | None = None,
    stats: _CallCounter | None = None,
) -> SpTree:
    """Dijkstra from ``target`` over reverse edges of ``graph`` minus ``forbidden``.

    Runs until the queue is empty.  ``polls`` counts settled nodes; stale heap
    entries are not polls.
    """
    forbidden = frozenset(forbidden)
    if target in forbidden:
        raise ValueError(f"target {target} is in the forbidden set")
    n = graph.node_count
    if marks is None:
        marks = NodeMarks(n)
    epoch = marks.reset(forbidden)
    stamp = marks.stamp

    dist = [INF] * n
    tree_edge = [NO_EDGE] * n
    dist[target] = 0.0
    reverse_index = graph.reverse_index
    tails = graph.tails
    weights = graph.weights
    heap = [(0.0, target)]
    polls = 0
    while heap:
        d, v = heappop(heap)
        if d > dist[v]:
            continue
        polls += 1
        for e in reverse_index[v]:
            u = tails[e]
            nd = d + weights[e]
            if nd < dist[u] and stamp[u] != epoch:
                dist[u] = nd
                tree_edge[u] = e
                heappush(heap, (nd, u))
    if stats is not None:
        stats.dijkstra_calls += 1
        stats.polls += polls
    return SpTree(tree_id, target, tree_edge, dist, polls, forbidden)


def is_sidetrack(tree: SpTree, graph: Graph, edge_id: int) -> bool:
    return tree.tree_edge[graph.tails[edge_id]] != edge_id


def sidetrack_cost(tree: SpTree, graph: Graph, edge_id: int) -> float:
    """``c(e) + d(head) - d(tail)``: extra length of leaving the tree through ``e``."""
    tail, head = graph.tails[edge_id], graph.heads[edge_id]
    if tree.dist[tail] == INF:
        raise UnreachableNodeError(f"tail {tail} of edge {edge_id} cannot reach {tree.target}")
    if tree.dist[head] == INF:
        raise UnreachableNodeError(f"head {head} of edge {edge_id} cannot reach {tree.target}")
    return graph.weights[edge_id] + tree.dist[head] - tree.dist[tail]


def tree_path(tree: SpTree, graph: Graph, v: int) -> list[int]:
    """Edge ids of the tree path from ``v`` to the target."""
    if tree.dist[v] == INF:
        raise UnreachableNodeError(f"node {v} cannot reach {tree.target}")
    tree_edge = tree.tree_edge
    heads = graph.heads
    target = tree.target
    path = []
    while v != target:
        e = tree_edge[v]
        path.append(e)
        v = heads[e]
    return path
