"""k shortest simple paths by generalized sidetrack sequences.

Three variants share one engine:

``basic``
    Simplicity of every pushed candidate is decided by walking its path;
    every non-simple candidate that reaches the front of the queue gets a
    fresh shortest-path tree in the graph minus its prefix.
``sb-o``
    Simplicity of all extensions of a processed path is decided at once from
    a block partition of its tree, and trees are cached per prefix so
    siblings deviating at the same node share one tree computation.
``sb-r``
    ``sb-o`` plus an incremental reverse reachability sweep that drops
    non-simple extensions whose prefix cannot be extended to a simple path,
    before they are ever pushed.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from kssp.candidates import Candidate, CandidateQueue, _blocks_for_nodes, sidetrack_sequence, walk_is_simple
from kssp.graph import Graph
from kssp.sptree import INF, NodeMarks, SpTree, compute_sp_tree, tree_path


class Variant(str, enum.Enum):
    BASIC = "basic"
    SB_O = "sb-o"
    SB_R = "sb-r"

    @classmethod
    def parse(cls, value: "str | Variant") -> "Variant":
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise ValueError(f"unknown variant {value!r} (expected one of {names})") from None


@dataclass(frozen=True)
class Query:
    source: int
    target: int
    k: int
    variant: Variant = Variant.SB_O

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.source == self.target:
            raise ValueError("source and target must differ")
        object.__setattr__(self, "variant", Variant.parse(self.variant))


@dataclass
class RunStats:
    dijkstra_calls: int = 0
    polls: int = 0
    pushed: int = 0
    extracted: int = 0
    extracted_nonsimple: int = 0
    repairs_attempted: int = 0
    repairs_discarded: int = 0
    reach_pruned: int = 0
    reach_marks: int = 0
    cache_hits: int = 0
    evicted: int = 0
    block_checks: int = 0
    block_mismatches: int = 0
    exhausted: bool = False
    wall_time: float = 0.0


class KPath(NamedTuple):
    length: float
    edges: tuple[int, ...]
    nodes: tuple[int, ...]


@dataclass
class TraceEvent:
    kind: str  # push, prune, output, repair, discard
    sequence: tuple[int, ...]
    tree_id: int
    length: float
    simple: bool


class TreeCache:
    """Trees computed in ``G - prefix``, keyed by (parent candidate id, deviation index).

    Siblings deviating from the same parent at the same node have the same
    prefix by construction, so the key identifies the node set exactly.
    """

    __slots__ = ("_trees",)

    def __init__(self):
        self._trees: dict[tuple[int, int], SpTree] = {}

    def get(self, parent: int, index: int) -> SpTree | None:
        return self._trees.get((parent, index))

    def put(self, parent: int, index: int, tree: SpTree) -> None:
        self._trees[(parent, index)] = tree

    def __len__(self) -> int:
        return len(self._trees)


class ReachabilitySweep:
    """Incremental reverse reachability towards the target while a path's prefix shrinks.

    For a simple path ``v_0 .. v_l`` the sweep starts with all of
    ``v_0 .. v_{l-1}`` removed and marks every node that still reaches
    ``v_l``.  ``retreat_to(i)`` re-admits path nodes down to ``v_{i+1}`` so
    that the marks describe ``G - {v_0 .. v_i}``; each node is marked at most
    once per sweep.
    """

    __slots__ = ("graph", "nodes", "position", "marked", "_seen", "_blocked")

    def __init__(self, graph: Graph, nodes: Sequence[int], seen: NodeMarks, blocked: NodeMarks):
        self.graph = graph
        self.nodes = nodes
        self._seen = seen
        self._blocked = blocked
        self.marked = 0
        last = len(nodes) - 1
        blocked.reset(nodes[:last])
        seen.reset()
        self.position = last - 1
        self._visit(nodes[last])

    def _visit(self, root: int) -> None:
        seen = self._seen.stamp
        epoch = self._seen.epoch
        blocked = self._blocked.stamp
        bepoch = self._blocked.epoch
        reverse_index = self.graph.reverse_index
        tails = self.graph.tails
        seen[root] = epoch
        marked = 1
        stack = [root]
        while stack:
            v = stack.pop()
            for e in reverse_index[v]:
                u = tails[e]
                if seen[u] != epoch and blocked[u] != bepoch:
                    seen[u] = epoch
                    marked += 1
                    stack.append(u)
        self.marked += marked

    def retreat_to(self, i: int) -> None:
        blocked = self._blocked.stamp
        while self.position > i:
            v = self.nodes[self.position]
            blocked[v] = 0
            self.position -= 1
            if self._seen.stamp[v] != self._seen.epoch:
                self._visit(v)

    def reaches(self, v: int) -> bool:
        return self._seen.stamp[v] == self._seen.epoch


def incremental_reachability(
    graph: Graph,
    parent_path: Sequence[int],
    start: int,
) -> dict[tuple[int, int], bool]:
    """Survival flag of every edge leaving the path at positions ``l-1`` down to ``start``.

    Key ``(i, e)``: edge ``e`` leaves path node ``v_i``; it survives iff its
    head still reaches the target once ``v_0 .. v_i`` are removed.
    """
    nodes = graph.path_nodes(parent_path)
    n = graph.node_count
    sweep = ReachabilitySweep(graph, nodes, NodeMarks(n), NodeMarks(n))
    heads = graph.heads
    flags: dict[tuple[int, int], bool] = {}
    for i in range(len(nodes) - 2, start - 1, -1):
        sweep.retreat_to(i)
        for e in graph.forward_index[nodes[i]]:
            if e != parent_path[i]:
                flags[(i, e)] = sweep.reaches(heads[e])
    return flags


class _Processed(NamedTuple):
    edges: list[int]
    nodes: list[int]
    prefix_len: list[float]  # prefix_len[i] = length of the first i edges


class KsspSolver:
    """One query's mutable state: queue, candidate arena, tree registry, cache, counters.

    ``bound_queue`` enables the remaining-count bound on the queue.
    ``verify_blocks`` cross-checks every block classification against a walk
    of the materialized path.  ``debug`` re-derives every cached tree and
    asserts the structural invariants the algorithm relies on.  ``trace``
    records push/prune/output/repair/discard events.
    """

    def __init__(
        self,
        graph: Graph,
        source: int,
        target: int,
        variant: Variant | str = Variant.SB_O,
        *,
        bound_queue: bool = True,
        verify_blocks: bool = False,
        debug: bool = False,
        trace: bool = False,
    ):
        n = graph.node_count
        if not (0 <= source < n and 0 <= target < n):
            raise ValueError(f"source/target out of range for n={n}")
        if source == target:
            raise ValueError("source and target must differ")
        self.graph = graph
        self.source = source
        self.target = target
        self.variant = Variant.parse(variant)
        self.bound_queue = bound_queue
        self.verify_blocks = verify_blocks
        self.debug = debug
        self.events: list[TraceEvent] | None = [] if trace else None

        self.stats = RunStats()
        self.arena: dict[int, Candidate] = {}
        self.trees: list[SpTree] = []
        self.cache = TreeCache()
        self.queue = CandidateQueue(bounded=bound_queue)
        self._processed: dict[int, _Processed] = {}
        self._next_id = 0
        self._dijkstra_marks = NodeMarks(n)
        self._walk_marks = NodeMarks(n)
        self._reach_seen = NodeMarks(n)
        self._reach_blocked = NodeMarks(n)

    def _new_tree(self, forbidden: Sequence[int]) -> SpTree:
        tree = compute_sp_tree(
            self.graph,
            self.target,
            forbidden,
            tree_id=len(self.trees),
            marks=self._dijkstra_marks,
            stats=self.stats,
        )
        self.trees.append(tree)
        return tree

    def _candidate(self, **fields) -> Candidate:
        c = Candidate(id=self._next_id, **fields)
        self._next_id += 1
        self.arena[c.id] = c
        return c

    def _record(self, kind: str, c: Candidate) -> None:
        if self.events is not None:
            self.events.append(TraceEvent(kind, sidetrack_sequence(c, self.arena), c.tree_id, c.length, c.simple))

    def _push(self, c: Candidate, remaining: int) -> None:
        self.stats.pushed += 1
        self.queue.push(c, remaining)
        self._record("push", c)

    def run(self, k: int) -> list[KPath]:
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        started = time.perf_counter()
        try:
            return self._run(k)
        finally:
            self.stats.evicted = self.queue.evicted
            self.stats.wall_time = time.perf_counter() - started

    def _run(self, k: int) -> list[KPath]:
        stats = self.stats
        t0 = self._new_tree(())
        out: list[KPath] = []
        if not t0.reaches(self.source):
            stats.exhausted = True
            return out
        root = self._candidate(
            parent=None,
            last_sidetrack=None,
            tree_id=t0.tree_id,
            length=t0.dist[self.source],
            deviation_node=self.source,
            deviation_index=0,
            simple=True,
        )
        self._push(root, k)
        queue = self.queue
        while queue:
            c = queue.extract_min()
            stats.extracted += 1
            if c.simple:
                done = self._materialize_processed(c)
                out.append(KPath(c.length, tuple(done.edges), tuple(done.nodes)))
                self._record("output", c)
                if len(out) == k:
                    return out
                self._expand(c, done, k - len(out))
            else:
                stats.extracted_nonsimple += 1
                self._repair(c, k - len(out))
        stats.exhausted = True
        return out

    def _materialize_processed(self, c: Candidate) -> _Processed:
        graph = self.graph
        tree = self.trees[c.tree_id]
        if c.parent is None:
            edges = tree_path(tree, graph, c.deviation_node)
        else:
            parent = self._processed[c.parent]
            e = c.last_sidetrack
            edges = parent.edges[: c.deviation_index]
            edges.append(e)
            edges.extend(tree_path(tree, graph, graph.heads[e]))
        nodes = graph.path_nodes(edges, self.source)
        weights = graph.weights
        prefix_len = [0.0]
        total = 0.0
        for e in edges:
            total += weights[e]
            prefix_len.append(total)
        if self.debug:
            assert walk_is_simple(nodes, self._walk_marks), f"candidate {c.id} flagged simple but is not"
            assert total == c.length or abs(total - c.length) <= 1e-9 * max(1.0, abs(total)), (total, c.length)
        done = _Processed(edges, nodes, prefix_len)
        self._processed[c.id] = done
        return done

    def _expand(self, p: Candidate, done: _Processed, remaining: int) -> None:
        """Push one child per sidetrack leaving the suffix of ``p`` towards a node of ``p``'s tree."""
        graph = self.graph
        stats = self.stats
        tree = self.trees[p.tree_id]
        dist = tree.dist
        heads = graph.heads
        weights = graph.weights
        forward_index = graph.forward_index
        edges, nodes = done.edges, done.nodes
        variant = self.variant
        last = len(nodes) - 1  # sidetracks leaving the target are never useful

        block_of = None
        if variant is not Variant.BASIC:
            block_of = _blocks_for_nodes(tree, nodes, graph).block_of

        children = []  # (position, edge, head, length, simple)
        base = p.length
        for i in range(p.suffix_start, last):
            v = nodes[i]
            tree_e = edges[i]
            dv = dist[v]
            for e in forward_index[v]:
                if e == tree_e:
                    continue
                h = heads[e]
                dh = dist[h]
                if dh == INF:
                    continue
                length = base + (weights[e] + dh - dv)
                if block_of is not None:
                    simple = block_of[h] > i
                    if self.verify_blocks:
                        self._check_block(tree, nodes, i, h, simple)
                else:
                    simple = self._walk_extension(tree, nodes, i, h)
                children.append((i, e, h, length, simple))

        survives = None
        if variant is Variant.SB_R:
            survives = self._reach_filter(nodes, children, p.suffix_start)

        queue = self.queue
        trace = self.events is not None
        for idx, (i, e, h, length, simple) in enumerate(children):
            if survives is None and not trace and queue.rejects(length, self._next_id, simple, remaining):
                # pushing would evict this very candidate again
                self._next_id += 1
                stats.pushed += 1
                queue.evicted += 1
                continue
            c = self._candidate(
                parent=p.id,
                last_sidetrack=e,
                tree_id=p.tree_id,
                length=length,
                deviation_node=nodes[i],
                deviation_index=i,
                simple=simple,
                prefix_edge_count=i,
            )
            if survives is not None and not survives[idx]:
                stats.reach_pruned += 1
                self._record("prune", c)
                del self.arena[c.id]
                continue
            self._push(c, remaining)

    def _reach_filter(self, nodes: list[int], children: list, suffix_start: int) -> list[bool]:
        sweep = ReachabilitySweep(self.graph, nodes, self._reach_seen, self._reach_blocked)
        survives = [True] * len(children)
        # children are ordered by ascending position; the sweep only moves downwards
        for idx in range(len(children) - 1, -1, -1):
            i, e, h, length, simple = children[idx]
            if simple:
                continue
            sweep.retreat_to(i)
            survives[idx] = sweep.reaches(h)
        sweep.retreat_to(suffix_start)
        self.stats.reach_marks += sweep.marked
        return survives

    def _walk_extension(self, tree: SpTree, nodes: list[int], i: int, h: int) -> bool:
        """Pivot check: walk prefix ``v_0..v_i`` then the tree path from ``h``, marking nodes."""
        marks = self._walk_marks
        epoch = marks.reset()
        stamp = marks.stamp
        for j in range(i + 1):
            stamp[nodes[j]] = epoch
        tree_edge = tree.tree_edge
        heads = self.graph.heads
        target = self.target
        v = h
        while True:
            if stamp[v] == epoch:
                return False
            stamp[v] = epoch
            if v == target:
                return True
            v = heads[tree_edge[v]]

    def _check_block(self, tree: SpTree, nodes: list[int], i: int, h: int, simple: bool) -> None:
        self.stats.block_checks += 1
        if self._walk_extension(tree, nodes, i, h) != simple:
            self.stats.block_mismatches += 1

    def _repair(self, c: Candidate, remaining: int) -> None:
        """Re-route the suffix of a non-simple candidate through ``G - prefix``."""
        stats = self.stats
        parent_id = c.parent
        i = c.deviation_index
        parent = self._processed.get(parent_id)
        if parent is None or not self.arena[parent_id].simple:
            raise AssertionError(f"non-simple candidate {c.id} has a non-simple or unprocessed parent")
        stats.repairs_attempted += 1
        tree = None
        if self.variant is not Variant.BASIC:
            tree = self.cache.get(parent_id, i)
            if tree is not None:
                stats.cache_hits += 1
                if self.debug:
                    fresh = compute_sp_tree(self.graph, self.target, parent.nodes[: i + 1])
                    assert fresh.dist == tree.dist, "cached tree differs from a fresh computation"
        if tree is None:
            tree = self._new_tree(parent.nodes[: i + 1])
            if self.variant is not Variant.BASIC:
                self.cache.put(parent_id, i, tree)
        e = c.last_sidetrack
        h = self.graph.heads[e]
        self._record("repair", c)
        if tree.dist[h] == INF:
            stats.repairs_discarded += 1
            self._record("discard", c)
            return
        length = parent.prefix_len[i] + self.graph.weights[e] + tree.dist[h]
        if self.debug:
            assert length >= c.length - 1e-9 * max(1.0, abs(length)), "repair shortened a candidate"
        fixed = self._candidate(
            parent=parent_id,
            last_sidetrack=e,
            tree_id=tree.tree_id,
            length=length,
            deviation_node=c.deviation_node,
            deviation_index=i,
            simple=True,
            prefix_edge_count=i,
        )
        self._push(fixed, remaining)


def solve(graph: Graph, query: Query, **options) -> tuple[list[KPath], RunStats]:
    """Up to ``query.k`` shortest simple source-target paths, shortest first."""
    solver = KsspSolver(graph, query.source, query.target, query.variant, **options)
    paths = solver.run(query.k)
    return paths, solver.stats


def run_basic(graph: Graph, source: int, target: int, k: int, **options) -> tuple[list[KPath], RunStats]:
    return solve(graph, Query(source, target, k, Variant.BASIC), **options)


def run_sb(
    graph: Graph,
    source: int,
    target: int,
    k: int,
    *,
    reachability: bool = False,
    **options,
) -> tuple[list[KPath], RunStats]:
    variant = Variant.SB_R if reachability else Variant.SB_O
    return solve(graph, Query(source, target, k, variant), **options)
