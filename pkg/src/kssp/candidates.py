"""Candidate paths as generalized sidetrack sequences, block partitions, and the bounded candidate queue."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from kssp.graph import Graph
from kssp.sptree import NodeMarks, SpTree, UnreachableNodeError, tree_path

NO_BLOCK = -1


@dataclass(slots=True)
class Candidate:
    """One node of the sidetrack-sequence tree.

    A candidate stores only its last sidetrack and the tree that sidetrack is
    associated with; the rest of its sequence lives in its ancestors.  The
    root (the shortest path in the initial tree) has ``parent is None`` and
    ``last_sidetrack is None``; its ``deviation_node`` is the source.

    ``deviation_index`` is the position of ``deviation_node`` in the parent's
    node sequence, so the child keeps the parent's first ``deviation_index``
    edges and ``prefix_edge_count == deviation_index``.
    """

    id: int
    parent: int | None
    last_sidetrack: int | None
    tree_id: int
    length: float
    deviation_node: int
    deviation_index: int
    simple: bool
    prefix_edge_count: int = 0

    @property
    def suffix_start(self) -> int:
        """Index (in this candidate's node sequence) of the first suffix node."""
        return 0 if self.parent is None else self.deviation_index + 1


def sidetrack_sequence(candidate: Candidate, arena: Mapping[int, Candidate] | Sequence[Candidate]) -> tuple[int, ...]:
    seq = []
    c = candidate
    while c.parent is not None:
        seq.append(c.last_sidetrack)
        c = arena[c.parent]
    return tuple(reversed(seq))


def materialize(
    candidate: Candidate,
    arena: Mapping[int, Candidate] | Sequence[Candidate],
    trees: Mapping[int, SpTree] | Sequence[SpTree],
    graph: Graph,
) -> list[int]:
    """Explicit s-t edge sequence represented by ``candidate``.

    Start at the source on the root's tree; each sidetrack keeps the first
    ``deviation_index`` edges so far, crosses the sidetrack and follows the
    sidetrack's own tree to the target.
    """
    chain = []
    c = candidate
    while c.parent is not None:
        chain.append(c)
        c = arena[c.parent]
    try:
        edges = tree_path(trees[c.tree_id], graph, c.deviation_node)
        for c in reversed(chain):
            e = c.last_sidetrack
            edges = edges[: c.deviation_index]
            edges.append(e)
            edges.extend(tree_path(trees[c.tree_id], graph, graph.heads[e]))
    except (KeyError, IndexError) as exc:
        raise LookupError(f"tree registry has no tree {c.tree_id} for candidate {c.id}") from exc
    return edges


def walk_is_simple(nodes: Sequence[int], marks: NodeMarks | None = None, node_count: int | None = None) -> bool:
    """Walk the node sequence marking visited nodes; a second visit means a cycle."""
    if marks is None:
        marks = NodeMarks(node_count if node_count is not None else max(nodes, default=-1) + 1)
    epoch = marks.reset()
    stamp = marks.stamp
    for v in nodes:
        if stamp[v] == epoch:
            return False
        stamp[v] = epoch
    return True


@dataclass(slots=True)
class BlockPartition:
    """``block_of[v]`` is the index of the first path node met walking the tree from ``v``."""

    block_of: list[int]
    path_length_blocks: int

    def block(self, v: int) -> int | None:
        b = self.block_of[v]
        return None if b == NO_BLOCK else b


def compute_blocks(tree: SpTree, path: Sequence[int], graph: Graph, *, start: int | None = None) -> BlockPartition:
    """Split the tree at every node of ``path`` (an s-t edge sequence) and label the pieces.

    Each path node ``v_i`` gets block ``i``.  A node outside the path gets the
    block of the first path node on its tree path to the target, found by one
    traversal of the tree's child lists; nodes outside the tree get no block.
    """
    if path:
        nodes = graph.path_nodes(path)
    else:
        nodes = [tree.target if start is None else start]
    if nodes[-1] != tree.target:
        raise ValueError(f"path ends in {nodes[-1]}, tree target is {tree.target}")
    return _blocks_for_nodes(tree, nodes, graph)


def _blocks_for_nodes(tree: SpTree, nodes: Sequence[int], graph: Graph) -> BlockPartition:
    block_of = [NO_BLOCK] * graph.node_count
    for i, v in enumerate(nodes):
        if block_of[v] != NO_BLOCK:
            raise ValueError(f"path visits node {v} twice")
        block_of[v] = i
    children = tree.children(graph)
    for i, v in enumerate(nodes):
        stack = [v]
        while stack:
            x = stack.pop()
            for y in children[x]:
                if block_of[y] == NO_BLOCK:
                    block_of[y] = i
                    stack.append(y)
    return BlockPartition(block_of, len(nodes))


def classify_extension(blocks: BlockPartition, tail: int, head: int) -> bool:
    """True iff leaving the path at ``tail`` through an edge into ``head`` stays simple."""
    i = blocks.block_of[tail]
    j = blocks.block_of[head]
    if j == NO_BLOCK:
        raise UnreachableNodeError(f"head {head} has no block")
    if i == NO_BLOCK:
        raise UnreachableNodeError(f"tail {tail} has no block")
    return i < j


class IntervalHeap:
    """Double-ended priority queue.

    Node ``i`` owns slots ``2i`` (its minimum) and ``2i + 1`` (its maximum);
    the minima form a min-heap and the maxima a max-heap.  Items must be
    totally ordered; callers break ties inside the item itself.
    """

    __slots__ = ("_a",)

    def __init__(self, items=()):
        self._a: list[Any] = []
        for x in items:
            self.push(x)

    def __len__(self) -> int:
        return len(self._a)

    def __bool__(self) -> bool:
        return bool(self._a)

    def min(self):
        if not self._a:
            raise IndexError("min of empty heap")
        return self._a[0]

    def max(self):
        a = self._a
        if not a:
            raise IndexError("max of empty heap")
        return a[1] if len(a) > 1 else a[0]

    def push(self, x) -> None:
        a = self._a
        pos = len(a)
        a.append(x)
        if pos == 0:
            return
        node = pos >> 1
        if pos & 1:
            # second slot of a node: order the pair, then bubble whichever moved
            lo = pos - 1
            if x < a[lo]:
                a[lo], a[pos] = x, a[lo]
                self._bubble_min(node)
            else:
                self._bubble_max(node, pos)
        else:
            parent = (node - 1) >> 1
            if x < a[2 * parent]:
                self._bubble_min(node)
            elif x > a[2 * parent + 1]:
                self._bubble_max(node, pos)

    def _bubble_min(self, node: int) -> None:
        a = self._a
        x = a[2 * node]
        while node > 0:
            parent = (node - 1) >> 1
            p = a[2 * parent]
            if x < p:
                a[2 * node] = p
                node = parent
            else:
                break
        a[2 * node] = x

    def _bubble_max(self, node: int, pos: int) -> None:
        # pos is the slot currently holding the moving item (a lone element sits in slot 2*node)
        a = self._a
        x = a[pos]
        while node > 0:
            parent = (node - 1) >> 1
            ppos = 2 * parent + 1
            p = a[ppos]
            if x > p:
                a[pos] = p
                node = parent
                pos = ppos
            else:
                break
        a[pos] = x

    def pop_min(self):
        a = self._a
        if not a:
            raise IndexError("pop from empty heap")
        top = a[0]
        x = a.pop()
        n = len(a)
        if n == 0:
            return top
        i = 0
        while True:
            hi = 2 * i + 1
            if hi < n and x > a[hi]:
                x, a[hi] = a[hi], x
            c = 2 * i + 1
            lc = 2 * c
            if lc >= n:
                break
            rlc = lc + 2
            if rlc < n and a[rlc] < a[lc]:
                lc = rlc
                c += 1
            if a[lc] < x:
                a[2 * i] = a[lc]
                i = c
            else:
                break
        a[2 * i] = x
        return top

    def pop_max(self):
        a = self._a
        n = len(a)
        if n <= 2:
            if not a:
                raise IndexError("pop from empty heap")
            return a.pop()
        top = a[1]
        x = a.pop()
        n -= 1
        i = 0
        while True:
            lo = 2 * i
            if x < a[lo]:
                x, a[lo] = a[lo], x
            c = 2 * i + 1
            best = -1
            for child in (c, c + 1):
                cpos = 2 * child + 1
                if cpos >= n:
                    cpos -= 1
                    if cpos >= n:
                        continue
                if best < 0 or a[cpos] > a[best]:
                    best = cpos
            if best >= 0 and a[best] > x:
                a[2 * i + 1] = a[best]
                if best & 1:
                    i = best >> 1
                else:
                    # lone element in the last node: it has no pair to respect
                    a[best] = x
                    return top
            else:
                break
        a[2 * i + 1] = x
        return top

    def __iter__(self):
        return iter(self._a)


class CandidateQueue:
    """Interval heap of candidates keyed by ``(length, id)``.

    ``push`` bounds the queue: while more than ``remaining`` known-simple
    candidates are held, the maximum is evicted.  Each held simple candidate
    yields a path of exactly its key and repairs only lengthen non-simple
    ones, so the evicted maximum can never be among the outstanding answers.
    """

    __slots__ = ("_heap", "simple_count", "evicted", "bounded")

    def __init__(self, bounded: bool = True):
        self._heap = IntervalHeap()
        self.simple_count = 0
        self.evicted = 0
        self.bounded = bounded

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)

    def rejects(self, length: float, cid: int, simple: bool, remaining: int) -> bool:
        """Whether pushing this key would only evict it again straight away."""
        if not (self.bounded and simple and self.simple_count >= remaining and self._heap):
            return False
        top = self._heap.max()
        return length > top[0] or (length == top[0] and cid > top[1])

    def push(self, c: Candidate, remaining: int) -> None:
        if remaining < 1:
            raise ValueError("remaining must be at least 1")
        if self.rejects(c.length, c.id, c.simple, remaining):
            self.evicted += 1
            return
        heap = self._heap
        heap.push((c.length, c.id, c))
        if c.simple:
            self.simple_count += 1
        if self.bounded:
            while self.simple_count > remaining:
                dropped = heap.pop_max()[2]
                self.evicted += 1
                if dropped.simple:
                    self.simple_count -= 1

    def extract_min(self) -> Candidate:
        if not self._heap:
            raise IndexError("extract from empty candidate queue")
        c = self._heap.pop_min()[2]
        if c.simple:
            self.simple_count -= 1
        return c

    def peek_min(self) -> Candidate:
        return self._heap.min()[2]
