import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kssp.candidates import (
    Candidate,
    CandidateQueue,
    IntervalHeap,
    classify_extension,
    compute_blocks,
    materialize,
    sidetrack_sequence,
    walk_is_simple,
)
from kssp.graph import generate_random
from kssp.sptree import UnreachableNodeError, compute_sp_tree, tree_path
from support import A, C, S, T, V1, V2, V3, V4, named


def cand(cid, length, simple=True, parent=None):
    return Candidate(
        id=cid, parent=parent, last_sidetrack=None, tree_id=0, length=length,
        deviation_node=0, deviation_index=0, simple=simple,
    )


# ---- interval heap -------------------------------------------------------

ops = st.lists(
    st.one_of(
        st.tuples(st.just("push"), st.integers(-50, 50)),
        st.tuples(st.just("min"), st.none()),
        st.tuples(st.just("max"), st.none()),
    ),
    max_size=300,
)


@settings(max_examples=300)
@given(ops)
def test_interval_heap_matches_sorted_list(script):
    heap, ref = IntervalHeap(), []
    for i, (op, x) in enumerate(script):
        if op == "push":
            heap.push((x, i))
            ref.append((x, i))
            ref.sort()
        elif not ref:
            with pytest.raises(IndexError):
                heap.pop_min() if op == "min" else heap.pop_max()
        elif op == "min":
            assert heap.pop_min() == ref.pop(0)
        else:
            assert heap.pop_max() == ref.pop()
        assert len(heap) == len(ref)
        if ref:
            assert heap.min() == ref[0] and heap.max() == ref[-1]


def test_interval_heap_drains_in_order():
    rng = random.Random(3)
    items = [rng.random() for _ in range(1000)]
    heap = IntervalHeap(items)
    assert [heap.pop_min() for _ in range(500)] == sorted(items)[:500]
    assert [heap.pop_max() for _ in range(500)] == sorted(items)[500:][::-1]
    assert not heap


# ---- candidate queue -------------------------------------------------------

def test_queue_push_into_empty():
    q = CandidateQueue()
    q.push(cand(0, 3.0), remaining=5)
    assert len(q) == 1 and q.simple_count == 1


def test_queue_bound_deletes_max():
    q = CandidateQueue()
    q.push(cand(0, 3.0), remaining=1)
    q.push(cand(1, 5.0), remaining=1)
    assert len(q) == 1 and q.extract_min().id == 0
    q.push(cand(2, 5.0), remaining=1)
    q.push(cand(3, 2.0), remaining=1)
    assert len(q) == 1 and q.extract_min().id == 3
    assert q.evicted == 2


def test_queue_keeps_nonsimple_until_enough_simple():
    q = CandidateQueue()
    q.push(cand(0, 9.0, simple=False), remaining=1)
    q.push(cand(1, 8.0, simple=False), remaining=1)
    assert len(q) == 2
    q.push(cand(2, 5.0), remaining=1)
    assert len(q) == 3 and q.simple_count == 1
    # a second simple candidate trips the bound; the max is dropped until one simple remains
    q.push(cand(3, 6.0), remaining=1)
    assert len(q) == 1 and q.simple_count == 1 and q.extract_min().id == 2
    assert q.evicted == 3


def test_queue_unbounded_keeps_everything():
    q = CandidateQueue(bounded=False)
    for i in range(10):
        q.push(cand(i, float(10 - i)), remaining=1)
    assert len(q) == 10
    assert [q.extract_min().length for _ in range(10)] == [float(x) for x in range(1, 11)]


def test_queue_ties_broken_by_id():
    q = CandidateQueue()
    for i in (4, 1, 3):
        q.push(cand(i, 2.0), remaining=3)
    assert [q.extract_min().id for _ in range(3)] == [1, 3, 4]


def test_queue_errors():
    q = CandidateQueue()
    with pytest.raises(IndexError):
        q.extract_min()
    with pytest.raises(ValueError):
        q.push(cand(0, 1.0), remaining=0)


@settings(max_examples=200)
@given(st.lists(st.one_of(st.tuples(st.integers(0, 30), st.booleans()), st.none()), max_size=200))
def test_queue_extractions_non_decreasing(script):
    q = CandidateQueue(bounded=False)
    ref = []
    for i, step in enumerate(script):
        if step is None:
            if ref:
                ref.sort()
                assert q.extract_min().length == ref.pop(0)
        else:
            q.push(cand(i, float(step[0]), simple=step[1]), remaining=1)
            ref.append(float(step[0]))
    drained = [q.extract_min().length for _ in range(len(q))]
    assert drained == sorted(drained) == sorted(ref)


# ---- materialization ---------------------------------------------------

def test_materialize_six_node(example):
    t0 = compute_sp_tree(example, T)
    t1 = compute_sp_tree(example, T, {S, V1, V3}, tree_id=1)
    trees = {0: t0, 1: t1}
    root = Candidate(0, None, None, 0, 3.0, S, 0, True)
    a = Candidate(1, 0, A, 0, 4.0, S, 0, True)
    c_t0 = Candidate(2, 0, C, 0, 6.0, V3, 2, False, 2)
    c_t1 = Candidate(3, 0, C, 1, 8.0, V3, 2, True, 2)
    arena = {x.id: x for x in (root, a, c_t0, c_t1)}

    def nodes_of(x):
        return named(example.path_nodes(materialize(x, arena, trees, example)))

    assert nodes_of(root) == "s v1 v3 t"
    assert nodes_of(a) == "s v2 v1 v3 t"
    assert nodes_of(c_t0) == "s v1 v3 v2 v1 v3 t"
    assert nodes_of(c_t1) == "s v1 v3 v2 v4 t"
    edges = materialize(c_t1, arena, trees, example)
    assert example.path_length(edges) == c_t1.length
    assert sidetrack_sequence(c_t1, arena) == (C,)
    with pytest.raises(LookupError):
        materialize(c_t1, arena, {0: t0}, example)


def test_walk_is_simple():
    assert walk_is_simple([0, 1, 2])
    assert not walk_is_simple([0, 1, 0])
    assert walk_is_simple([])


# ---- blocks -------------------------------------------------------------

def test_blocks_trivial_path():
    g = generate_random(10, 30, 5, 1)
    tree = compute_sp_tree(g, 4)
    blocks = compute_blocks(tree, [], g)
    assert blocks.path_length_blocks == 1
    assert all(blocks.block(v) == 0 for v in range(10))


def test_blocks_six_node(example):
    t0 = compute_sp_tree(example, T)
    path = tree_path(t0, example, S)
    blocks = compute_blocks(t0, path, example)
    assert blocks.block_of == [0, 1, 1, 2, 2, 3]
    assert blocks.path_length_blocks == 4
    # c = (v3, v2) returns to an earlier block; a = (s, v2) moves forward
    assert classify_extension(blocks, V3, V2) is False
    assert classify_extension(blocks, S, V2) is True
    assert classify_extension(blocks, V2, V2) is False


def test_blocks_reject_path_not_ending_at_target(example):
    t0 = compute_sp_tree(example, T)
    with pytest.raises(ValueError):
        compute_blocks(t0, tree_path(t0, example, S)[:-1], example)


def test_classify_unreachable_head(example):
    t1 = compute_sp_tree(example, T, {S, V1, V3})
    blocks = compute_blocks(t1, tree_path(t1, example, V2), example)
    with pytest.raises(UnreachableNodeError):
        classify_extension(blocks, V2, V1)
    assert classify_extension(blocks, V2, V4) is True


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_blocks_match_tree_walk(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 60)
    g = generate_random(n, rng.randint(n, 4 * n), 20, seed)
    t = rng.randrange(n)
    s = rng.choice([v for v in range(n) if v != t])
    tree = compute_sp_tree(g, t)
    path = tree_path(tree, g, s)
    nodes = g.path_nodes(path)
    blocks = compute_blocks(tree, path, g)
    position = {v: i for i, v in enumerate(nodes)}
    for v in range(n):
        x = v
        while x not in position:
            x = g.heads[tree.tree_edge[x]]
        assert blocks.block(v) == position[x]
