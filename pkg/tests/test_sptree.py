import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kssp.graph import build_graph, generate_random
from kssp.oracle import enumerate_all_simple_paths
from kssp.sptree import (
    INF,
    NO_EDGE,
    NodeMarks,
    UnreachableNodeError,
    compute_sp_tree,
    is_sidetrack,
    sidetrack_cost,
    tree_path,
)
from kssp.solver import RunStats
from support import A, B, C, D, E_S_V1, E_V1_V3, E_V3_T, E_V2_V1, E_V4_V3, S, T, V1, V2, V3, V4, random_multigraph


def bellman_ford_to(graph, t, forbidden=()):
    dist = [INF] * graph.node_count
    dist[t] = 0.0
    for _ in range(graph.node_count):
        changed = False
        for e in range(graph.edge_count):
            u, v = graph.tails[e], graph.heads[e]
            if u in forbidden or v in forbidden:
                continue
            if dist[v] + graph.weights[e] < dist[u]:
                dist[u] = dist[v] + graph.weights[e]
                changed = True
        if not changed:
            break
    return dist


def test_single_node_tree():
    tree = compute_sp_tree(build_graph(1, []), 0)
    assert tree.dist == [0.0] and tree.tree_edge == [NO_EDGE] and tree.polls == 1


def test_target_in_forbidden_set_is_an_error(example):
    with pytest.raises(ValueError):
        compute_sp_tree(example, T, {T})


def test_six_node_initial_tree(example):
    t0 = compute_sp_tree(example, T)
    assert t0.dist == [3, 2, 3, 1, 2, 0]
    assert t0.tree_edge[S] == E_S_V1 and t0.tree_edge[V1] == E_V1_V3 and t0.tree_edge[V3] == E_V3_T
    assert t0.tree_edge[V2] == E_V2_V1 and t0.tree_edge[V4] == E_V4_V3 and t0.tree_edge[T] == NO_EDGE
    assert tree_path(t0, example, S) == [E_S_V1, E_V1_V3, E_V3_T]
    assert tree_path(t0, example, T) == []


def test_six_node_tree_without_prefix(example):
    """Removing s, v1, v3 leaves a tree made of b and d only."""
    t1 = compute_sp_tree(example, T, {S, V1, V3})
    tree_edges = {e for e in t1.tree_edge if e != NO_EDGE}
    assert tree_edges == {B, D}
    assert [v for v in range(6) if t1.reaches(v)] == [V2, V4, T]
    assert t1.tree_edge[S] == NO_EDGE and t1.dist[S] == INF


def test_six_node_sidetracks(example):
    t0 = compute_sp_tree(example, T)
    for e in (A, B, C, D):
        assert is_sidetrack(t0, example, e)
    for e in (E_S_V1, E_V1_V3, E_V3_T, E_V2_V1, E_V4_V3):
        assert not is_sidetrack(t0, example, e)
        assert sidetrack_cost(t0, example, e) == 0


def test_six_node_sidetrack_costs_match_path_enumeration(example):
    t0 = compute_sp_tree(example, T)

    def shortest(v):
        if v == T:
            return 0.0
        return enumerate_all_simple_paths(example, v, T)[0].length

    for e in (A, B, C, D):
        u, w = example.tails[e], example.heads[e]
        expected = example.weights[e] + shortest(w) - shortest(u)
        assert sidetrack_cost(t0, example, e) == expected > 0


def test_parallel_copy_of_tree_edge_is_a_zero_cost_sidetrack():
    g = build_graph(2, [(0, 1, 4), (0, 1, 4)])
    tree = compute_sp_tree(g, 1)
    chosen = tree.tree_edge[0]
    other = 1 - chosen
    assert not is_sidetrack(tree, g, chosen)
    assert is_sidetrack(tree, g, other)
    assert sidetrack_cost(tree, g, other) == 0


def test_tie_sidetrack_has_zero_cost():
    # two equally short routes 0->1->3 and 0->2->3
    g = build_graph(4, [(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)])
    tree = compute_sp_tree(g, 3)
    side = 2 if tree.tree_edge[0] == 0 else 0
    assert sidetrack_cost(tree, g, side) == 0


def test_sidetrack_cost_unreachable_endpoint(example):
    t1 = compute_sp_tree(example, T, {S, V1, V3})
    with pytest.raises(UnreachableNodeError, match="head"):
        sidetrack_cost(t1, example, E_V2_V1)
    with pytest.raises(UnreachableNodeError, match="tail"):
        sidetrack_cost(t1, example, A)
    with pytest.raises(UnreachableNodeError):
        tree_path(t1, example, V1)


def test_stats_counters_accumulate(example):
    stats = RunStats()
    a = compute_sp_tree(example, T, stats=stats)
    b = compute_sp_tree(example, T, {S, V1, V3}, stats=stats)
    assert stats.dijkstra_calls == 2
    assert stats.polls == a.polls + b.polls == 6 + 3


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 40), density=st.integers(1, 4), forbid=st.integers(0, 5))
def test_distances_match_bellman_ford(seed, n, density, forbid):
    rng = random.Random(seed)
    g = random_multigraph(rng, n, rng.randint(0, density * n), 20)
    t = rng.randrange(n)
    forbidden = set(rng.sample([v for v in range(n) if v != t], min(forbid, n - 1)))
    tree = compute_sp_tree(g, t, forbidden, marks=NodeMarks(n))
    assert tree.dist == bellman_ford_to(g, t, forbidden)

    reached = [v for v in range(n) if tree.reaches(v)]
    assert tree.polls == len(reached) <= n
    for v in range(n):
        if v in forbidden:
            assert tree.dist[v] == INF and tree.tree_edge[v] == NO_EDGE
    for v in reached:
        path = tree_path(tree, g, v)
        assert sum(g.weights[e] for e in path) == tree.dist[v]
        e = tree.tree_edge[v]
        if v != t:
            assert tree.dist[v] == g.weights[e] + tree.dist[g.heads[e]]
    for e in range(g.edge_count):
        u, w = g.tails[e], g.heads[e]
        if tree.reaches(u) and tree.reaches(w):
            assert sidetrack_cost(tree, g, e) >= 0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_restriction_monotonicity(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 30)
    g = generate_random(n, rng.randint(n, 4 * n), 15, seed, min_weight=0)
    t = rng.randrange(n)
    others = [v for v in range(n) if v != t]
    small = set(rng.sample(others, rng.randint(0, len(others) // 2)))
    large = small | set(rng.sample(others, rng.randint(0, len(others))))
    da = compute_sp_tree(g, t, small).dist
    db = compute_sp_tree(g, t, large).dist
    for v in range(n):
        if db[v] != INF:
            assert da[v] <= db[v]


def test_marks_are_reusable_across_computations():
    g = generate_random(30, 90, 10, 4)
    marks = NodeMarks(30)
    first = compute_sp_tree(g, 0, {1, 2, 3}, marks=marks)
    second = compute_sp_tree(g, 0, (), marks=marks)
    assert second.dist == bellman_ford_to(g, 0)
    assert first.dist == bellman_ford_to(g, 0, {1, 2, 3})
