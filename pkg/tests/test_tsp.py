import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curverecon.errors import DisconnectedError, InvalidInputError
from curverecon.graphs import ProximityGraph
from curverecon.tsp import (
    Tour,
    improving_swaps,
    minimum_spanning_tree,
    preorder_tour,
    solve_tsp,
    tree_weight,
    two_opt_refine,
)
from oracles import min_spanning_weight, optimal_tour_length, tour_length


def euclid(p):
    p = np.asarray(p, dtype=float)
    return np.linalg.norm(p[:, None] - p[None], axis=-1)


def complete(D):
    n = len(D)
    return ProximityGraph(n, ((a, b, D[a, b], "sigdv") for a, b in itertools.combinations(range(n), 2)))


SQUARE = euclid([[0, 0], [1, 0], [1, 1], [0, 1]])
planar = st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=4, max_size=10, unique=True).map(np.array)
planar_small = st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=3, max_size=6, unique=True).map(np.array)


def test_tour_invariants():
    t = Tour.from_order([2, 0, 3, 1], SQUARE)
    assert t.length == pytest.approx(tour_length([2, 0, 3, 1], SQUARE))
    assert t.canonical().order == (0, 2, 1, 3)
    assert Tour.from_order([0, 1, 2, 3], SQUARE).canonical().order == (0, 1, 2, 3)
    assert Tour.from_order([0, 3, 2, 1], SQUARE).canonical().order == (0, 1, 2, 3)
    with pytest.raises(InvalidInputError):
        Tour.from_order([0, 1, 1], SQUARE)


def test_mst_path_graph_is_itself():
    D = np.array([[0, 1, 3, 6], [1, 0, 2, 5], [3, 2, 0, 3], [6, 5, 3, 0.0]])
    g = ProximityGraph(4, [(0, 1, 1, "sig"), (1, 2, 2, "sig"), (2, 3, 3, "sig")])
    assert minimum_spanning_tree(g, D) == [(0, 1), (1, 2), (2, 3)]


def test_mst_k4_matches_enumeration():
    D = np.array([[0, 1, 1.2, 5], [1, 0, 1.1, 4], [1.2, 1.1, 0, 4.5], [5, 4, 4.5, 0]])
    tree = minimum_spanning_tree(complete(D), D)
    w = {(a, b): D[a, b] for a, b in itertools.combinations(range(4), 2)}
    assert tree_weight(tree, D) == pytest.approx(min_spanning_weight(4, w))
    assert len(tree) == 3


def test_mst_tie_picks_smallest_edge():
    D = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0.0]])
    assert minimum_spanning_tree(complete(D), D) == [(0, 1), (0, 2)]
    D = np.ones((4, 4)) - np.eye(4)
    assert minimum_spanning_tree(complete(D), D) == [(0, 1), (0, 2), (0, 3)]


def test_mst_only_uses_graph_edges():
    D = euclid([[0, 0], [1, 0], [2, 0]])
    g = ProximityGraph(3, [(0, 2, 2.0, "sig"), (1, 2, 1.0, "sig")])
    assert sorted(minimum_spanning_tree(g, D)) == [(0, 2), (2, 1)]


def test_mst_disconnected():
    with pytest.raises(DisconnectedError):
        minimum_spanning_tree(ProximityGraph(3, [(0, 1, 1.0, "sig")]), SQUARE[:3, :3])


@given(planar_small)
def test_mst_weight_minimal(pts):
    D = euclid(pts)
    n = len(D)
    tree = minimum_spanning_tree(complete(D), D)
    w = {(a, b): D[a, b] for a, b in itertools.combinations(range(n), 2)}
    assert tree_weight(tree, D) == pytest.approx(min_spanning_weight(n, w))


def test_preorder_star():
    D = np.array([[0, 1, 1, 1], [1, 0, 2, 2], [1, 2, 0, 2], [1, 2, 2, 0.0]])
    t = preorder_tour([(0, 3), (0, 1), (0, 2)], D)
    assert t.order == (0, 1, 2, 3) and t.length == 6.0


def test_preorder_small_trees():
    D = euclid([[0, 0], [1, 0], [3, 0]])
    assert preorder_tour([(0, 1), (1, 2)], D).order == (0, 1, 2)
    t = preorder_tour([(0, 1)], D[:2, :2])
    assert t.order == (0, 1) and t.length == 2 * D[0, 1]


def test_preorder_children_ascending():
    D = np.ones((5, 5)) - np.eye(5)
    assert preorder_tour([(0, 4), (0, 2), (2, 3), (2, 1)], D).order == (0, 2, 1, 3, 4)


@given(planar)
def test_preorder_within_twice_mst(pts):
    D = euclid(pts)
    tree = minimum_spanning_tree(complete(D), D)
    assert preorder_tour(tree, D).length <= 2 * tree_weight(tree, D) * (1 + 1e-12)


def test_two_opt_uncrosses_square():
    t = Tour.from_order([0, 2, 1, 3], SQUARE)
    assert t.length == pytest.approx(2 + 2 * np.sqrt(2))
    r = two_opt_refine(t, SQUARE)
    assert r.length == pytest.approx(4.0)
    assert r.canonical().order == (0, 1, 2, 3)


def test_two_opt_keeps_optimal_tour():
    t = Tour.from_order([0, 1, 2, 3], SQUARE)
    assert two_opt_refine(t, SQUARE) == t


def test_two_opt_small_noop():
    t = Tour.from_order([0, 1, 2], SQUARE[:3, :3])
    assert two_opt_refine(t, SQUARE[:3, :3]) is t


@given(planar, st.randoms(use_true_random=False))
def test_two_opt_local_optimum(pts, rnd):
    D = euclid(pts)
    order = list(range(len(D)))
    rnd.shuffle(order)
    t = Tour.from_order(order, D)
    r = two_opt_refine(t, D)
    assert r.length <= t.length * (1 + 1e-12)
    assert sorted(r.order) == list(range(len(D)))
    assert improving_swaps(r.order, D) == []
    assert r.length == pytest.approx(tour_length(r.order, D), rel=1e-9)


def test_solve_three_samples():
    D = euclid([[0, 0], [1, 0], [0, 1]])
    assert solve_tsp(complete(D), D).canonical().order == (0, 1, 2)


def test_solve_rejects_tiny():
    with pytest.raises(InvalidInputError):
        solve_tsp(ProximityGraph(2, [(0, 1, 1.0, "sig")]), SQUARE[:2, :2])


@pytest.mark.parametrize("seed", range(20))
def test_solve_within_twice_optimum(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    D = euclid(rng.uniform(size=(n, 2)))
    t = solve_tsp(complete(D), D)
    assert sorted(t.order) == list(range(n))
    assert t.length <= 2 * optimal_tour_length(D)


def test_solve_deterministic():
    rng = np.random.default_rng(5)
    D = euclid(rng.uniform(size=(30, 2)))
    assert solve_tsp(complete(D), D) == solve_tsp(complete(D), D)


@pytest.mark.parametrize("seed", range(10))
def test_held_karp_oracle_agrees_with_enumeration(seed):
    from oracles import held_karp_length

    rng = np.random.default_rng(200 + seed)
    D = euclid(rng.uniform(size=(int(rng.integers(3, 8)), 2)))
    assert held_karp_length(D) == pytest.approx(optimal_tour_length(D), rel=1e-12)
