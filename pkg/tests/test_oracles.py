"""Sanity checks for the reference implementations themselves."""

import numpy as np

from conftest import grid_instance, rand_instance, random_route
from faco import EdgeView, Route, TspInstance
from oracles import brute_force_knn, edge_diff_count, held_karp_optimum


def test_held_karp_three_nodes_is_sum_of_all_edges():
    inst = TspInstance("tri", np.array([[0.0, 0], [0, 3], [4, 0]]), "EUC_2D")
    assert held_karp_optimum(inst) == 3 + 5 + 4


def test_held_karp_unit_square_perimeter():
    inst = TspInstance(
        "sq", np.array([[0.0, 0], [1, 0], [1, 1], [0, 1]]), "EUC_2D"
    )
    assert held_karp_optimum(inst) == 4


def test_held_karp_lower_bounds_random_permutations():
    inst = rand_instance(10, seed=3)
    opt = held_karp_optimum(inst)
    rng = np.random.default_rng(0)
    for _ in range(1000):
        perm = rng.permutation(10)
        assert inst.tour_length(perm) >= opt


def test_held_karp_refuses_large_instances():
    inst = rand_instance(16, seed=0)
    try:
        held_karp_optimum(inst)
        assert False, "expected refusal"
    except ValueError:
        pass


def test_brute_knn_collinear_hand_case():
    inst = TspInstance(
        "line", np.array([[float(x), 0.0] for x in range(5)]), "EUC_2D"
    )
    nodes, dists = brute_force_knn(inst, 4)
    assert list(nodes[0]) == [1, 2, 3, 4]
    assert list(dists[0]) == [1, 2, 3, 4]
    assert list(nodes[2]) == [1, 3, 0, 4]  # distance ties broken by id


def test_brute_knn_full_k_is_sorted_permutation():
    inst = rand_instance(30, seed=5)
    nodes, dists = brute_force_knn(inst, 29)
    for u in range(30):
        assert sorted(nodes[u]) == [v for v in range(30) if v != u]
        assert list(dists[u]) == sorted(dists[u])


def test_edge_diff_identical_cycles_is_zero():
    order = random_route(20, seed=1)
    assert edge_diff_count(order, EdgeView.from_order(order)) == 0


def test_edge_diff_single_two_opt_move_is_two():
    order = np.arange(12, dtype=np.int32)
    view = EdgeView.from_order(order)
    moved = Route(order.copy())
    moved.flip_section(3, 7)  # replaces exactly two edges
    # the flipped tour, traversed from 0, shares all but two edges
    assert edge_diff_count(moved, view) == 2


def test_edge_diff_is_symmetric_in_edge_direction():
    a = random_route(15, seed=2)
    b = np.ascontiguousarray(a[::-1])  # same undirected cycle
    assert edge_diff_count(a, EdgeView.from_order(b)) == 0


def test_grid_instance_has_unit_snake_optimum():
    inst = grid_instance(3, 4, spacing=1.0)
    assert held_karp_optimum(inst) == 12
