import itertools

import numpy as np
import pytest

from conftest import canonical_cycle, rand_instance, random_route
from faco import (
    Checklist,
    Route,
    TspInstance,
    build_neighbor_lists,
    improve_initial,
    nearest_neighbor_tour,
    two_opt_checklist,
)
from oracles import held_karp_optimum


def square_instance(side=10.0):
    pts = np.array([[0.0, 0], [side, 0], [side, side], [0, side]])
    return TspInstance("square", pts, "EUC_2D")


def brute_force_best_cycle(inst):
    n = inst.n
    best = None
    for perm in itertools.permutations(range(1, n)):
        cost = inst.tour_length([0, *perm])
        if best is None or cost < best[0]:
            best = (cost, [0, *perm])
    return best


def test_checklist_fifo_and_dedup():
    cl = Checklist(10, items=[3, 5, 3, 7])
    assert len(cl) == 3
    assert cl.pop() == 3
    cl.append(5)  # still queued: ignored
    assert len(cl) == 2
    cl.append(3)  # popped already: accepted again
    assert [cl.pop(), cl.pop(), cl.pop()] == [5, 7, 3]
    with pytest.raises(IndexError):
        cl.pop()


def test_crossing_square_resolved_from_checklist():
    inst = square_instance()
    lists = build_neighbor_lists(inst, 2, 1)
    route = Route([0, 2, 1, 3])  # both diagonals crossed
    best_cost, _ = brute_force_best_cycle(inst)
    gain = two_opt_checklist(route, Checklist(4, [0]), lists, inst)
    assert inst.tour_length(route) == best_cost == 40
    assert gain == 8


def test_empty_checklist_is_noop():
    inst = rand_instance(30, seed=1)
    lists = build_neighbor_lists(inst, 6, 6)
    route = Route(random_route(30, seed=2))
    before = route.order.copy()
    assert two_opt_checklist(route, Checklist(30), lists, inst) == 0
    assert np.array_equal(route.order, before)


def test_gain_arithmetic_direct_substitution():
    # d(a, a_succ)=10, d(b, b_succ)=10, d(a, b)=5, d(a_succ, b_succ)=5;
    # gain = (10 + 10) - (5 + 5) = 10, and no competing move beats it
    pts = np.array([[0.0, 0], [0, 10], [3, 4], [-5, 10]])
    inst = TspInstance("gain", pts, "EUC_2D")
    lists = build_neighbor_lists(inst, 2, 1)
    route = Route([0, 1, 2, 3])  # tour a, a_succ, b, b_succ
    gain = two_opt_checklist(route, Checklist(4, [0]), lists, inst,
                             max_changes=1)
    assert gain == 10


def test_never_increases_and_gain_is_exact():
    for seed in range(40):
        inst = rand_instance(60, seed=seed)
        lists = build_neighbor_lists(inst, 8, 8)
        route = Route(random_route(60, seed=seed + 1000))
        seeds = list(np.random.default_rng(seed).choice(60, size=12, replace=False))
        before = inst.tour_length(route)
        gain = two_opt_checklist(route, Checklist(60, seeds), lists, inst)
        after = inst.tour_length(route)
        assert gain >= 0
        assert after == before - gain
        assert np.array_equal(np.sort(route.order), np.arange(60))


def test_single_step_gains_match_length_deltas():
    inst = rand_instance(50, seed=5)
    lists = build_neighbor_lists(inst, 8, 8)
    route = Route(random_route(50, seed=6))
    cl = Checklist(50, range(50))
    while len(cl):
        before = inst.tour_length(route)
        gain = two_opt_checklist(route, cl, lists, inst, max_changes=1)
        assert inst.tour_length(route) == before - gain
        if gain == 0:
            break
        # re-seed with every node still pending plus the move endpoints
        cl = Checklist(50, range(50))


def test_change_cap_limits_work():
    inst = rand_instance(80, seed=7)
    lists = build_neighbor_lists(inst, 8, 8)
    r_capped = Route(random_route(80, seed=8))
    r_free = Route(r_capped.order.copy())
    capped_gain = two_opt_checklist(
        r_capped, Checklist(80, range(80)), lists, inst, max_changes=3
    )
    free_gain = two_opt_checklist(
        r_free, Checklist(80, range(80)), lists, inst, max_changes=10**9
    )
    assert capped_gain <= free_gain
    assert free_gain > 0


def test_no_improving_move_remains_after_drain():
    inst = rand_instance(60, seed=9)
    lists = build_neighbor_lists(inst, 8, 8)
    route = Route(random_route(60, seed=10))
    two_opt_checklist(route, Checklist(60, range(60)), lists, inst,
                      max_changes=10**9)
    # brute re-scan of the checked neighborhood: nothing improving left
    for a in range(60):
        a_succ, a_pred = route.succ(a), route.pred(a)
        d_as = inst.distance(a, a_succ)
        d_pa = inst.distance(a_pred, a)
        for s in range(8):
            b = int(lists.cand[a, s])
            d_ab = int(lists.cand_dist[a, s])
            if d_as > d_ab:
                b_succ = route.succ(b)
                assert (
                    d_as + inst.distance(b, b_succ)
                    - d_ab - inst.distance(a_succ, b_succ) <= 0
                )
            if d_pa > d_ab:
                b_pred = route.pred(b)
                assert (
                    d_pa + inst.distance(b_pred, b)
                    - d_ab - inst.distance(a_pred, b_pred) <= 0
                )


def test_nearest_neighbor_on_line():
    inst = TspInstance(
        "line4", np.array([[0.0, 0], [1, 0], [2, 0], [3, 0]]), "EUC_2D"
    )
    lists = build_neighbor_lists(inst, 2, 1)
    route = nearest_neighbor_tour(inst, lists, start=0)
    assert list(route.order) == [0, 1, 2, 3]


def test_nearest_neighbor_validity_and_quality():
    for seed in range(5):
        inst = rand_instance(9, seed=seed)
        lists = build_neighbor_lists(inst, 4, 4)
        route = nearest_neighbor_tour(inst, lists, start=seed % 9)
        assert np.array_equal(np.sort(route.order), np.arange(9))
        assert inst.tour_length(route) >= held_karp_optimum(inst)


def test_improve_initial_square_and_fixed_point():
    inst = square_instance()
    lists = build_neighbor_lists(inst, 2, 1)
    route = Route([0, 2, 1, 3])
    improve_initial(route, lists, inst)
    assert inst.tour_length(route) == 40
    before = canonical_cycle(route.order)
    improve_initial(route, lists, inst)  # already locally optimal
    assert canonical_cycle(route.order) == before


def test_improve_initial_monotone_and_valid():
    for seed in range(8):
        inst = rand_instance(100, seed=seed)
        lists = build_neighbor_lists(inst, 10, 10)
        nn = nearest_neighbor_tour(inst, lists, start=0)
        nn_len = inst.tour_length(nn)
        improve_initial(nn, lists, inst)
        improved = inst.tour_length(nn)
        assert improved <= nn_len
        assert np.array_equal(np.sort(nn.order), np.arange(100))


def test_improve_initial_beats_two_opt_alone_somewhere():
    # the 3-opt pass must contribute on at least one of these instances
    better = 0
    for seed in range(10):
        inst = rand_instance(120, seed=seed + 50)
        lists = build_neighbor_lists(inst, 10, 10)
        nn = nearest_neighbor_tour(inst, lists, start=0)
        two_only = Route(nn.order.copy())
        two_opt_checklist(
            two_only, Checklist(120, range(120)), lists, inst, max_changes=10**9
        )
        improve_initial(nn, lists, inst)
        if inst.tour_length(nn) < inst.tour_length(two_only):
            better += 1
    assert better > 0
