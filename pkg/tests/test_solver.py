import numpy as np
import pytest

from conftest import canonical_cycle, clustered_instance, rand_instance
from faco import (
    EdgeView,
    FacoParams,
    ParameterError,
    Route,
    SolutionArchive,
    Stream,
    choose_source,
    default_ant_count,
    run,
)


def small_params(**kw):
    base = dict(ants=16, iterations=30, cl_size=6, bl_size=6, seed=1)
    base.update(kw)
    return FacoParams(**base)


def test_default_ant_count_examples():
    assert default_ant_count(1002) == 128
    assert default_ant_count(18512) == 576
    assert default_ant_count(256) == 64


def test_params_validation():
    with pytest.raises(ParameterError):
        FacoParams(iterations=0).validate()
    with pytest.raises(ParameterError):
        FacoParams(rho=0.0).validate()
    with pytest.raises(ParameterError):
        FacoParams(rho=1.2).validate()
    with pytest.raises(ParameterError):
        FacoParams(gb_source_prob=0.0).validate()
    with pytest.raises(ParameterError):
        FacoParams(ants=0).validate()
    with pytest.raises(ParameterError):
        FacoParams(p_best=2.0).validate()
    FacoParams(rho=1.0, gb_source_prob=1.0).validate()


def test_list_size_error_propagates():
    inst = rand_instance(50, seed=0)
    with pytest.raises(ParameterError):
        run(inst, FacoParams(ants=4, iterations=2, cl_size=16, bl_size=64))


def test_choose_source_degenerate_probability():
    gb = Route(np.random.default_rng(0).permutation(20))
    ib = Route(np.random.default_rng(1).permutation(20))
    archive = SolutionArchive(
        global_best=gb, global_best_cost=100,
        iter_best=ib, iter_best_cost=120,
        source=ib.edge_view(), source_cost=120,
    )
    rng = Stream(5)
    for _ in range(20):
        view = choose_source(archive, 1.0, rng)
        assert np.array_equal(view.succ, gb.edge_view().succ)
        assert archive.source_cost == 100


def test_choose_source_frequency_matches_probability():
    gb = Route(np.random.default_rng(0).permutation(12))
    ib = Route(np.random.default_rng(1).permutation(12))
    archive = SolutionArchive(
        global_best=gb, global_best_cost=1,
        iter_best=ib, iter_best_cost=2,
        source=ib.edge_view(), source_cost=2,
    )
    rng = Stream(11)
    draws = 10_000
    p = 0.01
    hits = sum(
        choose_source(archive, p, rng).succ[0] == gb.edge_view().succ[0]
        and archive.source_cost == 1
        for _ in range(draws)
    )
    sigma = (p * (1 - p) / draws) ** 0.5
    assert abs(hits / draws - p) <= 3 * sigma


def test_source_before_first_iteration_is_initial_solution():
    # with min_new_edges=0 every ant copies the source; the first
    # iteration's best must therefore equal the initial solution
    inst = rand_instance(40, seed=3)
    res = run(inst, small_params(iterations=1, ants=1, min_new_edges=0))
    assert res.stats.best_cost == res.stats.initial_cost
    assert canonical_cycle(res.route.order) == canonical_cycle(
        res.archive.iter_best.order
    )


def test_single_ant_single_iteration_never_worse_than_initial():
    inst = rand_instance(60, seed=4)
    res = run(inst, small_params(iterations=1, ants=1, min_new_edges=0))
    assert res.stats.best_cost <= res.stats.initial_cost


def test_trace_non_increasing_and_stats_consistent():
    inst = clustered_instance(8, 10, seed=5)
    res = run(inst, small_params(iterations=50))
    trace = res.stats.trace
    assert len(trace) == 50
    assert all(a >= b for a, b in zip(trace, trace[1:]))
    assert trace[-1] == res.stats.best_cost
    assert res.stats.iterations_run == 50
    assert not res.stats.truncated
    li = res.stats.last_improvement_iter
    assert 0 <= li <= 50
    if li:
        assert trace[li - 1] < (trace[li - 2] if li >= 2 else res.stats.initial_cost + 1)


def test_best_route_revalidates_and_cost_resums():
    inst = rand_instance(80, seed=6)
    res = run(inst, small_params(iterations=40))
    assert np.array_equal(np.sort(res.route.order), np.arange(80))
    assert inst.tour_length(res.route) == res.stats.best_cost


def test_same_seed_same_result():
    inst = rand_instance(70, seed=7)
    a = run(inst, small_params(iterations=25, seed=42))
    b = run(inst, small_params(iterations=25, seed=42))
    assert a.stats.best_cost == b.stats.best_cost
    assert np.array_equal(a.route.order, b.route.order)
    assert a.stats.trace == b.stats.trace


def test_worker_count_does_not_change_results():
    inst = rand_instance(90, seed=8)
    results = [
        run(inst, small_params(iterations=25, seed=3, ants=32, threads=t))
        for t in (1, 4, 8)
    ]
    for other in results[1:]:
        assert other.stats.best_cost == results[0].stats.best_cost
        assert np.array_equal(other.route.order, results[0].route.order)
        assert other.stats.trace == results[0].stats.trace


def test_pheromone_bounds_hold_every_iteration():
    inst = rand_instance(50, seed=9)
    seen = []

    def check(it, ph, archive):
        lim = ph.limits
        seen.append(it)
        assert ph.trails.min() >= lim.tau_min - 1e-15
        assert ph.trails.max() <= lim.tau_max + 1e-15

    run(inst, small_params(iterations=30), on_iteration=check)
    assert seen == list(range(1, 31))


def test_time_limit_truncates_cleanly():
    inst = clustered_instance(10, 20, seed=10)
    res = run(inst, FacoParams(ants=64, iterations=100000, seed=1,
                               cl_size=8, bl_size=8, time_limit=1.5))
    assert res.stats.truncated
    assert res.stats.iterations_run < 100000
    assert len(res.stats.trace) == res.stats.iterations_run
    assert inst.tour_length(res.route) == res.stats.best_cost


def test_error_percent_against_best_known():
    inst = rand_instance(40, seed=11)
    inst.best_known = 100000
    res = run(inst, small_params(iterations=5))
    expect = (res.stats.best_cost - 100000) / 100000 * 100
    assert res.stats.error_percent == pytest.approx(expect)


def test_ant_count_default_applied():
    inst = rand_instance(64, seed=12)
    res = run(inst, FacoParams(iterations=2, cl_size=6, bl_size=6, seed=1))
    assert res.stats.iterations_run == 2  # default ants = 64 for n = 64
