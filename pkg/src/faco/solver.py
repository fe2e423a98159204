"""Main optimization loop.

Each iteration: every ant builds a tour against the current source
solution and polishes it with checklist 2-opt; the iteration best is
reduced deterministically (lowest cost, then lowest ant index); trail
limits follow improvements of the global best; trails evaporate; a
source solution is chosen (global best with small probability, else the
iteration best) and receives the pheromone deposit.

Every (iteration, ant) pair draws from its own counter-based random
stream, so results are bit-identical for any worker count; workers only
change how ant chunks are scheduled.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
import numba
from numba import njit, prange

# the TBB probe warns on older system TBBs; omp/workqueue serve fine
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .construction import _construct, build_eta, calc_num_new_edges, source_edge_costs
from .errors import ParameterError
from .local_search import _two_opt, improve_initial, nearest_neighbor_tour
from .neighbors import NeighborLists, build_neighbor_lists
from .pheromone import PartialPheromone, TrailLimits, compute_limits
from .rng import Stream, next_below, stream_seed
from .route import EdgeView, Route
from .tsplib import TspInstance

_SOURCE_STREAM_TAG = 1 << 40
_HUGE = np.int64(1) << 62


def default_ant_count(n: int) -> int:
    """4*sqrt(n) rounded up to the nearest multiple of 64."""
    if n < 1:
        raise ParameterError("n must be positive")
    return 64 * math.ceil(4.0 * math.sqrt(n) / 64.0)


@dataclass
class FacoParams:
    """Run configuration; defaults follow the solver's standard setup."""

    ants: int | None = None  # None: default_ant_count(n)
    iterations: int = 5000
    rho: float = 0.5
    beta: float = 1.0
    cl_size: int = 16
    bl_size: int = 64
    min_new_edges: int = 8
    # Trail-limit contrast: either a whole-tour p_best (classic MAX-MIN
    # formula input) or the per-step probability p_dec of choosing a
    # maximum-trail edge. p_best set explicitly wins over p_dec.
    p_best: float | None = None
    p_dec: float = 0.75
    gb_source_prob: float = 0.01
    seed: int = 1
    threads: int = 1
    time_limit: float | None = None
    ls_change_cap: int | None = None  # None: instance size

    def validate(self) -> None:
        if self.ants is not None and self.ants < 1:
            raise ParameterError("ants must be at least 1")
        if self.iterations < 1:
            raise ParameterError("iterations must be at least 1")
        if not 0.0 < self.rho <= 1.0:
            raise ParameterError("rho must be in (0, 1]")
        if self.beta < 0.0:
            raise ParameterError("beta must be non-negative")
        if self.cl_size < 2:
            raise ParameterError("cl_size must be at least 2")
        if self.bl_size < 0:
            raise ParameterError("bl_size must be non-negative")
        if self.min_new_edges < 0:
            raise ParameterError("min_new_edges must be non-negative")
        if self.p_best is not None and not 0.0 < self.p_best < 1.0:
            raise ParameterError("p_best must be in (0, 1)")
        if not 0.0 < self.p_dec < 1.0:
            raise ParameterError("p_dec must be in (0, 1)")
        if not 0.0 < self.gb_source_prob <= 1.0:
            raise ParameterError("gb_source_prob must be in (0, 1]")
        if self.threads < 1:
            raise ParameterError("threads must be at least 1")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ParameterError("time_limit must be positive")


@dataclass
class SolutionArchive:
    """Best tours tracked across the run."""

    global_best: Route
    global_best_cost: int
    iter_best: Route
    iter_best_cost: int
    source: EdgeView
    source_cost: int


@dataclass
class RunStats:
    """Outcome record of one run."""

    best_cost: int
    initial_cost: int
    best_known: int | None
    error_percent: float | None
    trace: list[int]
    iterations_run: int
    truncated: bool
    last_improvement_iter: int
    wall_time: float
    construct_ls_time: float
    evaporate_time: float
    deposit_time: float


@dataclass
class RunResult:
    route: Route
    stats: RunStats
    archive: SolutionArchive = field(repr=False, default=None)


def choose_source(archive: SolutionArchive, gb_source_prob: float, rng) -> EdgeView:
    """Pick the next source solution and record it in the archive."""
    if rng.random() < gb_source_prob:
        view = archive.global_best.edge_view()
        cost = archive.global_best_cost
    else:
        view = archive.iter_best.edge_view()
        cost = archive.iter_best_cost
    archive.source = view
    archive.source_cost = cost
    return view


@njit(parallel=True, cache=True)
def _run_iteration(
    seed, iteration, m, n_chunks, min_new, ls_cap,
    src_succ, src_pred, src_cost,
    trails, eta, cand, cand_dist, backup, backup_dist,
    xs, ys, zs, kind,
    sc_order, sc_pos, sc_visited, sc_queue, sc_queued, sc_w, sc_v, sc_d,
    best_order, best_cost, best_ant,
):
    n = xs.shape[0]
    for c in prange(n_chunks):
        lo = (c * m) // n_chunks
        hi = ((c + 1) * m) // n_chunks
        order = sc_order[c]
        pos = sc_pos[c]
        visited = sc_visited[c]
        queue = sc_queue[c]
        queued = sc_queued[c]
        wbuf = sc_w[c]
        vbuf = sc_v[c]
        dbuf = sc_d[c]
        chunk_best = _HUGE
        chunk_ant = -1
        for ant in range(lo, hi):
            state = stream_seed(seed, iteration, ant)
            state, start = next_below(state, n)
            state, _new_edges, qlen, cost = _construct(
                state, start, min_new, order, visited, queue, queued,
                src_succ, src_pred, src_cost,
                trails, eta, cand, cand_dist, backup, backup_dist,
                xs, ys, zs, kind, wbuf, vbuf, dbuf,
            )
            for idx in range(n):
                pos[order[idx]] = idx
            gain, _changes = _two_opt(
                order, pos, queue, queued, 0, qlen, ls_cap,
                cand, cand_dist, xs, ys, zs, kind,
            )
            cost -= gain
            if cost < chunk_best:
                chunk_best = cost
                chunk_ant = ant
                for idx in range(n):
                    best_order[c, idx] = order[idx]
        best_cost[c] = chunk_best
        best_ant[c] = chunk_ant


class _Workspace:
    """Preallocated per-chunk scratch buffers for the iteration kernel."""

    def __init__(self, n_chunks: int, n: int, cl: int):
        self.order = np.empty((n_chunks, n), dtype=np.int32)
        self.pos = np.empty((n_chunks, n), dtype=np.int32)
        self.visited = np.empty((n_chunks, n), dtype=np.uint8)
        self.queue = np.empty((n_chunks, n + 1), dtype=np.int32)
        self.queued = np.zeros((n_chunks, n), dtype=np.uint8)
        self.wbuf = np.empty((n_chunks, cl), dtype=np.float64)
        self.vbuf = np.empty((n_chunks, cl), dtype=np.int32)
        self.dbuf = np.empty((n_chunks, cl), dtype=np.int64)
        self.best_order = np.empty((n_chunks, n), dtype=np.int32)
        self.best_cost = np.empty(n_chunks, dtype=np.int64)
        self.best_ant = np.empty(n_chunks, dtype=np.int64)


def run(
    inst: TspInstance,
    params: FacoParams | None = None,
    on_iteration=None,
    lists: NeighborLists | None = None,
) -> RunResult:
    """Execute a full run; returns the best route found plus statistics.

    `on_iteration(iteration, pheromone, archive)` is called at the end
    of every iteration when given.
    """
    params = params or FacoParams()
    params.validate()
    n = inst.n
    m = params.ants if params.ants is not None else default_ant_count(n)
    if lists is None:
        lists = build_neighbor_lists(inst, params.cl_size, params.bl_size)
    threads = max(1, min(params.threads, numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(threads)
    n_chunks = max(1, min(params.threads, m))

    t0 = time.perf_counter()

    initial = nearest_neighbor_tour(inst, lists, start=0)
    improve_initial(initial, lists, inst)
    initial_cost = inst.tour_length(initial)

    def limits_for(cost: int):
        return compute_limits(
            cost, params.rho, params.p_best, n, float(params.cl_size),
            p_dec=None if params.p_best is not None else params.p_dec,
        )

    ph = PartialPheromone(lists, limits_for(initial_cost))
    eta = build_eta(lists, params.beta)

    archive = SolutionArchive(
        global_best=initial.copy(),
        global_best_cost=initial_cost,
        iter_best=initial.copy(),
        iter_best_cost=initial_cost,
        source=initial.edge_view(),
        source_cost=initial_cost,
    )
    src_cost = source_edge_costs(inst, archive.source)

    ws = _Workspace(n_chunks, n, params.cl_size)
    source_rng = Stream(params.seed, iteration=0, ant=_SOURCE_STREAM_TAG)

    trace: list[int] = []
    last_improvement = 0
    truncated = False
    construct_time = evaporate_time = deposit_time = 0.0
    ls_cap = np.int64(n if params.ls_change_cap is None else params.ls_change_cap)
    seed64 = np.uint64(params.seed & 0xFFFFFFFFFFFFFFFF)
    iterations_run = 0

    for it in range(1, params.iterations + 1):
        t_iter = time.perf_counter()
        _run_iteration(
            seed64, np.uint64(it), m, n_chunks,
            np.int64(calc_num_new_edges(params.min_new_edges)), ls_cap,
            archive.source.succ, archive.source.pred, src_cost,
            ph.trails, eta, lists.cand, lists.cand_dist,
            lists.backup, lists.backup_dist,
            inst.xs, inst.ys, inst.zs, inst.kind_code,
            ws.order, ws.pos, ws.visited, ws.queue, ws.queued,
            ws.wbuf, ws.vbuf, ws.dbuf,
            ws.best_order, ws.best_cost, ws.best_ant,
        )
        best_chunk = 0
        for c in range(1, n_chunks):
            if ws.best_cost[c] < ws.best_cost[best_chunk] or (
                ws.best_cost[c] == ws.best_cost[best_chunk]
                and ws.best_ant[c] < ws.best_ant[best_chunk]
            ):
                best_chunk = c
        archive.iter_best = Route(ws.best_order[best_chunk].copy(), validate=False)
        archive.iter_best_cost = int(ws.best_cost[best_chunk])
        construct_time += time.perf_counter() - t_iter

        if archive.iter_best_cost < archive.global_best_cost:
            archive.global_best = archive.iter_best.copy()
            archive.global_best_cost = archive.iter_best_cost
            last_improvement = it
            ph.set_limits(limits_for(archive.global_best_cost))
        trace.append(archive.global_best_cost)

        t_ev = time.perf_counter()
        ph.evaporate()
        evaporate_time += time.perf_counter() - t_ev

        t_dep = time.perf_counter()
        source = choose_source(archive, params.gb_source_prob, source_rng)
        src_cost = source_edge_costs(inst, source)
        ph.deposit(source, 1.0 / archive.source_cost)
        deposit_time += time.perf_counter() - t_dep

        iterations_run = it
        if on_iteration is not None:
            on_iteration(it, ph, archive)
        if (
            params.time_limit is not None
            and time.perf_counter() - t0 > params.time_limit
            and it < params.iterations
        ):
            truncated = True
            break

    best = Route(archive.global_best.order.copy())  # re-validates
    best_cost = inst.tour_length(best)
    assert best_cost == archive.global_best_cost
    wall = time.perf_counter() - t0

    error = None
    if inst.best_known:
        error = (best_cost - inst.best_known) / inst.best_known * 100.0

    stats = RunStats(
        best_cost=best_cost,
        initial_cost=initial_cost,
        best_known=inst.best_known,
        error_percent=error,
        trace=trace,
        iterations_run=iterations_run,
        truncated=truncated,
        last_improvement_iter=last_improvement,
        wall_time=wall,
        construct_ls_time=construct_time,
        evaporate_time=evaporate_time,
        deposit_time=deposit_time,
    )
    return RunResult(route=best, stats=stats, archive=archive)


def resolve_threads(flag: int | None) -> int:
    """Thread count: explicit flag wins, then FACO_THREADS, then CPU count."""
    if flag is not None:
        return flag
    env = os.environ.get("FACO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
