"""Per-ant tour construction with a bounded number of new edges.

An ant starts at a random node and picks successors probabilistically
over its candidate list (trail times heuristic weight), falling back to
the nearest unvisited backup-list node and finally to the nearest
unvisited node overall. Each selected edge absent from the source
solution counts as *new*; once the count reaches the configured
threshold the rest of the tour is copied from the source solution,
walking its successor chain and, where that is blocked, its predecessor
chain. If the copy stalls while nodes remain, probabilistic selection
resumes, so the final count may exceed the threshold. Endpoints of new
edges are collected for the local search to inspect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ParameterError
from .neighbors import NeighborLists
from .pheromone import PartialPheromone
from .rng import Stream, next_float
from .route import EdgeView, Route
from .tsplib import TspInstance, dist

_HUGE = np.int64(1) << 62


def calc_num_new_edges(min_new_edges: int) -> int:
    """Threshold of new edges per construction; a constant for now.

    Kept as a hook so an adaptive schedule can be plugged in without
    touching the construction loop.
    """
    value = int(min_new_edges)
    if value < 0:
        raise ParameterError("min_new_edges must be non-negative")
    return value


def build_eta(lists: NeighborLists, beta: float) -> np.ndarray:
    """Static heuristic weights (1/d)**beta for every candidate slot.

    Zero-length edges (coincident points rounded to cost 0) get a
    finite attractiveness, larger than any unit-cost edge.
    """
    d = lists.cand_dist.astype(np.float64)
    eta = np.empty_like(d)
    zero = d <= 0
    np.divide(1.0, d, out=eta, where=~zero)
    eta[zero] = 2.0
    if beta == 1.0:
        return eta
    return eta**beta


@njit(cache=True, inline="always")
def _select_next(
    state, u, visited, trails, eta, cand, cand_dist,
    backup, backup_dist, xs, ys, zs, kind, wbuf, vbuf, dbuf,
):
    cl = cand.shape[1]
    cnt = 0
    total = 0.0
    for s in range(cl):
        v = cand[u, s]
        if visited[v] != 0:
            continue
        w = trails[u, s] * eta[u, s]
        wbuf[cnt] = w
        vbuf[cnt] = v
        dbuf[cnt] = cand_dist[u, s]
        total += w
        cnt += 1
    if cnt == 1:
        return state, vbuf[0], dbuf[0]
    if cnt > 1:
        state, r = next_float(state)
        target = r * total
        acc = 0.0
        for t in range(cnt - 1):
            acc += wbuf[t]
            if target < acc:
                return state, vbuf[t], dbuf[t]
        return state, vbuf[cnt - 1], dbuf[cnt - 1]
    for s in range(backup.shape[1]):
        v = backup[u, s]
        if visited[v] == 0:
            return state, v, backup_dist[u, s]
    best_v = np.int32(-1)
    best_d = _HUGE
    for v in range(visited.shape[0]):
        if visited[v] == 0:
            d = dist(xs, ys, zs, kind, u, v)
            if d < best_d:
                best_d = d
                best_v = np.int32(v)
    return state, best_v, best_d


@njit(cache=True)
def _construct(
    state, start, min_new, order, visited, queue, queued,
    src_succ, src_pred, src_cost,
    trails, eta, cand, cand_dist, backup, backup_dist,
    xs, ys, zs, kind, wbuf, vbuf, dbuf,
):
    """Build one tour; returns (state, new_edges, checklist length, cost).

    `queue`/`queued` receive the checklist; `queued` must be all zero on
    entry. The returned cost includes the closing edge.
    """
    n = order.shape[0]
    for i in range(n):
        visited[i] = 0
    order[0] = np.int32(start)
    visited[start] = 1
    k = 1
    new_edges = 0
    qtail = 0
    cost = np.int64(0)
    while k < n:
        if new_edges >= min_new:
            k0 = k
            prev = order[k - 1]
            u = src_succ[prev]
            while visited[u] == 0:
                order[k] = u
                visited[u] = 1
                cost += src_cost[prev]
                k += 1
                prev = u
                u = src_succ[prev]
            u = src_pred[prev]
            while visited[u] == 0:
                order[k] = u
                visited[u] = 1
                cost += src_cost[u]
                k += 1
                prev = u
                u = src_pred[prev]
            if k > k0:
                continue
        u0 = order[k - 1]
        state, v, d = _select_next(
            state, u0, visited, trails, eta, cand, cand_dist,
            backup, backup_dist, xs, ys, zs, kind, wbuf, vbuf, dbuf,
        )
        order[k] = v
        visited[v] = 1
        cost += d
        k += 1
        if src_succ[u0] != v and src_pred[u0] != v:
            new_edges += 1
            if queued[v] == 0:
                queue[qtail] = v
                qtail += 1
                queued[v] = 1
    cost += dist(xs, ys, zs, kind, order[n - 1], order[0])
    return state, new_edges, qtail, cost


@njit(cache=True)
def _edge_costs(succ, xs, ys, zs, kind, out):
    for u in range(succ.shape[0]):
        out[u] = dist(xs, ys, zs, kind, u, succ[u])


def source_edge_costs(inst: TspInstance, source: EdgeView) -> np.ndarray:
    """cost[u] = d(u, succ(u)) for every edge of the source tour."""
    out = np.empty(inst.n, dtype=np.int64)
    _edge_costs(source.succ, inst.xs, inst.ys, inst.zs, inst.kind_code, out)
    return out


class AntState:
    """Working state of one ant while its route is under construction."""

    def __init__(self, n: int, start: int, min_new_edges: int):
        self.order = np.empty(n, dtype=np.int32)
        self.order[0] = start
        self.k = 1
        self.visited = np.zeros(n, dtype=np.uint8)
        self.visited[start] = 1
        self.new_edges = 0
        self.min_new_edges = min_new_edges
        self.checklist: list[int] = []

    @property
    def route(self) -> np.ndarray:
        return self.order[: self.k]

    @property
    def current(self) -> int:
        return int(self.order[self.k - 1])


def select_next_node(
    state: AntState,
    ph: PartialPheromone,
    lists: NeighborLists,
    beta: float,
    rng: Stream,
    inst: TspInstance,
    eta: np.ndarray | None = None,
) -> int:
    """Pick the ant's next node; does not mark it visited."""
    n = state.visited.shape[0]
    if state.k >= n:
        raise ValueError("no unvisited node remains")
    if eta is None:
        eta = build_eta(lists, beta)
    cl = lists.cl_size
    wbuf = np.empty(cl, dtype=np.float64)
    vbuf = np.empty(cl, dtype=np.int32)
    dbuf = np.empty(cl, dtype=np.int64)
    rng.state, v, _d = _select_next(
        rng.state, state.current, state.visited, ph.trails, eta,
        lists.cand, lists.cand_dist, lists.backup, lists.backup_dist,
        inst.xs, inst.ys, inst.zs, inst.kind_code, wbuf, vbuf, dbuf,
    )
    return int(v)


@dataclass
class ConstructionResult:
    route: Route
    checklist: list[int]
    new_edges: int
    cost: int


def construct_solution(
    inst: TspInstance,
    lists: NeighborLists,
    ph: PartialPheromone,
    source: EdgeView,
    start: int,
    min_new_edges: int,
    beta: float = 1.0,
    rng: Stream | int = 0,
    eta: np.ndarray | None = None,
) -> ConstructionResult:
    """Construct one complete tour against the given source solution."""
    if isinstance(rng, int):
        rng = Stream(rng)
    if min_new_edges < 0:
        raise ParameterError("min_new_edges must be non-negative")
    n = inst.n
    if eta is None:
        eta = build_eta(lists, beta)
    order = np.empty(n, dtype=np.int32)
    visited = np.empty(n, dtype=np.uint8)
    queue = np.empty(n + 1, dtype=np.int32)
    queued = np.zeros(n, dtype=np.uint8)
    cl = lists.cl_size
    wbuf = np.empty(cl, dtype=np.float64)
    vbuf = np.empty(cl, dtype=np.int32)
    dbuf = np.empty(cl, dtype=np.int64)
    src_cost = source_edge_costs(inst, source)
    rng.state, new_edges, qlen, cost = _construct(
        rng.state, start, min_new_edges, order, visited, queue, queued,
        source.succ, source.pred, src_cost,
        ph.trails, eta, lists.cand, lists.cand_dist, lists.backup,
        lists.backup_dist, inst.xs, inst.ys, inst.zs, inst.kind_code,
        wbuf, vbuf, dbuf,
    )
    return ConstructionResult(
        route=Route(order, validate=False),
        checklist=[int(x) for x in queue[:qlen]],
        new_edges=int(new_edges),
        cost=int(cost),
    )
