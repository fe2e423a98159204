"""Tour improvement procedures.

The main loop uses a checklist-restricted 2-opt: only nodes touched by
new edges (and nodes adjacent to applied moves) are inspected, each
against its nearest-neighbor list, with the best positive-gain move per
inspected node applied by a section flip. The initial solution gets a
nearest-neighbor tour improved by a full 2-opt pass and a sequential
3-opt pass (moves expressible as at most two flips), both driven by
don't-look bits.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .neighbors import NeighborLists
from .route import Route, flip_arc
from .tsplib import TspInstance, dist

_NO_CAP = np.int64(1) << 62


class Checklist:
    """FIFO queue of nodes pending inspection; re-insertions are ignored
    while a node is still queued."""

    def __init__(self, n: int, items=()):
        self.queue = np.empty(n + 1, dtype=np.int32)
        self.queued = np.zeros(n, dtype=np.uint8)
        self.head = 0
        self.tail = 0
        for x in items:
            self.append(x)

    def append(self, x: int) -> None:
        if not self.queued[x]:
            self.queue[self.tail % self.queue.shape[0]] = x
            self.tail += 1
            self.queued[x] = 1

    def pop(self) -> int:
        if self.head == self.tail:
            raise IndexError("checklist is empty")
        x = int(self.queue[self.head % self.queue.shape[0]])
        self.head += 1
        self.queued[x] = 0
        return x

    def __len__(self) -> int:
        return self.tail - self.head


@njit(cache=True)
def _two_opt(
    order, pos, queue, queued, qhead, qtail, max_changes,
    nn, nn_dist, xs, ys, zs, kind,
):
    """Checklist 2-opt; returns (total gain, changes applied).

    Drains the queue and clears all `queued` marks before returning.
    """
    n = order.shape[0]
    cap = queue.shape[0]
    cl = nn.shape[1]
    changes = 0
    total_gain = np.int64(0)
    while qhead != qtail and changes < max_changes:
        a = queue[qhead % cap]
        qhead += 1
        queued[a] = 0
        pa = pos[a]
        a_succ = order[pa + 1 if pa + 1 < n else 0]
        a_pred = order[pa - 1 if pa > 0 else n - 1]
        d_as = dist(xs, ys, zs, kind, a, a_succ)
        d_pa = dist(xs, ys, zs, kind, a_pred, a)
        d_cut = d_as if d_as > d_pa else d_pa
        best_gain = np.int64(0)
        bw = bx = by = bz = np.int32(-1)
        for s in range(cl):
            b = nn[a, s]
            d_ab = nn_dist[a, s]
            if d_ab >= d_cut:
                break
            pb = pos[b]
            if d_as > d_ab:
                b_succ = order[pb + 1 if pb + 1 < n else 0]
                gain = (
                    d_as + dist(xs, ys, zs, kind, b, b_succ)
                    - d_ab - dist(xs, ys, zs, kind, a_succ, b_succ)
                )
                if gain > best_gain:
                    best_gain = gain
                    bw, bx, by, bz = a, a_succ, b, b_succ
            if d_pa > d_ab:
                b_pred = order[pb - 1 if pb > 0 else n - 1]
                gain = (
                    d_pa + dist(xs, ys, zs, kind, b_pred, b)
                    - d_ab - dist(xs, ys, zs, kind, a_pred, b_pred)
                )
                if gain > best_gain:
                    best_gain = gain
                    bw, bx, by, bz = a_pred, a, b_pred, b
        if best_gain > 0:
            flip_arc(order, pos, n, bx, by)
            if queued[bw] == 0:
                queue[qtail % cap] = bw
                qtail += 1
                queued[bw] = 1
            if queued[bx] == 0:
                queue[qtail % cap] = bx
                qtail += 1
                queued[bx] = 1
            if queued[by] == 0:
                queue[qtail % cap] = by
                qtail += 1
                queued[by] = 1
            if queued[bz] == 0:
                queue[qtail % cap] = bz
                qtail += 1
                queued[bz] = 1
            changes += 1
            total_gain += best_gain
    while qhead != qtail:  # stopped at the change cap: clear leftover marks
        queued[queue[qhead % cap]] = 0
        qhead += 1
    return total_gain, changes


def two_opt_checklist(
    r: Route,
    cl: Checklist,
    lists: NeighborLists,
    inst: TspInstance,
    max_changes: int | None = None,
    include_backup: bool = False,
) -> int:
    """Run checklist 2-opt on the route in place; returns the total gain."""
    nn, nn_dist = lists.joined() if include_backup else (lists.cand, lists.cand_dist)
    cap = inst.n if max_changes is None else max_changes
    gain, _changes = _two_opt(
        r.order, r.pos, cl.queue, cl.queued, cl.head, cl.tail, cap,
        nn, nn_dist, inst.xs, inst.ys, inst.zs, inst.kind_code,
    )
    cl.head = cl.tail = 0
    return int(gain)


@njit(cache=True)
def _nn_tour(start, cand, backup, xs, ys, zs, kind, order, visited):
    n = order.shape[0]
    for i in range(n):
        visited[i] = 0
    order[0] = np.int32(start)
    visited[start] = 1
    for k in range(1, n):
        u = order[k - 1]
        v = np.int32(-1)
        for s in range(cand.shape[1]):
            c = cand[u, s]
            if visited[c] == 0:
                v = c
                break
        if v < 0:
            for s in range(backup.shape[1]):
                c = backup[u, s]
                if visited[c] == 0:
                    v = c
                    break
        if v < 0:
            best_d = _NO_CAP
            for c in range(n):
                if visited[c] == 0:
                    d = dist(xs, ys, zs, kind, u, c)
                    if d < best_d:
                        best_d = d
                        v = np.int32(c)
        order[k] = v
        visited[v] = 1


def nearest_neighbor_tour(
    inst: TspInstance, lists: NeighborLists, start: int = 0
) -> Route:
    """Greedy tour: repeatedly move to the nearest unvisited node."""
    order = np.empty(inst.n, dtype=np.int32)
    visited = np.empty(inst.n, dtype=np.uint8)
    _nn_tour(
        start, lists.cand, lists.backup,
        inst.xs, inst.ys, inst.zs, inst.kind_code, order, visited,
    )
    return Route(order, validate=False)


@njit(cache=True, inline="always")
def _reverse_range(order, pos, n, i, j):
    """Reverse exactly the cyclic index range i..j (walking forward)."""
    length = (j - i) % n + 1
    for t in range(length // 2):
        ii = i + t
        if ii >= n:
            ii -= n
        jj = j - t
        if jj < 0:
            jj += n
        a = order[ii]
        b = order[jj]
        order[ii] = b
        order[jj] = a
        pos[b] = ii
        pos[a] = jj


@njit(cache=True)
def _three_opt_pass(order, pos, queue, queued, nn, nn_dist, xs, ys, zs, kind):
    """Sequential 3-opt over neighbor lists, don't-look-bit driven.

    Considers plain 2-opt moves and the 3-opt reconnection that
    reverses two consecutive segments, i.e. every move that two section
    flips can express. Returns the total gain.
    """
    n = order.shape[0]
    cap = queue.shape[0]
    cl = nn.shape[1]
    qhead = 0
    qtail = n
    total_gain = np.int64(0)
    be = np.empty(6, dtype=np.int32)
    while qhead != qtail:
        a = queue[qhead % cap]
        qhead += 1
        queued[a] = 0
        best_gain = np.int64(0)
        # best move: up to two index ranges to reverse, endpoints to requeue
        br1i = br1j = br2i = br2j = -1
        bec = 0
        pa = pos[a]
        for direction in (1, -1):
            A = order[(pa + direction) % n]
            d_aA = dist(xs, ys, zs, kind, a, A)
            pA = pos[A]
            # 2-opt: remove (a, A) and (b, B); add (a, b) and (A, B)
            for s in range(cl):
                b = nn[a, s]
                d_ab = nn_dist[a, s]
                if d_ab >= d_aA:
                    break
                pb = pos[b]
                B = order[(pb + direction) % n]
                gain = (
                    d_aA + dist(xs, ys, zs, kind, b, B)
                    - d_ab - dist(xs, ys, zs, kind, A, B)
                )
                if gain > best_gain:
                    best_gain = gain
                    if direction == 1:
                        br1i, br1j = pA, pb
                    else:
                        br1i, br1j = pa, pos[B]
                    br2i = -1
                    be[0], be[1], be[2], be[3] = a, A, b, B
                    bec = 4
            # two-flip 3-opt: remove (a, A), (b, B), (c, C);
            # add (a, b), (A, c), (B, C) with both segments reversed
            for s1 in range(cl):
                c = nn[A, s1]
                g1 = d_aA - nn_dist[A, s1]
                if g1 <= 0:
                    break
                jc = ((pos[c] - pa) * direction) % n
                if jc < 2:
                    continue
                C = order[(pos[c] + direction) % n]
                d_cC = dist(xs, ys, zs, kind, c, C)
                for s2 in range(cl):
                    B = nn[C, s2]
                    g2 = g1 + d_cC - nn_dist[C, s2]
                    if g2 <= 0:
                        break
                    jB = ((pos[B] - pa) * direction) % n
                    if jB < 2 or jB >= jc:
                        continue
                    b = order[(pos[B] - direction) % n]
                    gain = (
                        g2 + dist(xs, ys, zs, kind, b, B)
                        - dist(xs, ys, zs, kind, a, b)
                    )
                    if gain > best_gain:
                        best_gain = gain
                        if direction == 1:
                            br1i, br1j = pA, pos[b]
                            br2i, br2j = pos[B], pos[c]
                        else:
                            br1i, br1j = pos[b], pA
                            br2i, br2j = pos[c], pos[B]
                        be[0], be[1], be[2] = a, A, b
                        be[3], be[4], be[5] = B, c, C
                        bec = 6
        if best_gain > 0:
            _reverse_range(order, pos, n, br1i, br1j)
            if br2i >= 0:
                _reverse_range(order, pos, n, br2i, br2j)
            for t in range(bec):
                e = be[t]
                if queued[e] == 0:
                    queue[qtail % cap] = e
                    qtail += 1
                    queued[e] = 1
            total_gain += best_gain
    return total_gain


def improve_initial(
    r: Route, lists: NeighborLists, inst: TspInstance, include_backup: bool = False
) -> Route:
    """Improve a tour in place: 2-opt to a local optimum, then a 3-opt pass."""
    n = inst.n
    nn, nn_dist = lists.joined() if include_backup else (lists.cand, lists.cand_dist)
    queue = np.empty(n + 1, dtype=np.int32)
    queue[:n] = np.arange(n, dtype=np.int32)
    queued = np.ones(n, dtype=np.uint8)
    _two_opt(
        r.order, r.pos, queue, queued, 0, n, _NO_CAP,
        nn, nn_dist, inst.xs, inst.ys, inst.zs, inst.kind_code,
    )
    queue[:n] = np.arange(n, dtype=np.int32)
    queued[:] = 1
    _three_opt_pass(
        r.order, r.pos, queue, queued,
        nn, nn_dist, inst.xs, inst.ys, inst.zs, inst.kind_code,
    )
    return r
