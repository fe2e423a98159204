"""Per-node candidate and backup lists of nearest neighbors.

Lists are exact k-nearest-neighbor lists under the instance's integer
metric, ordered by (edge cost, node id). The integer metric is a
monotone function of the raw Euclidean distance for every supported
weight kind, so a KD-tree query on the raw coordinates plus a bounded
re-ranking step reproduces the integer ordering exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from .errors import ParameterError
from .tsplib import TspInstance, dist

_QUERY_PAD = 16


@njit(cache=True)
def _rerank_chunk(idx, raw, base, k, xs, ys, zs, kind, slack, out_nodes, out_dists, redo):
    """Re-rank KD-tree results by (integer cost, id); flag unsafe rows.

    A row is safe when the raw distance of its last returned neighbor
    exceeds the raw distance of its k-th by more than `slack`: beyond
    that gap no excluded point can beat the kept ones under the integer
    metric.
    """
    rows, kq = idx.shape
    n = xs.shape[0]
    keys = np.empty(kq, dtype=np.int64)
    for r in range(rows):
        u = base + r
        cnt = 0
        for c in range(kq):
            v = idx[r, c]
            if v == u:
                continue
            d = dist(xs, ys, zs, kind, u, v)
            keys[cnt] = d * n + v
            cnt += 1
        if cnt > k and raw[r, kq - 1] <= raw[r, k] + slack:
            # cnt == n-1 means every other node was examined: always safe
            if cnt < n - 1:
                redo[r] = True
                continue
        srt = np.argsort(keys[:cnt])
        for c in range(k):
            key = keys[srt[c]]
            out_nodes[u, c] = np.int32(key % n)
            out_dists[u, c] = key // n
        redo[r] = False


@njit(cache=True)
def _rerank_candidates(u, cands, k, xs, ys, zs, kind, out_nodes, out_dists):
    n = xs.shape[0]
    cnt = 0
    keys = np.empty(cands.shape[0], dtype=np.int64)
    for t in range(cands.shape[0]):
        v = cands[t]
        if v == u:
            continue
        d = dist(xs, ys, zs, kind, u, v)
        keys[cnt] = d * n + v
        cnt += 1
    srt = np.argsort(keys[:cnt])
    for c in range(k):
        key = keys[srt[c]]
        out_nodes[u, c] = np.int32(key % n)
        out_dists[u, c] = key // n


@dataclass
class NeighborLists:
    """Candidate (first cl_size) and backup (next bl_size) neighbor lists."""

    cl_size: int
    bl_size: int
    cand: np.ndarray  # (n, cl_size) int32
    backup: np.ndarray  # (n, bl_size) int32
    cand_dist: np.ndarray  # (n, cl_size) int64
    backup_dist: np.ndarray  # (n, bl_size) int64

    _joined: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.cand.shape[0]

    def neighbor(self, u: int, slot: int) -> int:
        if 0 <= slot < self.cl_size:
            return int(self.cand[u, slot])
        if slot < self.cl_size + self.bl_size:
            return int(self.backup[u, slot - self.cl_size])
        raise IndexError(f"slot {slot} out of range for stored lists")

    def neighbor_distance(self, u: int, slot: int) -> int:
        """Cached edge cost to the neighbor stored at the given slot."""
        if 0 <= slot < self.cl_size:
            return int(self.cand_dist[u, slot])
        if slot < self.cl_size + self.bl_size:
            return int(self.backup_dist[u, slot - self.cl_size])
        raise IndexError(f"slot {slot} out of range for stored lists")

    def joined(self) -> tuple[np.ndarray, np.ndarray]:
        """Candidate+backup lists concatenated (still sorted)."""
        if self._joined is None:
            self._joined = (
                np.ascontiguousarray(np.hstack([self.cand, self.backup])),
                np.ascontiguousarray(np.hstack([self.cand_dist, self.backup_dist])),
            )
        return self._joined


def neighbor_distance(lists: NeighborLists, u: int, slot: int) -> int:
    return lists.neighbor_distance(u, slot)


def build_neighbor_lists(
    inst: TspInstance, cl_size: int = 16, bl_size: int = 64
) -> NeighborLists:
    """Exact (cl_size + bl_size)-nearest-neighbor lists for every node."""
    n = inst.n
    if cl_size < 1:
        raise ParameterError("cl_size must be at least 1")
    if bl_size < 0:
        raise ParameterError("bl_size must be non-negative")
    k = cl_size + bl_size
    if k > n - 1:
        raise ParameterError(
            f"cl_size + bl_size = {k} exceeds the {n - 1} available neighbors"
        )

    # Raw Euclidean ordering can disagree with the rounded integer
    # ordering only within this distance gap.
    slack = (math.sqrt(10.0) if inst.weight_kind == "ATT" else 1.0) + 1e-9

    pts = inst.coords
    tree = cKDTree(pts)
    kq = min(n, k + 1 + _QUERY_PAD)

    nodes = np.empty((n, k), dtype=np.int32)
    dists = np.empty((n, k), dtype=np.int64)

    chunk = max(1, min(n, 8_000_000 // max(kq, 1)))
    for base in range(0, n, chunk):
        hi = min(n, base + chunk)
        raw, idx = tree.query(pts[base:hi], k=kq)
        if kq == 1:  # scipy squeezes the last axis for k=1
            raw = raw[:, None]
            idx = idx[:, None]
        redo = np.empty(hi - base, dtype=np.bool_)
        _rerank_chunk(
            idx.astype(np.int64),
            raw,
            base,
            k,
            inst.xs,
            inst.ys,
            inst.zs,
            inst.kind_code,
            slack,
            nodes,
            dists,
            redo,
        )
        for r in np.flatnonzero(redo):
            u = base + int(r)
            radius = raw[r, min(k, kq - 1)] + slack * 1.01 + 1e-12
            cands = np.asarray(
                tree.query_ball_point(pts[u], radius), dtype=np.int64
            )
            _rerank_candidates(
                u, cands, k, inst.xs, inst.ys, inst.zs, inst.kind_code, nodes, dists
            )

    return NeighborLists(
        cl_size=cl_size,
        bl_size=bl_size,
        cand=np.ascontiguousarray(nodes[:, :cl_size]),
        backup=np.ascontiguousarray(nodes[:, cl_size:]),
        cand_dist=np.ascontiguousarray(dists[:, :cl_size]),
        backup_dist=np.ascontiguousarray(dists[:, cl_size:]),
    )
