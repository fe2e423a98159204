"""Tour representation shared by construction and local search.

A Route keeps the tour order plus the inverse position index, giving
constant-time successor/predecessor/membership queries and section
flips that physically reverse the shorter of the two arcs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import InvalidTourError, ParseError


@njit(cache=True, inline="always")
def flip_arc(order, pos, n, x, y):
    """2-opt section flip: reverse the arc of the tour running from x to y.

    Replaces edges (pred(x), x) and (y, succ(y)) with (pred(x), y) and
    (x, succ(y)). Whichever of the two arcs is shorter is the one
    physically reversed, so at most ceil(n/2) elements move; the
    resulting undirected cycle is the same either way. Returns the
    number of elements moved.
    """
    i = pos[x]
    j = pos[y]
    length = (j - i) % n + 1
    if length + length > n:
        i, j = (j + 1) % n, (i - 1) % n
        length = n - length
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
    return length


@njit(cache=True)
def _fill_succ_pred(order, succ, pred):
    n = order.shape[0]
    for k in range(n):
        u = order[k]
        v = order[k + 1] if k + 1 < n else order[0]
        succ[u] = v
        pred[v] = u


def _as_permutation(order, n=None) -> np.ndarray:
    arr = np.ascontiguousarray(getattr(order, "order", order), dtype=np.int32)
    if n is not None and arr.shape[0] != n:
        raise InvalidTourError(f"expected {n} nodes, got {arr.shape[0]}")
    if arr.ndim != 1 or not np.array_equal(
        np.sort(arr), np.arange(arr.shape[0], dtype=np.int32)
    ):
        raise InvalidTourError("route is not a permutation of 0..n-1")
    return arr


class Route:
    """A Hamiltonian cycle over nodes 0..n-1."""

    __slots__ = ("order", "pos")

    def __init__(self, order, validate: bool = True):
        if validate:
            self.order = _as_permutation(order).copy()
        else:
            self.order = np.ascontiguousarray(order, dtype=np.int32)
        self.pos = np.empty_like(self.order)
        self.pos[self.order] = np.arange(self.order.shape[0], dtype=np.int32)

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def succ(self, u: int) -> int:
        k = self.pos[u] + 1
        return int(self.order[k if k < self.n else 0])

    def pred(self, u: int) -> int:
        return int(self.order[self.pos[u] - 1])

    def flip_section(self, x: int, y: int) -> int:
        """Apply a 2-opt flip between x and y; returns elements moved."""
        if x == y:
            raise ValueError("flip endpoints must differ")
        return int(flip_arc(self.order, self.pos, self.n, x, y))

    def copy(self) -> "Route":
        return Route(self.order.copy(), validate=False)

    def edge_view(self) -> "EdgeView":
        return EdgeView.from_order(self.order)

    def __repr__(self):
        return f"Route(n={self.n})"


class EdgeView:
    """Frozen succ/pred arrays of a tour, used for edge-membership tests."""

    __slots__ = ("succ", "pred")

    def __init__(self, succ: np.ndarray, pred: np.ndarray):
        self.succ = succ
        self.pred = pred

    @classmethod
    def from_order(cls, order) -> "EdgeView":
        arr = _as_permutation(order)
        succ = np.empty_like(arr)
        pred = np.empty_like(arr)
        _fill_succ_pred(arr, succ, pred)
        return cls(succ, pred)

    @property
    def n(self) -> int:
        return self.succ.shape[0]

    def edge_in(self, u: int, v: int) -> bool:
        """Undirected membership: true iff (u, v) is an edge of the tour."""
        if u == v:
            raise ValueError("edges join distinct nodes")
        return bool(self.succ[u] == v or self.pred[u] == v)


def edge_in(view: EdgeView, u: int, v: int) -> bool:
    return view.edge_in(u, v)


def write_tour(name: str, route, length: int | None = None) -> str:
    """Serialize a tour in TSPLIB ``.tour`` format (1-based, -1 terminated)."""
    order = _as_permutation(route)
    lines = [f"NAME : {name}", "TYPE : TOUR"]
    if length is not None:
        lines.append(f"COMMENT : length {length}")
    lines += [f"DIMENSION : {order.shape[0]}", "TOUR_SECTION"]
    lines += [str(int(u) + 1) for u in order]
    lines += ["-1", "EOF"]
    return "\n".join(lines) + "\n"


def parse_tour(text: str) -> np.ndarray:
    """Read a ``.tour`` file back into a 0-based permutation array."""
    nodes: list[int] = []
    in_section = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.upper().startswith("TOUR_SECTION"):
            in_section = True
            continue
        if not in_section:
            continue
        for tok in line.split():
            if tok == "-1" or tok.upper() == "EOF":
                in_section = False
                break
            nodes.append(int(tok) - 1)
        if not in_section:
            break
    if not nodes:
        raise ParseError("no TOUR_SECTION entries found")
    return _as_permutation(np.asarray(nodes, dtype=np.int32))
