"""TSP instances in TSPLIB node-coordinate format.

Covers the symmetric Euclidean family used by the solver: EUC_2D,
CEIL_2D, EUC_3D and ATT edge weights. Distances are integers computed
on demand from coordinates following the TSPLIB rounding conventions;
no distance matrix is ever materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import InvalidTourError, ParseError, UnsupportedFormatError

EUC_2D, CEIL_2D, EUC_3D, ATT = 0, 1, 2, 3

WEIGHT_KINDS = {"EUC_2D": EUC_2D, "CEIL_2D": CEIL_2D, "EUC_3D": EUC_3D, "ATT": ATT}


@njit(cache=True, inline="always")
def dist(xs, ys, zs, kind, i, j):
    """Integer edge cost between nodes i and j (TSPLIB rounding)."""
    dx = xs[i] - xs[j]
    dy = ys[i] - ys[j]
    if kind == 2:  # EUC_3D
        dz = zs[i] - zs[j]
        return np.int64(math.sqrt(dx * dx + dy * dy + dz * dz) + 0.5)
    r2 = dx * dx + dy * dy
    if kind == 0:  # EUC_2D
        return np.int64(math.sqrt(r2) + 0.5)
    if kind == 1:  # CEIL_2D
        return np.int64(math.ceil(math.sqrt(r2)))
    # ATT pseudo-Euclidean
    r = math.sqrt(r2 / 10.0)
    t = np.int64(r + 0.5)
    if t < r:
        t += 1
    return t


@njit(cache=True)
def _tour_length(order, xs, ys, zs, kind):
    total = np.int64(0)
    n = order.shape[0]
    for k in range(n):
        a = order[k]
        b = order[k + 1] if k + 1 < n else order[0]
        total += dist(xs, ys, zs, kind, a, b)
    return total


@dataclass
class TspInstance:
    """Immutable TSP instance: named node set plus an integer metric."""

    name: str
    coords: np.ndarray  # (n, 2) or (n, 3) float64
    weight_kind: str
    best_known: int | None = None

    xs: np.ndarray = field(init=False, repr=False)
    ys: np.ndarray = field(init=False, repr=False)
    zs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.weight_kind not in WEIGHT_KINDS:
            raise UnsupportedFormatError(
                f"unsupported EDGE_WEIGHT_TYPE: {self.weight_kind}"
            )
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        if self.coords.ndim != 2 or self.coords.shape[1] not in (2, 3):
            raise ParseError("coordinates must be an (n, 2) or (n, 3) array")
        if self.coords.shape[0] < 3:
            raise ParseError("instance needs at least 3 nodes")
        if not np.all(np.isfinite(self.coords)):
            raise ParseError("coordinates must be finite")
        if self.weight_kind == "EUC_3D" and self.coords.shape[1] != 3:
            raise ParseError("EUC_3D requires 3-dimensional coordinates")
        self.xs = np.ascontiguousarray(self.coords[:, 0])
        self.ys = np.ascontiguousarray(self.coords[:, 1])
        if self.coords.shape[1] == 3:
            self.zs = np.ascontiguousarray(self.coords[:, 2])
        else:
            self.zs = np.zeros(self.coords.shape[0], dtype=np.float64)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def kind_code(self) -> int:
        return WEIGHT_KINDS[self.weight_kind]

    def distance(self, i: int, j: int) -> int:
        """Edge cost d(i, j); symmetric, non-negative, integer."""
        n = self.n
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"node id out of range: ({i}, {j})")
        if i == j:
            raise ValueError(f"no self-loop edge ({i}, {i}) exists")
        return int(dist(self.xs, self.ys, self.zs, self.kind_code, i, j))

    def tour_length(self, route) -> int:
        """Total cost of a Hamiltonian cycle, including the closing edge."""
        order = np.ascontiguousarray(getattr(route, "order", route), dtype=np.int64)
        n = self.n
        if order.shape != (n,) or not np.array_equal(
            np.sort(order), np.arange(n, dtype=np.int64)
        ):
            raise InvalidTourError(
                f"route is not a permutation of 0..{n - 1}"
            )
        return int(_tour_length(order, self.xs, self.ys, self.zs, self.kind_code))


def tour_length(inst: TspInstance, route) -> int:
    return inst.tour_length(route)


def distance(inst: TspInstance, i: int, j: int) -> int:
    return inst.distance(i, j)


def parse_tsplib(text: str, name: str | None = None) -> TspInstance:
    """Parse a TSPLIB ``.tsp`` document with a NODE_COORD_SECTION.

    Node ids are remapped to 0..n-1 whatever numbering the file uses.
    Raises ParseError or UnsupportedFormatError on bad input.
    """
    header: dict[str, str] = {}
    numbered = [
        (no, line)
        for no, raw in enumerate(text.splitlines(), start=1)
        if (line := raw.strip())
    ]

    pos = 0
    coords_line_no = None
    while pos < len(numbered):
        line_no, line = numbered[pos]
        pos += 1
        upper = line.upper()
        if upper == "EOF":
            break
        if upper.startswith("NODE_COORD_SECTION"):
            coords_line_no = line_no
            break
        if ":" in line:
            key, _, value = line.partition(":")
            key = key.strip().upper()
            value = value.strip()
            header[key] = value
            if key == "EDGE_WEIGHT_TYPE" and value not in WEIGHT_KINDS:
                raise UnsupportedFormatError(
                    f"line {line_no}: unsupported EDGE_WEIGHT_TYPE: {value}"
                )
            if key == "TYPE" and value.split()[0] != "TSP":
                raise UnsupportedFormatError(
                    f"line {line_no}: unsupported TYPE: {value}"
                )
        # keyword lines without ':' carry nothing we need

    if coords_line_no is None:
        raise ParseError("missing NODE_COORD_SECTION")

    kind = header.get("EDGE_WEIGHT_TYPE")
    if kind is None:
        raise ParseError(f"line {coords_line_no}: missing EDGE_WEIGHT_TYPE")
    if "DIMENSION" not in header:
        raise ParseError(f"line {coords_line_no}: missing DIMENSION")
    try:
        n = int(header["DIMENSION"])
    except ValueError:
        raise ParseError(f"invalid DIMENSION: {header['DIMENSION']!r}") from None

    dim = 3 if kind == "EUC_3D" else 2
    ids = np.empty(n, dtype=np.int64)
    pts = np.empty((n, dim), dtype=np.float64)
    for row in range(n):
        if pos >= len(numbered) or numbered[pos][1].upper() == "EOF":
            last = numbered[pos - 1][0] if pos > 0 else coords_line_no
            raise ParseError(
                f"line {last}: DIMENSION is {n} but only {row} coordinate lines found"
            )
        line_no, line = numbered[pos]
        pos += 1
        parts = line.split()
        if len(parts) < 1 + dim:
            raise ParseError(f"line {line_no}: expected node id and {dim} coordinates")
        try:
            ids[row] = int(float(parts[0]))
            for d in range(dim):
                pts[row, d] = float(parts[1 + d])
        except ValueError:
            raise ParseError(f"line {line_no}: malformed coordinate line") from None

    # Remap declared ids (usually 1-based, occasionally 0-based) to 0..n-1.
    base = ids.min()
    remapped = ids - base
    if not np.array_equal(np.sort(remapped), np.arange(n)):
        raise ParseError("node ids do not form a contiguous range")
    coords = np.empty_like(pts)
    coords[remapped] = pts

    inst_name = header.get("NAME") or name or "unnamed"
    return TspInstance(name=inst_name, coords=coords, weight_kind=kind)


def write_tsplib(inst: TspInstance, comment: str = "") -> str:
    """Serialize an instance back to TSPLIB text (exact coordinates)."""
    lines = [
        f"NAME : {inst.name}",
        "TYPE : TSP",
    ]
    if comment:
        lines.append(f"COMMENT : {comment}")
    lines += [
        f"DIMENSION : {inst.n}",
        f"EDGE_WEIGHT_TYPE : {inst.weight_kind}",
        "NODE_COORD_SECTION",
    ]
    for i in range(inst.n):
        parts = " ".join(repr(float(c)) for c in inst.coords[i])
        lines.append(f"{i + 1} {parts}")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def load_instance(path, best_known: int | None = None) -> TspInstance:
    """Read a ``.tsp`` file; the file's NAME header wins over the filename."""
    import pathlib

    p = pathlib.Path(path)
    inst = parse_tsplib(p.read_text(), name=p.stem)
    if best_known is not None:
        inst.best_known = int(best_known)
    return inst


def read_best_known(text: str) -> dict[str, int]:
    """Parse a sidecar table of ``instance-name cost`` lines."""
    table: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {line_no}: expected 'name cost'")
        try:
            table[parts[0]] = int(parts[1])
        except ValueError:
            raise ParseError(f"line {line_no}: bad cost {parts[1]!r}") from None
    return table
