"""Shared test helpers: instance factories and TSPLIB file resolution."""

from __future__ import annotations

import os
import pathlib

import numpy as np
import pytest

from faco import TspInstance, load_instance

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent
TSPLIB_DIR = pathlib.Path(os.environ.get("FACO_TSPLIB_DIR", REPO_ROOT / "data" / "tsplib"))


def rand_instance(n, seed, scale=10000.0, kind="EUC_2D", name=None):
    rng = np.random.default_rng(seed)
    dim = 3 if kind == "EUC_3D" else 2
    coords = rng.uniform(0.0, scale, size=(n, dim))
    return TspInstance(name or f"rand{n}-{seed}", coords, kind)


def clustered_instance(n_clusters, per_cluster, seed, scale=30000.0, spread=900.0):
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, scale, size=(n_clusters, 2))
    pts = np.vstack(
        [c + rng.normal(0.0, spread, size=(per_cluster, 2)) for c in centers]
    )
    return TspInstance(f"clust{n_clusters * per_cluster}-{seed}", pts, "EUC_2D")


def grid_instance(w, h, spacing=10.0):
    """w x h grid of points. For even w or h the optimum is exactly
    w*h*spacing (a snake tour of unit steps meets the degree lower bound)."""
    g = np.mgrid[0:w, 0:h].reshape(2, -1).T.astype(float) * spacing
    return TspInstance(f"grid{w}x{h}", g, "EUC_2D")


def random_route(n, seed):
    rng = np.random.default_rng(seed)
    return rng.permutation(n).astype(np.int32)


def canonical_cycle(order) -> tuple:
    """Rotation- and direction-independent form of a cycle, for equality."""
    arr = [int(x) for x in getattr(order, "order", order)]
    i = arr.index(0)
    arr = arr[i:] + arr[:i]
    if len(arr) > 2 and arr[1] > arr[-1]:
        arr = [arr[0]] + arr[:0:-1]
    return tuple(arr)


def tsplib_instance_or_skip(name: str, best_known: int | None = None):
    path = TSPLIB_DIR / f"{name}.tsp"
    if not path.exists():
        pytest.skip(
            f"TSPLIB instance {name}.tsp not found under {TSPLIB_DIR}; "
            f"download it from a TSPLIB mirror into that directory or set "
            f"FACO_TSPLIB_DIR (see README)."
        )
    return load_instance(path, best_known=best_known)
