"""Pheromone memory restricted to candidate-list edges.

Trails exist only for edges (u, v) with v in u's candidate list, giving
O(n) storage. Values live inside MAX-MIN style limits: evaporation
clamps from below, deposition from above. An edge stored in both
endpoints' lists carries the same value in both slots after any update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ParameterError
from .neighbors import NeighborLists
from .route import EdgeView

# tau_max = 1 / (cost * (1 - rho)) has a removable singularity at
# rho = 1; with no evaporation the value is inert, so a tiny floor on
# (1 - rho) keeps the formula total.
_MIN_RETENTION_GAP = 1e-10


@dataclass(frozen=True)
class TrailLimits:
    """Current trail bounds plus the parameters they were derived from."""

    tau_max: float
    tau_min: float
    rho: float
    p_best: float
    avg: float


def compute_limits(
    cost_gb: int | float,
    rho: float,
    p_best: float | None,
    n: int,
    avg: float,
    p_dec: float | None = None,
) -> TrailLimits:
    """Trail bounds for the current global-best cost.

    tau_max = 1 / (cost_gb * (1 - rho)); tau_min follows the standard
    MAX-MIN formula with branching estimate `avg`, clamped to tau_max.
    The formula's n-th root of p_best is the probability of picking a
    maximum-trail edge at a single construction step; callers may pin
    that per-step probability directly via `p_dec` instead of supplying
    a whole-tour p_best (a fixed p_best drives the root to 1 as n
    grows, freezing construction onto the source solution).
    """
    if cost_gb <= 0:
        raise ParameterError("cost_gb must be positive")
    if not 0.0 < rho <= 1.0:
        raise ParameterError("rho must be in (0, 1]")
    if (p_best is None) == (p_dec is None):
        raise ParameterError("exactly one of p_best and p_dec must be given")
    if p_best is not None:
        if not 0.0 < p_best < 1.0:
            raise ParameterError("p_best must be in (0, 1)")
        root = p_best ** (1.0 / n)
    else:
        if not 0.0 < p_dec < 1.0:
            raise ParameterError("p_dec must be in (0, 1)")
        root = p_dec
    if avg < 2:
        raise ParameterError("avg must be at least 2")
    tau_max = 1.0 / (cost_gb * max(1.0 - rho, _MIN_RETENTION_GAP))
    tau_min = min(tau_max, tau_max * (1.0 - root) / ((avg - 1.0) * root))
    return TrailLimits(
        tau_max=tau_max, tau_min=tau_min, rho=rho,
        p_best=p_best if p_best is not None else root**n, avg=avg,
    )


@njit(cache=True)
def _deposit(succ, cand, trails, amount, tau_max):
    n, cl = cand.shape
    for u in range(n):
        v = succ[u]
        for s in range(cl):
            if cand[u, s] == v:
                t = trails[u, s] + amount
                trails[u, s] = t if t < tau_max else tau_max
                break
        for s in range(cl):
            if cand[v, s] == u:
                t = trails[v, s] + amount
                trails[v, s] = t if t < tau_max else tau_max
                break


class PartialPheromone:
    """Trail values for candidate-list edges, kept within [tau_min, tau_max]."""

    def __init__(self, lists: NeighborLists, limits: TrailLimits):
        self.lists = lists
        self.limits = limits
        self.trails = np.empty(lists.cand.shape, dtype=np.float64)
        self.init_trails()

    def init_trails(self) -> None:
        """Reset every stored trail to tau_max."""
        self.trails[:] = self.limits.tau_max

    def set_limits(self, limits: TrailLimits) -> None:
        self.limits = limits

    def evaporate(self) -> None:
        """Apply one evaporation step: tau <- max(tau_min, rho * tau)."""
        self.trails *= self.limits.rho
        np.maximum(self.trails, self.limits.tau_min, out=self.trails)

    def deposit(self, tour: EdgeView, amount: float) -> None:
        """Raise the trail of every stored occurrence of the tour's edges."""
        if amount <= 0:
            raise ParameterError("deposit amount must be positive")
        _deposit(tour.succ, self.lists.cand, self.trails, amount, self.limits.tau_max)

    def get_trail(self, u: int, slot: int) -> float:
        if not 0 <= slot < self.lists.cl_size:
            raise IndexError(f"slot {slot} outside the candidate list")
        return float(self.trails[u, slot])
