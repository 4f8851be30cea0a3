"""Hoeffding-style bounds for the projected flight.

The bounds are evaluated exactly as printed (variance in the exponent) and
are checked empirically rather than re-derived.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .projection import projected_second_moment
from .stepdist import StepLaw


def displacement_tail_bound(r, t, s2):
    """Bound on ``P{|X_x(t)| >= r/sqrt(2)}``: ``2 exp(-r^2 / (8 t s2))``."""
    if r <= 0 or t <= 0 or s2 <= 0:
        raise ValueError("r, t and s2 must be positive")
    return 2.0 * math.exp(-r * r / (8.0 * t * s2))


def exit_time_tail_bound(r, k, s2):
    """Bound on ``P{T_x(r/sqrt(2)) <= k}``: ``2k exp(-r^2 / (8 k s2))``."""
    if r <= 0 or s2 <= 0:
        raise ValueError("r and s2 must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    return 2.0 * k * math.exp(-r * r / (8.0 * k * s2))


@dataclass
class VanishingTable:
    n: np.ndarray
    horizon: np.ndarray
    s2: np.ndarray
    bound: np.ndarray

    @property
    def decreasing_from(self):
        """First grid index after which the bound is strictly decreasing, or None
        if the last step still increases."""
        b = self.bound
        if b.size < 2:
            return None
        inc = np.flatnonzero(np.diff(b) >= 0)
        start = 0 if inc.size == 0 else int(inc[-1]) + 1
        return start if start < b.size - 1 else None

    @property
    def vanishing(self):
        return self.decreasing_from is not None

    def rows(self):
        return list(zip(self.n.tolist(), self.horizon.tolist(), self.s2.tolist(),
                        self.bound.tolist()))


def vanishing_check(alpha, epsilon, n_grid, c_d=0.25, sigma=1.0):
    """Evaluate ``2 t exp(-c_d^2 n / (8 t s2))`` with ``t = n**(alpha/2 - epsilon)``.

    ``s2`` comes from the exact truncated law, never from simulation.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    n = np.asarray(n_grid, dtype=float)
    horizon = n ** (0.5 * alpha - epsilon)
    s2 = np.array([projected_second_moment(StepLaw(alpha, v, sigma)) for v in n])
    # log form: the raw bound over/underflows at the far end of the grid
    logb = math.log(2.0) + np.log(horizon) - c_d**2 * n / (8.0 * horizon * s2)
    return VanishingTable(n, horizon, s2, np.exp(logb))
