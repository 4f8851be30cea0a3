"""Continuum eigenseries for trapping in ``[0, 2r]`` with start at the centre.

Eigenfunctions are ``psi_i(x) = sin(i*pi*x/(2r)) / sqrt(r)`` with decay rates
``F * (i*pi/(2r))**alpha``.  Only odd ``i`` contribute to quantities that
start from the centre.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

STOP_RUN = 20
BLOCK_TERMS = 4096
MAX_TERMS = 10_000_000
ROW_CHUNK = 256


def eta(i):
    """Series weight ``2(1 - cos(i pi)) / (i pi) * sin(i pi / 2)``.

    Evaluated exactly: zero for even ``i``, ``+-4/(i pi)`` for odd ``i``.
    """
    i = np.asarray(i)
    if np.any(i < 1):
        raise ValueError("i must be >= 1")
    sign = np.where(i % 2 == 1, np.where(i % 4 == 1, 1.0, -1.0), 0.0)
    out = sign * 4.0 / (np.pi * i)
    return out[()] if out.ndim == 0 else out


def eta_partial_sum(terms):
    """``sum_{i<=terms} eta_i`` using math.fsum."""
    odd = np.arange(1, int(terms) + 1, 2, dtype=np.float64)
    return math.fsum(eta(odd.astype(np.int64)))


@dataclass(frozen=True)
class SurvivalSeries:
    alpha: float
    r: float
    F: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.r <= 0 or self.F <= 0 or self.tol <= 0:
            raise ValueError("r, F and tol must be positive")

    def rho(self, i):
        return self.F * (np.asarray(i, dtype=float) * np.pi / 2.0) ** self.alpha

    def eigenvalue(self, i):
        """``lambda_i = -(i pi / 2r)**alpha`` (multiply by ``F`` for a rate)."""
        return -(np.asarray(i, dtype=float) * np.pi / (2.0 * self.r)) ** self.alpha

    def eigenfunction(self, i, x):
        return np.sin(i * np.pi * np.asarray(x, dtype=float) / (2.0 * self.r)) / math.sqrt(self.r)

    def decay_rate(self):
        """Dominant decay rate ``rho_1 / r**alpha``."""
        return float(self.rho(1)) / self.r**self.alpha

    def _sum(self, t, weight):
        """Sum ``weight(i, rows) * exp(-rho_i t / r^a)`` over odd ``i`` until converged.

        ``weight`` returns (values, envelopes) for an array of odd ``i`` and the
        integer positions ``rows`` of the ``t`` entries still being summed.
        Rows are processed in chunks to bound the work array.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        total = np.zeros(t.shape)
        for lo in range(0, t.size, ROW_CHUNK):
            rows = np.arange(lo, min(lo + ROW_CHUNK, t.size))
            total[rows] = self._sum_rows(t[rows], rows, weight)
        return total

    def _sum_rows(self, t, rows, weight):
        scale = t / self.r**self.alpha
        total = np.zeros(t.shape)
        pending = np.ones(t.shape, dtype=bool)
        start = 1
        while pending.any():
            if start > MAX_TERMS:
                warnings.warn("eigenseries truncated before reaching tolerance", RuntimeWarning)
                break
            i = np.arange(start, start + 2 * BLOCK_TERMS, 2)
            decay = np.exp(-np.outer(scale[pending], self.rho(i)))
            vals, env = weight(i, rows[pending])
            total[pending] += (vals * decay).sum(axis=1)
            tail = (env * decay)[:, -STOP_RUN:]
            thresh = self.tol * np.maximum(np.abs(total[pending]), 1.0)
            done = (tail < thresh[:, None]).all(axis=1)
            idx = np.flatnonzero(pending)
            pending[idx[done]] = False
            start = int(i[-1]) + 2
        return total

    def survival_raw(self, t):
        """Unclamped truncated series; ``S(0) = 1`` by definition."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise ValueError("t must be >= 0")
        flat = np.atleast_1d(t)
        out = np.ones(flat.shape)
        pos = flat > 0
        if pos.any():
            def weight(i, _):
                e = eta(i)
                return e[None, :], np.abs(e)[None, :]
            out[pos] = self._sum(flat[pos], weight)
        return out.reshape(t.shape)[()] if t.ndim == 0 else out.reshape(t.shape)

    def survival(self, t):
        return np.clip(self.survival_raw(t), 0.0, 1.0)

    def fet_cdf(self, t):
        """``P{T <= t} = 1 - S(t)`` from the raw series."""
        return 1.0 - self.survival_raw(t)

    def occupation(self, x, t):
        """Occupation density ``P(x, t)`` for ``x`` in ``[0, 2r]``, ``t > 0``."""
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 2 * self.r)):
            raise ValueError("x must lie in [0, 2r]")
        if not t > 0:
            raise ValueError("t must be positive")
        flat = np.atleast_1d(x)
        # h_i * psi_i(x) = sin(i pi / 2) sin(i pi x / 2r) / r; evaluate per x row
        ts = np.full(flat.shape, float(t))

        def weight(i, rows):
            h = np.where(i % 4 == 1, 1.0, -1.0) / self.r
            s = np.sin(np.outer(flat[rows], i) * np.pi / (2.0 * self.r))
            return h * s, np.full(s.shape, 1.0 / self.r)

        out = self._sum(ts, weight)
        # sin(i pi) is exactly zero at the walls; floating point is not
        out[(flat == 0) | (flat == 2 * self.r)] = 0.0
        return out.reshape(x.shape)[()] if x.ndim == 0 else out.reshape(x.shape)

    def table(self, t_grid):
        """Rows ``(t, survival, fet_cdf)`` for the CSV emitter."""
        t_grid = np.asarray(t_grid, dtype=float)
        order = np.argsort(t_grid)
        s = np.empty(t_grid.shape)
        # S is non-increasing; a running minimum removes rounding wiggles near S = 1
        s[order] = np.minimum.accumulate(self.survival(t_grid[order]))
        return [(float(t), float(v), float(1.0 - v)) for t, v in zip(t_grid, s)]


def matched_diffusivity(law):
    """``F = E[(Z cos theta)^2] / 2`` aligning continuum time with step count."""
    from .projection import projected_second_moment

    return projected_second_moment(law) / 2.0
