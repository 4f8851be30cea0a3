"""Levy flight / Levy walk trajectory engines with first-exit detection.

Both models consume the same sequence of (length, angle) pairs.  A flight
spends one time unit per step and is only observed at step ends; a walk
moves at unit speed, so a step of length ``Z`` takes time ``Z``.  Because the
exit disc is convex and the walker starts inside it, the walk crosses the
circle during exactly the step whose end point is the flight's first point
outside.  One pass over a step stream therefore gives both exit times.

Displacement is measured from the start point in the unwrapped plane; the
exit radius is always below ``sqrt(n)/2`` so torus wrap-around never matters.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
DEFAULT_CAP = 10**9
# elements per (trials x steps) chunk array
CHUNK_BUDGET = 1 << 18
MIN_CHUNK = 16
MAX_CHUNK = 4096


class ModelKind(enum.Enum):
    FLIGHT = "flight"
    WALK = "walk"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


class TrialCapExceeded(RuntimeError):
    """A trial ran past the step cap without leaving the disc."""


@dataclass(frozen=True)
class ExitRecord:
    exit_time: float
    step_count: int
    truncated_last: float = math.nan
    exit_time_x: float = math.nan


@dataclass
class ExitArrays:
    """Column-wise results for a block of trials.

    ``step_count`` and ``axis_steps`` hold -1 for abandoned (capped) trials.
    ``walk_time`` and ``truncated_last`` are NaN for those trials.
    """

    step_count: np.ndarray
    walk_time: np.ndarray
    truncated_last: np.ndarray
    axis_steps: np.ndarray

    @property
    def abandoned(self) -> np.ndarray:
        tracked = self.step_count if self.step_count.size else self.axis_steps
        return tracked < 0

    def __len__(self):
        return max(self.step_count.size, self.axis_steps.size)


def step(rng, law):
    """Draw one ``(length, angle)`` pair; the two are independent."""
    length = float(law.sample(rng.random()))
    angle = TWO_PI * rng.random()
    return length, angle


def simulate_exits(law, r, size, rng, *, disc=True, axis_radius=None, cap=DEFAULT_CAP):
    """Run ``size`` independent trials from the origin.

    Parameters
    ----------
    law : StepLaw (or anything with a vectorised ``sample(u)``)
    r : float
        Disc radius for the 2-D exit.
    size : int
    rng : numpy Generator
    disc : bool
        Track the 2-D disc exit (flight step count and walk crossing time).
    axis_radius : float, optional
        Also track the first step end with ``|X_x| >= axis_radius``.
    cap : int
        Trials still running after ``cap`` steps are abandoned.
    """
    if not disc and axis_radius is None:
        raise ValueError("nothing to track")
    r2 = float(r) ** 2
    n_disc = np.full(size if disc else 0, -1, dtype=np.int64)
    walk_time = np.full(size if disc else 0, np.nan)
    trunc = np.full(size if disc else 0, np.nan)
    n_axis = np.full(0 if axis_radius is None else size, -1, dtype=np.int64)

    x = np.zeros(size)
    y = np.zeros(size)
    elapsed = np.zeros(size)
    steps = 0  # every active trial has taken the same number of steps
    active = np.arange(size)

    while active.size:
        a = active.size
        k = int(min(MAX_CHUNK, max(MIN_CHUNK, CHUNK_BUDGET // a)))
        k = min(k, max(1, cap - steps))
        lengths = law.sample(rng.random((a, k)))
        theta = TWO_PI * rng.random((a, k))
        cos_t = np.cos(theta)
        cx = np.cumsum(lengths * cos_t, axis=1)
        cx += x[active, None]

        if disc:
            open_rows = n_disc[active] < 0
            sin_t = np.sin(theta)
            cy = np.cumsum(lengths * sin_t, axis=1)
            cy += y[active, None]
            hit = cx * cx + cy * cy >= r2
            rows = np.flatnonzero(open_rows & hit.any(axis=1))
            if rows.size:
                j = hit[rows].argmax(axis=1)
                ids = active[rows]
                first = j == 0
                jm = np.maximum(j - 1, 0)
                px = np.where(first, x[ids], cx[rows, jm])
                py = np.where(first, y[ids], cy[rows, jm])
                before = np.cumsum(lengths[rows], axis=1)[np.arange(rows.size), jm]
                before = np.where(first, 0.0, before) + elapsed[ids]
                tp = _crossing(px, py, cos_t[rows, j], sin_t[rows, j], r2)
                tp = np.minimum(tp, lengths[rows, j])
                n_disc[ids] = steps + j + 1
                walk_time[ids] = before + tp
                trunc[ids] = tp
            y[active] = cy[:, -1]
            elapsed[active] += lengths.sum(axis=1)

        if axis_radius is not None:
            hit_x = np.abs(cx) >= axis_radius
            rows = np.flatnonzero((n_axis[active] < 0) & hit_x.any(axis=1))
            if rows.size:
                n_axis[active[rows]] = steps + hit_x[rows].argmax(axis=1) + 1

        x[active] = cx[:, -1]
        steps += k

        still = np.zeros(a, dtype=bool)
        if disc:
            still |= n_disc[active] < 0
        if axis_radius is not None:
            still |= n_axis[active] < 0
        active = active[still]
        if active.size and steps >= cap:
            # abandon: clear partial results so nothing censored leaks out
            if disc:
                n_disc[active] = -1
                walk_time[active] = np.nan
                trunc[active] = np.nan
            if axis_radius is not None:
                n_axis[active] = -1
            break

    return ExitArrays(n_disc, walk_time, trunc, n_axis)


def _crossing(px, py, ux, uy, r2):
    """Smallest positive ``s`` with ``|p + s*u| = r`` for ``p`` strictly inside."""
    pu = px * ux + py * uy
    pp = px * px + py * py
    if np.any(pp >= r2):
        raise AssertionError("segment start is not inside the disc")
    # product of the roots is pp - r2 < 0: exactly one positive root
    disc = pu * pu + (r2 - pp)
    return -pu + np.sqrt(disc)


def first_exit(kind, law, r, rng, cap=DEFAULT_CAP) -> ExitRecord:
    """Single-trial first exit from the disc of radius ``r``."""
    kind = ModelKind.parse(kind)
    res = simulate_exits(law, r, 1, rng, cap=cap)
    if res.step_count[0] < 0:
        raise TrialCapExceeded(f"no exit within {cap} steps")
    n = int(res.step_count[0])
    if kind is ModelKind.FLIGHT:
        return ExitRecord(float(n), n)
    return ExitRecord(float(res.walk_time[0]), n, float(res.truncated_last[0]))


def coupled_first_exit(law, r, rng, cap=DEFAULT_CAP):
    """Flight and walk exits driven by one shared step stream.

    Returns ``(flight, walk)``.  ``walk.step_count == flight.exit_time``
    holds by construction, and ``walk.exit_time >= flight.exit_time - 1``
    because every step is at least 1 long.
    """
    res = simulate_exits(law, r, 1, rng, axis_radius=r, cap=cap)
    if res.step_count[0] < 0:
        raise TrialCapExceeded(f"no exit within {cap} steps")
    n = int(res.step_count[0])
    flight = ExitRecord(float(n), n, exit_time_x=float(res.axis_steps[0]))
    walk = ExitRecord(float(res.walk_time[0]), n, float(res.truncated_last[0]))
    return flight, walk


def projected_first_exit(law, r, rng, cap=DEFAULT_CAP) -> int:
    """First step count at which ``|sum Z_i cos(theta_i)| >= r`` (flight time)."""
    res = simulate_exits(law, r, 1, rng, disc=False, axis_radius=r, cap=cap)
    if res.axis_steps[0] < 0:
        raise TrialCapExceeded(f"no exit within {cap} steps")
    return int(res.axis_steps[0])
