"""Scaling experiments: exit-time statistics across n and fitted exponents."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import fet_mc
from .mobility import DEFAULT_CAP, ModelKind
from .stepdist import StepLaw

DEFAULT_N_GRID = tuple(2**k for k in (10, 12, 14, 16, 18))
DEFAULT_TRIALS = 20_000
STATISTICS = ("q10", "q50", "q90", "mean")
R2_GATE = 0.99
SLOPE_TOL = 0.08


@dataclass
class ScalingRow:
    n: float
    q10: float
    q50: float
    q90: float
    mean: float
    trials: int
    abandoned: int
    seed: int
    q_min: float = math.nan


@dataclass
class ScalingTable:
    model: ModelKind
    alpha: float
    c_d: float
    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def n(self):
        return self.column("n")

    def csv_rows(self):
        return [(r.n, r.q10, r.q50, r.q90, r.mean, r.trials, r.abandoned) for r in self.rows]


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float
    theoretical: float = math.nan

    def status(self, tol=SLOPE_TOL, r2_gate=R2_GATE):
        """``pass``/``fail`` against theory, or ``inconclusive`` when R^2 is too low."""
        if self.r_squared < r2_gate:
            return "inconclusive"
        return "pass" if abs(self.slope - self.theoretical) <= tol else "fail"


def theoretical_exponent(model, alpha):
    """Flight: ``alpha/2``.  Walk: ``max(1/2, alpha/2)``."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    model = ModelKind.parse(model)
    return alpha / 2.0 if model is ModelKind.FLIGHT else max(0.5, alpha / 2.0)


def run_scaling(model, alpha, n_grid=DEFAULT_N_GRID, c_d=0.25, trials_per_n=DEFAULT_TRIALS,
                seed=0, *, sigma=1.0, cap=DEFAULT_CAP, workers=None):
    """One row of quantile statistics per ``n``.

    Cell ``i`` uses stream key ``(i,)`` under ``seed``; flight and walk tables
    with the same seed are therefore coupled trial by trial.
    """
    model = ModelKind.parse(model)
    n_grid = sorted(float(v) for v in n_grid)
    if len(n_grid) < 4:
        raise ValueError("n_grid needs at least 4 points")
    table = ScalingTable(model, alpha, c_d, meta=dict(
        model=model.value, alpha=alpha, c_d=c_d, n_grid=n_grid, trials_per_n=int(trials_per_n),
        seed=int(seed), sigma=sigma))
    for i, n in enumerate(n_grid):
        fet = fet_mc.run_batch(model, alpha, n, c_d, trials_per_n, seed, sigma=sigma,
                               stream=(i,), cap=cap, workers=workers)
        table.rows.append(ScalingRow(n, fet.quantile(0.1), fet.quantile(0.5), fet.quantile(0.9),
                                     fet.mean(), fet.trials, fet.abandoned, int(seed),
                                     fet.quantile(0.0)))
    return table


def fit_loglog(n, values, theoretical=math.nan):
    n = np.asarray(n, dtype=float)
    values = np.asarray(values, dtype=float)
    if n.size < 4:
        raise ValueError("need at least 4 points")
    if np.any(values <= 0):
        raise ValueError("statistics must be positive")
    res = stats.linregress(np.log(n), np.log(values))
    return ExponentFit(float(res.slope), float(res.intercept), float(res.stderr),
                       float(res.rvalue**2), theoretical)


def fit_exponent(table: ScalingTable, statistic="q50"):
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}")
    return fit_loglog(table.n, table.column(statistic),
                      theoretical_exponent(table.model, table.alpha))


def phase_transition_scan(alpha_grid, n_grid=DEFAULT_N_GRID, c_d=0.25,
                          trials=DEFAULT_TRIALS, seed=0, *, model=ModelKind.WALK,
                          statistic="q50", workers=None):
    """Fit the exponent at each alpha; returns ``[(alpha, ExponentFit), ...]``."""
    alpha_grid = sorted(alpha_grid)
    out = []
    for j, a in enumerate(alpha_grid):
        table = run_scaling(model, a, n_grid, c_d, trials, seed + 7919 * j, workers=workers)
        out.append((a, fit_exponent(table, statistic)))
    return out


def kink_summary(scan):
    """Describe the walk exponent on either side of ``alpha = 1``.

    Below 1 the slopes should be flat near 1/2; above 1 they should track
    ``alpha/2``.  ``kink`` is True when the low side is flat (all pairs within
    two combined standard errors, or 0.08 when errors are tiny) and the high
    side rises with alpha.
    """
    low = [(a, f) for a, f in scan if a < 1.0]
    high = [(a, f) for a, f in scan if a > 1.0]
    flat = all(abs(f1.slope - f2.slope) < max(2 * math.hypot(f1.slope_stderr, f2.slope_stderr),
                                              SLOPE_TOL)
               for (_, f1), (_, f2) in zip(low, low[1:]))
    rising = all(f2.slope > f1.slope for (_, f1), (_, f2) in zip(high, high[1:]))
    return dict(low=[(a, f.slope) for a, f in low], high=[(a, f.slope) for a, f in high],
                flat_below_one=flat, rising_above_one=rising,
                kink=bool(low and high and flat and rising))


@dataclass
class SandwichRow:
    t: float
    lower: float   # P{T_x(r) <= t}
    middle: float  # P{T(r) <= t}
    upper: float   # P{T_x(r/sqrt2) <= t}
    lower_ok: bool
    upper_ok: bool


def sandwich_report(alpha, n, c_d=0.25, trials=100_000, t_grid=None, seed=0, *,
                    delta=0.01, sigma=1.0, workers=None):
    """Check ``P{T_x(r)<=t} <= P{T(r)<=t} <= 2 P{T_x(r/sqrt2)<=t}`` for the flight.

    The three columns come from independent streams; each inequality gets the
    sum of the DKW half-widths of the columns involved.  ``t_grid`` defaults
    to the deciles of ``T(r)``.
    """
    r = c_d * math.sqrt(n)
    mid = fet_mc.run_batch(ModelKind.FLIGHT, alpha, n, c_d, trials, seed, sigma=sigma,
                           stream=(0,), workers=workers)
    low = fet_mc.run_projected_batch(alpha, n, r, trials, seed, sigma=sigma, stream=(1,),
                                     workers=workers)
    up = fet_mc.run_projected_batch(alpha, n, r / math.sqrt(2.0), trials, seed, sigma=sigma,
                                    stream=(2,), workers=workers)
    if t_grid is None:
        t_grid = [mid.quantile(q) for q in np.arange(1, 10) / 10.0]
    e_mid, e_low, e_up = mid.dkw(delta), low.dkw(delta), up.dkw(delta)
    rows = []
    for t in t_grid:
        fl, fm, fu = float(low.cdf_at(t)), float(mid.cdf_at(t)), float(up.cdf_at(t))
        rows.append(SandwichRow(float(t), fl, fm, fu,
                                fl <= fm + e_low + e_mid,
                                fm <= 2.0 * fu + e_mid + 2.0 * e_up))
    return rows


@dataclass
class WalkMeanBound:
    alpha: float
    n: float
    c_d: float
    trials: int
    mean_time: float
    mean_steps: float
    conditional_mean: float
    bound: float
    slack: float
    mean_flight: float
    passed: bool
    ratio: float

    def as_dict(self):
        return asdict(self)


def walk_mean_bound_report(alpha, n, c_d=0.25, trials=DEFAULT_TRIALS, seed=0, *,
                           sigma=1.0, workers=None):
    """Compare the walk's mean exit time with ``2r + E[Z|Z<=2r] E[N]``.

    The slack is three standard errors of ``T_i - E[Z|Z<=2r] N_i`` so the
    sampling error of both means is accounted for.
    """
    law = StepLaw(alpha, n, sigma)
    r = c_d * math.sqrt(n)
    rec = fet_mc.simulate_batch(law, r, trials, seed, workers=workers)
    ok = rec.step_count >= 0
    if (~ok).sum() > fet_mc.ABANDON_LIMIT * trials:
        raise fet_mc.BatchValidationError("too many abandoned trials")
    t = rec.walk_time[ok]
    steps = rec.step_count[ok].astype(float)
    cm = law.conditional_mean_below(2.0 * r)
    diff = t - cm * steps
    slack = 3.0 * diff.std(ddof=1) / math.sqrt(diff.size)
    bound = 2.0 * r + cm * steps.mean()
    return WalkMeanBound(alpha, n, c_d, int(ok.sum()), float(t.mean()), float(steps.mean()),
                         cm, float(bound), float(slack), float(steps.mean()),
                         bool(diff.mean() <= 2.0 * r + slack), float(bound / t.mean()))
