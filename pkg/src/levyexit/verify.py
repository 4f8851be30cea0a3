"""Invariant suite behind ``levyexit verify``.

Sizes are chosen so the whole suite runs in well under a minute on one core.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds, fet_analytic, fet_mc, projection, scaling
from .parallel import block_rng
from .stepdist import StepLaw


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


class _MisnormalizedLaw(StepLaw):
    """Step law with ``c(n)`` inflated by 10%; used to prove the suite bites."""

    def normalization(self):
        return 1.1 * StepLaw.normalization(self)


FAULTS = {"normalization": _MisnormalizedLaw}


def run_suite(seed=0, trials=20_000, workers=None, fault=None):
    make = FAULTS[fault] if fault else StepLaw
    checks = []
    n = 2**14
    c_d = 0.25
    r = c_d * math.sqrt(n)

    # step law support and sampler
    for a in (0.6, 1.0, 1.5, 2.0):
        law = make(a, n)
        z = np.linspace(1.0, law.zmax, 1000)
        cc = law.ccdf(z)
        ok = abs(float(law.ccdf(1.0)) - 1.0) < 1e-12 and float(law.ccdf(law.zmax)) == 0.0 \
            and bool(np.all(np.diff(cc) <= 1e-15))
        u = block_rng(seed, 90, int(a * 10)).random(100_000)
        s = np.sort(law.sample(u))
        ref = StepLaw(a, n).cdf(s)
        m = s.size
        ks = float(max(np.max(np.arange(1, m + 1) / m - ref), np.max(ref - np.arange(m) / m)))
        checks.append(Check(f"step law alpha={a}", ok and ks < 0.01,
                            f"ccdf(1)={float(law.ccdf(1.0)):.6g}, KS={ks:.4g}"))

    # coupling identities and walk floor
    law = make(1.5, n)
    rec = fet_mc.simulate_batch(law, r, trials, seed, stream=(91,), axis_radius=r, workers=workers)
    ok = rec.step_count >= 0
    n_walk = rec.step_count[ok]
    t_walk = rec.walk_time[ok]
    t_flight = n_walk.astype(float)
    same = bool(np.all(n_walk == t_flight))
    shift = bool(np.all(t_walk >= t_flight - 1))
    floor = bool(np.all(t_walk >= r))
    ordered = bool(np.all(rec.axis_steps[ok] >= n_walk))
    checks.append(Check("coupling N == T_flight", same, f"{ok.sum()} trials"))
    checks.append(Check("coupling T_walk >= T_flight - 1", shift,
                        f"min gap {float(np.min(t_walk - t_flight + 1)):.4g}"))
    checks.append(Check("walk floor T >= r", floor, f"min T = {float(t_walk.min()):.6g}, r = {r:g}"))
    checks.append(Check("axis exit after disc exit", ordered, "T_x(r) >= T(r) pathwise"))

    # sandwich
    rows = scaling.sandwich_report(1.5, n, c_d, trials, seed=seed + 1, workers=workers)
    checks.append(Check("sandwich alpha=1.5", all(x.lower_ok and x.upper_ok for x in rows),
                        f"{len(rows)} deciles"))

    # walk mean bound
    wb = scaling.walk_mean_bound_report(1.5, n, c_d, trials, seed=seed + 2, workers=workers)
    checks.append(Check("walk mean bound alpha=1.5", wb.passed,
                        f"mean T={wb.mean_time:.5g} <= bound {wb.bound:.5g} (+{wb.slack:.3g})"))

    # exit-time Hoeffding bound at alpha=1
    law = make(1.0, n)
    s2 = projection.projected_second_moment(StepLaw(1.0, n))
    fet = fet_mc.run_projected_batch(1.0, n, r / math.sqrt(2), trials, seed, stream=(92,),
                                     workers=workers)
    worst = -math.inf
    for k in range(1, 65):
        p = float(fet.cdf_at(k))
        sd = math.sqrt(max(p * (1 - p), 1e-12) / fet.size)
        worst = max(worst, p - bounds.exit_time_tail_bound(r, k, s2) - 3 * sd)
    checks.append(Check("exit-time bound alpha=1", worst <= 0, f"max excess {worst:.3g}"))

    # projection KS
    a = 1.5
    law = make(a, 2**16)
    zc = projection.sample_projected(law, 200_000, block_rng(seed, 93))
    ks = projection.ks_distance(projection.ProjectedLaw(a, 2**16), zc)
    checks.append(Check("projection KS alpha=1.5", ks <= 0.01, f"KS={ks:.4g}"))

    # series
    part = fet_analytic.eta_partial_sum(10**6)
    series = fet_analytic.SurvivalSeries(2.0, 1.0)
    checks.append(Check("eta partial sum", abs(part - 1.0) <= 1.3e-6, f"|sum-1|={abs(part-1):.3g}"))
    checks.append(Check("fet_cdf(0) == 0", float(series.fet_cdf(0.0)) == 0.0, "t=0"))
    return checks
