"""Projected step ``Z |cos(theta)|`` of the 2-D flight onto one axis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .stepdist import StepLaw

QUAD_TOL = 1e-10


def cos_power_integral(phi, alpha):
    """``int_0^phi cos(v)**alpha dv`` for ``phi`` in ``[0, pi/2]``.

    Uses the incomplete beta identity so it vectorises over ``phi``.
    """
    phi = np.asarray(phi, dtype=float)
    b = 0.5 * (alpha + 1.0)
    full = 0.5 * special.beta(0.5, b)
    out = full * special.betainc(0.5, b, np.sin(phi) ** 2)
    return out[()] if out.ndim == 0 else out


def cstar(alpha):
    """Angular constant ``(2/pi) int_0^{pi/2} cos(v)**alpha dv`` by adaptive quadrature."""
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    val, _ = integrate.quad(lambda v: math.cos(v) ** alpha, 0.0, math.pi / 2,
                            epsabs=QUAD_TOL, epsrel=1e-13)
    return 2.0 / math.pi * val


@dataclass(frozen=True)
class ProjectedLaw:
    alpha: float
    n: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")

    @property
    def step_law(self):
        return StepLaw(self.alpha, self.n)

    @property
    def zmax(self):
        return math.sqrt(self.n)

    def _ccdf(self, z):
        # closed form without domain checks; smooth in z around the support
        a = self.alpha
        c = self.step_law.normalization()
        phi = np.arccos(np.clip(z / self.zmax, -1.0, 1.0))
        return 2.0 * c / math.pi * (cos_power_integral(phi, a) / z**a - phi / self.n ** (0.5 * a))

    def ccdf(self, z):
        """``P{Z |cos theta| > z}`` for ``1 <= z <= sqrt(n)``."""
        z = np.asarray(z, dtype=float)
        if np.any(z < 1.0) or np.any(z > self.zmax * (1 + 1e-12)):
            raise ValueError("projected CCDF is only available on [1, sqrt(n)]")
        out = np.clip(self._ccdf(np.minimum(z, self.zmax)), 0.0, 1.0)
        return out[()] if out.ndim == 0 else out

    def limit_ccdf(self, z):
        """Large-n limit ``cstar / z**alpha``."""
        return cstar(self.alpha) / np.asarray(z, dtype=float) ** self.alpha

    def density(self, z):
        """Exact density ``2 a c / (pi z^(a+1)) int_0^{acos(z/sqrt n)} cos^a``."""
        z = np.asarray(z, dtype=float)
        a = self.alpha
        c = self.step_law.normalization()
        phi = np.arccos(np.clip(z / self.zmax, -1.0, 1.0))
        return 2.0 * a * c / (math.pi * z ** (a + 1.0)) * cos_power_integral(phi, a)

    def density_bound(self, z):
        a = self.alpha
        return a * cstar(a) * self.step_law.normalization() / np.asarray(z, dtype=float) ** (a + 1.0)


def projected_ccdf(p: ProjectedLaw, z):
    return p.ccdf(z)


def projected_ccdf_any(law: StepLaw, z):
    """``P{Z |cos theta| > z}`` for any ``z >= 0`` and any alpha, by quadrature
    of the step CCDF over the angle."""
    def one(zz):
        if zz <= 0.0:
            return 1.0
        f = lambda v: float(law.ccdf(zz / math.cos(v))) if math.cos(v) > 0 else 0.0
        # the integrand has a kink where zz / cos(v) crosses 1 and sqrt(n)
        pts = [math.acos(min(1.0, zz / b)) for b in (1.0, law.zmax) if zz < b]
        val, _ = integrate.quad(f, 0.0, math.pi / 2, points=pts or None,
                                epsabs=QUAD_TOL, limit=200)
        return 2.0 / math.pi * val

    z = np.asarray(z, dtype=float)
    out = np.vectorize(one, otypes=[float])(z)
    return out[()] if out.ndim == 0 else out


def projected_second_moment(law: StepLaw, method="closed"):
    """``E[(Z cos theta)^2]``.

    ``closed`` uses independence (``E[cos^2] = 1/2``); ``quadrature`` integrates
    ``2 z P{Z|cos theta| > z}`` over ``[0, sqrt(n)]`` as a cross-check.
    """
    if method == "closed":
        return law.second_moment() / 2.0
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    g = lambda z: 2.0 * z * float(projected_ccdf_any(law, z))
    pts = [1.0] if law.zmax > 1.0 else None
    val, _ = integrate.quad(g, 0.0, law.zmax, points=pts, epsabs=1e-8, epsrel=1e-8, limit=400)
    return val


@dataclass
class TailBoundReport:
    z: np.ndarray
    density: np.ndarray
    bound: np.ndarray
    ok: np.ndarray

    @property
    def passed(self) -> bool:
        return bool(self.ok.all())


def density_tail_bound_check(p: ProjectedLaw, grid, rel_step=1e-4, slack=1e-6):
    """Check ``-dCCDF/dz <= alpha cstar c(n) / z^(alpha+1)`` on ``grid``.

    The derivative is a central difference of the closed-form CCDF.
    """
    z = np.asarray(grid, dtype=float)
    if np.any(z < 1.0) or np.any(z >= p.zmax):
        raise ValueError("grid must lie in [1, sqrt(n))")
    h = rel_step * z
    dens = -(p._ccdf(np.minimum(z + h, p.zmax)) - p._ccdf(z - h)) / (np.minimum(z + h, p.zmax) - z + h)
    bound = p.density_bound(z)
    return TailBoundReport(z, dens, bound, dens <= bound + slack)


def projection_table(p: ProjectedLaw, z_grid, samples=None):
    """Rows ``(z, ccdf_exact, ccdf_limit, ccdf_empirical)``."""
    z_grid = np.asarray(z_grid, dtype=float)
    exact = p.ccdf(z_grid)
    limit = p.limit_ccdf(z_grid)
    if samples is None:
        emp = np.full(z_grid.shape, np.nan)
    else:
        s = np.sort(np.asarray(samples, dtype=float))
        emp = 1.0 - np.searchsorted(s, z_grid, side="right") / s.size
    return [tuple(float(v) for v in row) for row in zip(z_grid, exact, limit, emp)]


def sample_projected(law: StepLaw, size, rng, axis="x"):
    """Draw ``Z |cos theta|`` (or ``|sin theta|``) pairs."""
    z = law.sample(rng.random(size))
    theta = 2.0 * math.pi * rng.random(size)
    trig = np.cos(theta) if axis == "x" else np.sin(theta)
    return z * np.abs(trig)


def ks_distance(p: ProjectedLaw, samples):
    """Sup distance between the empirical CCDF of ``samples`` and ``p.ccdf``
    over ``z >= 1`` (both sides of every jump)."""
    s = np.sort(np.asarray(samples, dtype=float))
    m = s.size
    lo = np.searchsorted(s, 1.0, side="left")
    pts = s[lo:]
    pts = pts[pts <= p.zmax]
    model = p.ccdf(pts)
    # empirical CCDF just before and at each sample point
    before = 1.0 - np.searchsorted(s, pts, side="left") / m
    after = 1.0 - np.searchsorted(s, pts, side="right") / m
    d = max(np.max(np.abs(before - model), initial=0.0), np.max(np.abs(after - model), initial=0.0))
    edge = abs((1.0 - lo / m) - float(p.ccdf(1.0)))
    return float(max(d, edge))
