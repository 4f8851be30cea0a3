"""Truncated Levy step-size laws.

The step size ``Z`` lives on ``[1, sqrt(n)]``.  For ``alpha < 2`` its CCDF is
the truncated power law ``c(n) * (z**-alpha - n**(-alpha/2))``; for
``alpha == 2`` it is a truncated half-Gaussian with scale ``sigma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class StepLaw:
    """Step-size law parameterised by ``(alpha, n, sigma)``.

    ``sigma`` only matters when ``alpha == 2``.  Instances are immutable and
    hold no random state, so they can be shared between workers.
    """

    alpha: float
    n: float
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.n > 1.0:
            raise ValueError(f"n must exceed 1, got {self.n}")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def gaussian(self) -> bool:
        return self.alpha == 2.0

    @property
    def zmax(self) -> float:
        return math.sqrt(self.n)

    def normalization(self) -> float:
        """Return the constant ``c(n)`` that makes ``P{1 <= Z <= sqrt(n)} = 1``."""
        if self.gaussian:
            return 1.0 / self._gauss_mass(1.0, self.zmax)
        # 1 - n^(-a/2), written with expm1 so huge n stays accurate
        return -1.0 / math.expm1(-0.5 * self.alpha * math.log(self.n))

    def _gauss_mass(self, lo, hi):
        # erf(hi/s) - erf(lo/s) via erfc to avoid cancellation in the tail
        s = SQRT2 * self.sigma
        return special.erfc(np.divide(lo, s)) - special.erfc(np.divide(hi, s))

    def ccdf(self, z):
        """``P{Z > z}``; accepts scalars or arrays."""
        z = np.asarray(z, dtype=float)
        c = self.normalization()
        zc = np.clip(z, 1.0, self.zmax)
        if self.gaussian:
            inner = c * self._gauss_mass(zc, self.zmax)
        else:
            a = self.alpha
            inner = c * (zc ** -a - self.n ** (-0.5 * a))
        out = np.where(z < 1.0, 1.0, np.where(z >= self.zmax, 0.0, inner))
        return out[()] if out.ndim == 0 else out

    def cdf(self, z):
        return 1.0 - self.ccdf(z)

    def density(self, z):
        z = np.asarray(z, dtype=float)
        c = self.normalization()
        inside = (z >= 1.0) & (z < self.zmax)
        zc = np.clip(z, 1.0, self.zmax)
        if self.gaussian:
            s = self.sigma
            val = c * math.sqrt(2.0 / math.pi) / s * np.exp(-0.5 * (zc / s) ** 2)
        else:
            val = c * self.alpha * zc ** (-self.alpha - 1.0)
        out = np.where(inside, val, 0.0)
        return out[()] if out.ndim == 0 else out

    def sample(self, u):
        """Inverse-CDF map: return ``z`` with ``P{Z > z} = 1 - u``.

        ``u`` is uniform on (0, 1); the map is non-decreasing and lands in
        ``[1, sqrt(n)]``.
        """
        u = np.asarray(u, dtype=float)
        tail = 1.0 - u
        if self.gaussian:
            s = SQRT2 * self.sigma
            lo = special.erfc(1.0 / s)
            hi = special.erfc(self.zmax / s)
            z = s * special.erfcinv(hi + tail * (lo - hi))
        else:
            a = self.alpha
            z = (tail / self.normalization() + self.n ** (-0.5 * a)) ** (-1.0 / a)
        z = np.clip(z, 1.0, self.zmax)
        return z[()] if z.ndim == 0 else z

    def sample_bisect(self, u, tol=1e-12):
        """Scalar inverse CDF by bisection on the CCDF (slow reference path)."""
        target = 1.0 - float(u)
        lo, hi = 1.0, self.zmax
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if self.ccdf(mid) > target:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def conditional_mean_below(self, b: float) -> float:
        """Closed-form ``E[Z | Z <= b]`` for ``1 < b <= sqrt(n)``."""
        if not b > 1.0:
            raise ValueError(f"b must exceed 1, got {b}")
        if b > self.zmax * (1 + 1e-12):
            raise ValueError(f"b must not exceed sqrt(n) = {self.zmax}, got {b}")
        a = self.alpha
        if self.gaussian:
            s = self.sigma
            num = SQRT2 * s / math.sqrt(math.pi) * (
                math.exp(-0.5 / s**2) - math.exp(-0.5 * (b / s) ** 2))
            return num / float(self._gauss_mass(1.0, b))
        if a == 1.0:
            return math.log(b) / (1.0 - 1.0 / b)
        if a < 1.0:
            return a / (1.0 - a) * (b ** (1.0 - a) - 1.0) / (1.0 - b**-a)
        return a / (a - 1.0) * (1.0 - b ** (1.0 - a)) / (1.0 - b**-a)

    def second_moment(self) -> float:
        """``E[Z**2]``; finite for every alpha because the support is bounded."""
        if self.gaussian:
            # the integrand is negligible past ~40 sigma; split there so quad sees the bulk
            hi = min(self.zmax, 1.0 + 40.0 * self.sigma)
            val, _ = integrate.quad(lambda z: z * z * self.density(z), 1.0, hi,
                                    epsabs=1e-10, epsrel=1e-12, limit=200)
            return val
        a = self.alpha
        return self.normalization() * a * (self.n ** (1.0 - 0.5 * a) - 1.0) / (2.0 - a)

    def mean(self) -> float:
        return self.conditional_mean_below(self.zmax)
