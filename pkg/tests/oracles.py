"""Independent reference computations used by the tests.

None of these share code paths with the package under test.
"""
import math

import mpmath
import numpy as np
from scipy.linalg import solve_banded


def normalization_mp(alpha, n, sigma=1.0):
    mpmath.mp.dps = 40
    if alpha == 2:
        s = mpmath.sqrt(2) * sigma
        return float(1 / (mpmath.erf(mpmath.sqrt(n) / s) - mpmath.erf(1 / s)))
    return float(1 / (1 - mpmath.mpf(n) ** (-mpmath.mpf(alpha) / 2)))


def cstar_gamma(alpha):
    """(2/pi) * (sqrt(pi)/2) * Gamma((a+1)/2) / Gamma(a/2 + 1)."""
    return math.exp(math.lgamma((alpha + 1) / 2) - math.lgamma(alpha / 2 + 1)) / math.sqrt(math.pi)


def survival_images(tau, terms=60):
    """Brownian survival in (-1, 1) from 0 with unit diffusivity at time tau,
    by the method of images (alternating Gaussian images at 2k)."""
    s = math.sqrt(2.0 * tau)
    tot = 0.0
    for k in range(-terms, terms + 1):
        a = (1 - 2 * k) / s
        b = (-1 - 2 * k) / s
        tot += (-1) ** (k % 2) * 0.5 * (math.erf(a / math.sqrt(2)) - math.erf(b / math.sqrt(2)))
    return tot


def survival_series_mp(tau, terms=20001):
    """Sum of eta_i exp(-(i pi/2)^2 tau) at 40 digits."""
    mpmath.mp.dps = 40
    tot = mpmath.mpf(0)
    for i in range(1, terms + 1, 2):
        sign = 1 if i % 4 == 1 else -1
        tot += sign * 4 / (mpmath.pi * i) * mpmath.exp(-(i * mpmath.pi / 2) ** 2 * tau)
    return float(tot)


def crank_nicolson_survival(taus, nx=1601, dt=2e-5, rannacher=4):
    """Survival from the centre of (0, 2) with absorbing walls, unit diffusivity.

    Solves the backward equation u_t = u_xx with u(0, x) = 1 inside and u = 0
    at the walls; u(tau, 1) is the survival probability.  The first few steps
    are implicit Euler halves to damp the corner discontinuity.
    """
    taus = np.asarray(taus, dtype=float)
    h = 2.0 / (nx - 1)
    m = nx - 2
    u = np.ones(m)
    mid = m // 2
    out = np.empty(taus.size)
    order = np.argsort(taus)
    t = 0.0
    step = 0

    def banded(theta, dt_):
        lam = theta * dt_ / h**2
        ab = np.zeros((3, m))
        ab[0, 1:] = -lam
        ab[1, :] = 1 + 2 * lam
        ab[2, :-1] = -lam
        return ab

    def apply(theta, dt_, v):
        lam = (1 - theta) * dt_ / h**2
        w = (1 - 2 * lam) * v
        w[1:] += lam * v[:-1]
        w[:-1] += lam * v[1:]
        return w

    ab_cn = banded(0.5, dt)
    for idx in order:
        target = taus[idx]
        while t < target - 1e-15:
            d = min(dt, target - t)
            if step < 2 * rannacher:
                dd = min(d, dt / 2)
                u = solve_banded((1, 1), banded(1.0, dd), u)
                t += dd
            elif abs(d - dt) < 1e-15:
                u = solve_banded((1, 1), ab_cn, apply(0.5, dt, u))
                t += dt
            else:
                u = solve_banded((1, 1), banded(0.5, d), apply(0.5, d, u))
                t += d
            step += 1
        out[idx] = u[mid]
    return out


def walk_reference(law_sample, r, rng, cap=10**7):
    """Plain scalar Levy flight/walk to the first exit from radius r.

    Returns (flight_steps, walk_time, truncated_last).
    """
    x = y = 0.0
    elapsed = 0.0
    for k in range(1, cap + 1):
        z = float(law_sample(rng.random()))
        th = 2 * math.pi * rng.random()
        nx, ny = x + z * math.cos(th), y + z * math.sin(th)
        if nx * nx + ny * ny >= r * r:
            # bisection on the segment for the crossing distance
            lo, hi = 0.0, z
            for _ in range(200):
                m = 0.5 * (lo + hi)
                if (x + m * math.cos(th)) ** 2 + (y + m * math.sin(th)) ** 2 >= r * r:
                    hi = m
                else:
                    lo = m
            return k, elapsed + hi, hi
        x, y = nx, ny
        elapsed += z
    raise RuntimeError("cap")
