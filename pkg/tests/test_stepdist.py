import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from levyexit.stepdist import StepLaw

import oracles

ALPHAS = [0.3, 0.6, 1.0, 1.5, 1.9, 2.0]
NS = [16.0, 1e4, 2.0**20]


def test_normalization_alpha_one():
    assert StepLaw(1.0, 1e4).normalization() == pytest.approx(100 / 99, rel=1e-14)


def test_normalization_limit():
    assert StepLaw(0.5, 1e300).normalization() == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("alpha,n", [(2.0, 1e4), (2.0, 64.0), (1.3, 1e4), (0.2, 50.0)])
def test_normalization_matches_high_precision(alpha, n):
    assert StepLaw(alpha, n).normalization() == pytest.approx(
        oracles.normalization_mp(alpha, n), rel=1e-12)


def test_normalization_gaussian_value():
    # 1 / (1 - P{|N(0,1)| <= 1})
    assert StepLaw(2.0, 1e4).normalization() == pytest.approx(1 / (1 - 0.6826894921370859),
                                                              rel=1e-12)


def test_ccdf_examples():
    law = StepLaw(1.0, 1e4)
    assert law.ccdf(1.0) == 1.0
    assert law.ccdf(10.0) == pytest.approx((100 / 99) * (0.1 - 0.01), rel=1e-14)
    assert law.ccdf(100.0) == 0.0
    assert law.ccdf(0.3) == 1.0


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("n", NS)
def test_ccdf_support_and_monotone(alpha, n):
    law = StepLaw(alpha, n)
    assert law.ccdf(1.0) == pytest.approx(1.0, abs=1e-13)
    assert law.ccdf(law.zmax) == 0.0
    z = np.linspace(1.0, law.zmax, 1000)
    assert np.all(np.diff(law.ccdf(z)) <= 1e-15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_density_integrates_to_one(alpha):
    law = StepLaw(alpha, 1e4)
    hi = law.zmax if alpha < 2 else min(law.zmax, 41.0)
    val, _ = integrate.quad(law.density, 1.0, hi, epsabs=1e-10, limit=400)
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.7, 2.0])
def test_density_is_ccdf_derivative(alpha):
    law = StepLaw(alpha, 1e4)
    z = np.array([1.3, 2.0, 5.0, 40.0])
    h = 1e-6 * z
    fd = -(law.ccdf(z + h) - law.ccdf(z - h)) / (2 * h)
    np.testing.assert_allclose(law.density(z), fd, rtol=1e-6, atol=1e-12)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        StepLaw(2.5, 100)
    with pytest.raises(ValueError):
        StepLaw(0.0, 100)
    with pytest.raises(ValueError):
        StepLaw(1.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(alpha=st.floats(0.05, 1.99), logn=st.floats(1.0, 40.0), u=st.floats(1e-9, 1 - 1e-9))
def test_inverse_cdf_round_trip(alpha, logn, u):
    law = StepLaw(alpha, math.exp(logn))
    z = law.sample(u)
    assert 1.0 <= z <= law.zmax
    assert law.ccdf(z) == pytest.approx(1 - u, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(u1=st.floats(0, 1), u2=st.floats(0, 1), alpha=st.sampled_from(ALPHAS))
def test_sample_monotone(u1, u2, alpha):
    law = StepLaw(alpha, 1e4)
    lo, hi = sorted((u1, u2))
    assert law.sample(lo) <= law.sample(hi)


@pytest.mark.parametrize("u", [0.01, 0.3, 0.5, 0.9, 0.999])
def test_gaussian_sampler_matches_bisection(u):
    law = StepLaw(2.0, 1e4, sigma=1.3)
    assert law.sample(u) == pytest.approx(law.sample_bisect(u), abs=1e-9)


def test_median_limit_law():
    # limit CCDF 1/z: median 2
    assert StepLaw(1.0, 1e200).sample(0.5) == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5, 2.0])
def test_sample_ks(alpha):
    law = StepLaw(alpha, 2.0**14)
    z = law.sample(np.random.default_rng(11).random(10**6))
    d = stats.kstest(z, law.cdf).statistic
    assert d < 0.005


def test_conditional_mean_alpha_one():
    assert StepLaw(1.0, 1e4).conditional_mean_below(100.0) == pytest.approx(
        math.log(100) / 0.99, rel=1e-14)
    assert StepLaw(1.0, 1e4).conditional_mean_below(100.0) == pytest.approx(4.65169, abs=1e-5)


def test_conditional_mean_limit():
    law = StepLaw(1.5, 1e200)
    assert law.conditional_mean_below(1e100) == pytest.approx(3.0, rel=1e-12)


def test_conditional_mean_rejects_small_bound():
    with pytest.raises(ValueError):
        StepLaw(1.0, 1e4).conditional_mean_below(1.0)


@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.5, 2.0])
def test_conditional_mean_quadrature(alpha):
    law = StepLaw(alpha, 1e4)
    b = 50.0
    num, _ = integrate.quad(lambda z: z * law.density(z), 1, b, epsabs=1e-12, limit=200)
    den, _ = integrate.quad(law.density, 1, b, epsabs=1e-12, limit=200)
    assert law.conditional_mean_below(b) == pytest.approx(num / den, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.4, 1.0, 1.5, 2.0])
def test_conditional_mean_monte_carlo(alpha):
    law = StepLaw(alpha, 2.0**14)
    b = 64.0
    z = law.sample(np.random.default_rng(5).random(10**6))
    below = z[z <= b]
    assert below.mean() == pytest.approx(law.conditional_mean_below(b), rel=0.01)


def test_second_moment_closed_form():
    assert StepLaw(1.0, 1e4).second_moment() == pytest.approx(100.0, rel=1e-13)


def test_second_moment_gaussian_closed_form():
    # E[Z^2 | 1 <= |G| <= b] for G ~ N(0, s^2): s^2 + s^2 (1*phi(1/s) - b*phi(b/s)) / mass
    s, n = 1.7, 400.0
    law = StepLaw(2.0, n, s)
    b = math.sqrt(n)
    phi = lambda x: math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    mass = math.erf(b / (s * math.sqrt(2))) - math.erf(1 / (s * math.sqrt(2)))
    ref = s * s + 2 * s * (phi(1 / s) - b * phi(b / s)) / mass
    assert law.second_moment() == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("alpha", [0.6, 1.5])
def test_second_moment_increasing(alpha):
    vals = [StepLaw(alpha, 2.0**k).second_moment() for k in range(4, 30)]
    assert np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("alpha,rel", [(1.0, 0.02), (1.5, 0.02), (2.0, 0.02), (0.6, 0.1)])
def test_second_moment_monte_carlo(alpha, rel):
    law = StepLaw(alpha, 2.0**12)
    z = law.sample(np.random.default_rng(8).random(10**6))
    assert np.mean(z**2) == pytest.approx(law.second_moment(), rel=rel)


@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5])
def test_second_moment_order(alpha):
    n = np.array([2.0**k for k in range(10, 21)])
    m = [StepLaw(alpha, v).second_moment() for v in n]
    slope = np.polyfit(np.log(n), np.log(m), 1)[0]
    assert abs(slope - (1 - alpha / 2)) <= 0.05
