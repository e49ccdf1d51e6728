"""Special-function tests against independent oracles: mpmath for gamma-family
values, direct quadrature for K0, enumeration / factorial arithmetic for the
walk pmfs."""

import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from lrd2d import specfun
from lrd2d.errors import DomainError

mpmath.mp.dps = 40


def test_log_gamma_values():
    assert specfun.log_gamma(1.0) == 0.0
    assert specfun.log_gamma(2.0) == 0.0
    assert abs(specfun.log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-14


def test_log_gamma_against_mpmath():
    # abs <= 1e-12 where the output magnitude allows it; rel <= 5e-15 up to 1e6
    for x in [0.5, 0.75, 1.0, 1.5, 2.34, 7.0, 21.5, 100.0, 300.0]:
        ref = float(mpmath.loggamma(x))
        assert abs(specfun.log_gamma(x) - ref) <= 1e-12
    for x in [1e3, 3.7e4, 5e5, 1e6]:
        ref = float(mpmath.loggamma(x))
        assert abs(specfun.log_gamma(x) - ref) <= 5e-15 * abs(ref)


def test_log_gamma_domain():
    with pytest.raises(DomainError):
        specfun.log_gamma(0.0)
    with pytest.raises(DomainError):
        specfun.log_gamma(-1.3)


def test_binom_pmf_examples():
    assert specfun.binom_pmf(0, 0, 0.3) == 1.0
    assert abs(specfun.binom_pmf(1, 2, 0.5) - 0.5) < 1e-15
    # direct factorial evaluation: C(10,3) (1/3)^3 (2/3)^7
    direct = 120 * (1 / 3) ** 3 * (2 / 3) ** 7
    assert abs(specfun.binom_pmf(3, 10, 1 / 3) - direct) < 1e-12 * direct


def test_binom_pmf_against_mpmath_large_k():
    for k, t, p in [(10**4, 3400, 1 / 3), (10**5, 50000, 0.5), (10**6, 333000, 1 / 3)]:
        ref = float(
            mpmath.exp(
                mpmath.loggamma(k + 1)
                - mpmath.loggamma(t + 1)
                - mpmath.loggamma(k - t + 1)
                + t * mpmath.log(p)
                + (k - t) * mpmath.log(1 - p)
            )
        )
        val = specfun.binom_pmf(t, k, p)
        assert val > 0.0
        assert abs(val - ref) <= 1e-10 * ref


def test_binom_pmf_domain():
    with pytest.raises(DomainError):
        specfun.binom_pmf(3, 2, 0.5)
    with pytest.raises(DomainError):
        specfun.binom_pmf(0, 2, 0.0)


def test_binom_pmf_sums_to_one():
    for p in (0.25, 1 / 3, 0.5):
        for k in (1, 17, 60, 200):
            total = sum(specfun.binom_pmf(t, k, p) for t in range(k + 1))
            assert abs(total - 1.0) < 1e-12


def test_rw1d_pmf():
    assert specfun.rw1d_pmf(0, 0) == 1.0
    assert specfun.rw1d_pmf(1, 0) == 0.0  # parity
    # enumerate the four two-step paths: ++, +-, -+, --; two return to 0
    assert abs(specfun.rw1d_pmf(2, 0) - 0.5) < 1e-15
    assert specfun.rw1d_pmf(2, 4) == 0.0
    assert specfun.rw1d_pmf(-1, 0) == 0.0


def test_de_moivre_laplace_bound():
    # |b(t;k,1/2)/gaussian - 1| <= C/K over the window K|t-pk|^3 < k^2, K = 50
    K = 50
    worst = 0.0
    for k in range(K, 10 * K + 1, 7):
        mu = 0.5 * k
        sd2 = 0.25 * k
        for t in range(k + 1):
            if K * abs(t - mu) ** 3 >= k * k:
                continue
            gauss = math.exp(-((t - mu) ** 2) / (2 * sd2)) / math.sqrt(2 * math.pi * sd2)
            ratio = specfun.binom_pmf(t, k, 0.5) / gauss
            worst = max(worst, abs(ratio - 1.0))
    assert worst <= 10.0 / K, f"recorded C = {worst * K:.3f} exceeds 10"


def test_hoeffding_tail():
    for k in (10, 100, 500):
        for tau in (0.5, 1.0, 2.0, 3.0):
            cut = tau * math.sqrt(k)
            tail = sum(
                specfun.binom_pmf(t, k, 0.5)
                for t in range(k + 1)
                if abs(t - 0.5 * k) > cut
            )
            assert tail <= 2.0 * math.exp(-2.0 * tau * tau) + 1e-15


def test_rw1d_gaussian_dominating_bound():
    # p(u,v) <= 2 exp(-v^2 / 2u) for all 0 <= u <= 300
    for u in range(0, 301, 13):
        for v in range(-u, u + 1):
            p = specfun.rw1d_pmf(u, v)
            if u == 0:
                bound = 2.0
            else:
                bound = 2.0 * math.exp(-v * v / (2.0 * u))
            assert p <= bound + 1e-15


# ---------------------------------------------------------------------------
# K0
# ---------------------------------------------------------------------------


def _k0_quadrature(x):
    # independent oracle: K0(x) = int_0^inf exp(-x cosh t) dt; epsabs = 0 so
    # the tolerance stays relative even when the value is ~ e^-x
    hi = math.acosh(1.0 + 745.0 / x)  # integrand underflows beyond this
    val, _ = integrate.quad(
        lambda t: math.exp(-x * math.cosh(t)), 0.0, hi, limit=800, epsabs=0.0, epsrel=1e-13
    )
    return val


def test_k0_against_quadrature_oracle():
    for x in (0.05, 0.3, 1.0, 2.0, 2.5, 5.0, 20.0):
        ref = _k0_quadrature(x)
        assert abs(specfun.bessel_k0(x) - ref) <= 1e-10 * ref


def test_k0_examples():
    assert abs(specfun.bessel_k0(1.0) - 0.42102443824070834) < 1e-10
    assert abs(specfun.bessel_k0(2.0) - 0.11389387274953343) < 1e-10


def test_k0_against_mpmath_wide_range():
    for x in (1e-6, 1e-3, 0.1, 1.0, 1.999, 2.001, 10.0, 100.0, 700.0):
        ref = float(mpmath.besselk(0, x))
        assert abs(specfun.bessel_k0(x) - ref) <= 1e-10 * ref, x


def test_k0_branch_crossover():
    # both branches stay accurate across the documented switchover [1.5, 2.5]
    from lrd2d.specfun import _k0_asymptotic, _k0_series

    for x in np.linspace(1.5, 2.5, 11):
        ref = float(mpmath.besselk(0, float(x)))
        assert abs(_k0_series(float(x)) - ref) <= 1e-11 * ref
        assert abs(_k0_asymptotic(float(x)) - ref) <= 1e-11 * ref


def test_k0_leading_asymptotic():
    x = 500.0
    val = specfun.bessel_k0(x) * math.sqrt(2.0 * x / math.pi) * math.exp(x)
    assert abs(val - 1.0) < 1e-3


def test_k0_domain():
    with pytest.raises(DomainError):
        specfun.bessel_k0(0.0)
    with pytest.raises(DomainError):
        specfun.bessel_k0(-2.0)


# ---------------------------------------------------------------------------
# Lower incomplete gamma
# ---------------------------------------------------------------------------


def test_incgamma_closed_form_a1():
    for x in (0.1, 1.0, 5.0):
        assert abs(specfun.lower_incomplete_gamma(1.0, x) - (1.0 - math.exp(-x))) < 1e-13


def test_incgamma_zero_and_cap():
    assert specfun.lower_incomplete_gamma(0.7, 0.0) == 0.0
    a = 2.3
    assert abs(
        specfun.lower_incomplete_gamma(a, 1e3) - math.gamma(a)
    ) < 1e-12 * math.gamma(a)


def test_incgamma_against_quadrature():
    for a, x in [(0.8, 0.25), (0.5, 2.0), (3.2, 1.7), (1.4, 10.0)]:
        ref, _ = integrate.quad(lambda y: y ** (a - 1) * math.exp(-y), 0.0, x, limit=400)
        assert abs(specfun.lower_incomplete_gamma(a, x) - ref) <= 1e-9 * max(ref, 1e-300)


def test_incgamma_against_mpmath():
    for a in (0.3, 0.8, 1.0, 2.5, 7.7):
        for x in (0.01, 0.5, a, a + 5.0, 60.0):
            ref = float(mpmath.gammainc(a, 0, x))
            assert abs(specfun.lower_incomplete_gamma(a, x) - ref) <= 1e-9 * ref


def test_incgamma_domain():
    with pytest.raises(DomainError):
        specfun.lower_incomplete_gamma(0.0, 1.0)
    with pytest.raises(DomainError):
        specfun.lower_incomplete_gamma(1.0, -0.5)
