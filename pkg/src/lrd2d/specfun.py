"""Special functions and binomial machinery.

Everything here is pure and reentrant.  All pmfs are computed in log space so
that walk counts up to k ~ 1e6 never overflow.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "log_gamma",
    "binom_log_pmf",
    "binom_pmf",
    "rw1d_pmf",
    "bessel_k0",
    "lower_incomplete_gamma",
]

_EULER_GAMMA = 0.57721566490153286060651209008240243


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if x <= 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _stirlerr(n: float) -> float:
    """log(n!) - [n log n - n + log(sqrt(2 pi n))]; series for n >= 16."""
    if n < 16:
        return math.lgamma(n + 1.0) - (
            n * math.log(n) - n + 0.5 * math.log(2.0 * math.pi * n)
        )
    nn = n * n
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * nn)) / nn) / nn) / n


def _bd0(x: float, m: float) -> float:
    """x log(x/m) + m - x, evaluated without cancellation for x near m."""
    if abs(x - m) < 0.1 * (x + m):
        v = (x - m) / (x + m)
        s = (x - m) * v
        ej = 2.0 * x * v
        v2 = v * v
        j = 1
        while True:
            ej *= v2
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
            j += 1
    return x * math.log(x / m) + m - x


def binom_log_pmf(t: int, k: int, p: float) -> float:
    """log b(t; k, p) = log[ C(k,t) p^t (1-p)^(k-t) ].

    Saddle-point form (Loader): keeps the relative error near 1e-13 up to
    k ~ 1e6, where differencing large log-gamma values would lose five digits.
    """
    if not 0 < p < 1:
        raise DomainError(f"success probability must lie in (0,1), got {p}")
    if t < 0 or k < 0:
        raise DomainError(f"need t >= 0 and k >= 0, got t={t}, k={k}")
    if t > k:
        raise DomainError(f"successes t={t} exceed trials k={k}")
    if k == 0:
        return 0.0
    if t == 0:
        return k * math.log1p(-p)
    if t == k:
        return k * math.log(p)
    lc = (
        _stirlerr(k)
        - _stirlerr(t)
        - _stirlerr(k - t)
        - _bd0(t, k * p)
        - _bd0(k - t, k * (1.0 - p))
    )
    return lc + 0.5 * math.log(k / (2.0 * math.pi * t * (k - t)))


def binom_pmf(t: int, k: int, p: float) -> float:
    """Binomial pmf b(t; k, p), evaluated as exp(log pmf).

    Positive for every valid (t, k) as long as the log pmf stays above the
    float64 underflow threshold (about -745); far tails below that underflow
    to 0 like any double-precision value would.
    """
    return math.exp(binom_log_pmf(t, k, p))


def rw1d_pmf(u: int, v: int) -> float:
    """u-step return probability p(u, v) of the symmetric +-1 walk on Z.

    p(u,v) = b((u+v)/2; u, 1/2) when |v| <= u and u+v is even, else 0.
    """
    if u < 0 or abs(v) > u or (u + v) % 2 != 0:
        return 0.0
    return binom_pmf((u + v) // 2, u, 0.5)


# ---------------------------------------------------------------------------
# Modified Bessel function K0
# ---------------------------------------------------------------------------

_K0_SWITCH = 2.0  # series below, asymptotic integral above; branches agree on [1.5, 2.5]

# generalized Gauss-Laguerre rule for weight u^{-1/2} e^{-u}, built once
_GLAG_NODES: np.ndarray | None = None
_GLAG_WEIGHTS: np.ndarray | None = None


def _glag_rule() -> tuple[np.ndarray, np.ndarray]:
    global _GLAG_NODES, _GLAG_WEIGHTS
    if _GLAG_NODES is None:
        from scipy.special import roots_genlaguerre

        _GLAG_NODES, _GLAG_WEIGHTS = roots_genlaguerre(80, -0.5)
    return _GLAG_NODES, _GLAG_WEIGHTS


def _k0_series(x: float) -> float:
    # ascending series: K0 = -(log(x/2) + gamma) I0(x) + sum_{j>=1} (x^2/4)^j / (j!)^2 H_j
    q = 0.25 * x * x
    i0 = 1.0
    term = 1.0
    corr = 0.0
    harmonic = 0.0
    for j in range(1, 60):
        term *= q / (j * j)
        harmonic += 1.0 / j
        i0 += term
        corr += term * harmonic
        if term < 1e-18 * i0:
            break
    return -(math.log(0.5 * x) + _EULER_GAMMA) * i0 + corr


def _k0_asymptotic(x: float) -> float:
    # K0(x) = sqrt(pi/2x) e^{-x} / Gamma(1/2) * int_0^inf e^{-u} u^{-1/2} (1+u/2x)^{-1/2} du,
    # the integral evaluated exactly by generalized Gauss-Laguerre; expanding the
    # (1+u/2x)^{-1/2} factor reproduces the classical asymptotic expansion.
    nodes, weights = _glag_rule()
    integral = float(np.sum(weights / np.sqrt(1.0 + nodes / (2.0 * x))))
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * integral / math.sqrt(math.pi)


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind K0(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"bessel_k0 requires x > 0, got {x}")
    if x <= _K0_SWITCH:
        return _k0_series(x)
    return _k0_asymptotic(x)


# ---------------------------------------------------------------------------
# Lower incomplete gamma
# ---------------------------------------------------------------------------


def _gamma_series(a: float, x: float) -> float:
    # gamma(a,x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n)); converges for x < a+1
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(500):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return math.exp(a * math.log(x) - x) * total


def _upper_gamma_cf(a: float, x: float) -> float:
    # Gamma(a,x) via Lentz continued fraction; stable for x >= a+1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(a * math.log(x) - x) * h


def lower_incomplete_gamma(a: float, x: float) -> float:
    """gamma(a, x) = int_0^x y^(a-1) e^(-y) dy, for a > 0 and x >= 0.

    Series for x < a+1, continued fraction for the complement otherwise
    (the classical stable split).
    """
    if a <= 0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a}")
    if x < 0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return math.exp(log_gamma(a)) - _upper_gamma_cf(a, x)
