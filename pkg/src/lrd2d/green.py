"""Lattice Green functions of the two nearest-neighbor walks, their
near-unit-root scaling limits, and the limit kernels.

The walk with steps (1,0), (0,1), (0,-1) (each 1/3) has k-step law
p_k(t,s) = b(t; k, 1/3) p(k-t, s): the first coordinate counts successes of a
binomial, and conditionally the second is a k-t step symmetric walk.  The
four-neighbor walk factorizes on the rotated lattice: p_k(t,s) =
p(k, t+s) p(k, t-s).

g(t,s,a) = sum_k a^k p_k(t,s) is evaluated by three routes:

* ``green_series`` - the defining series with a multiplicative term
  recurrence (vectorized, certified geometric tail bound);
* ``green_fft`` - inverse DFT of 1/(1 - a p^(x,y)) on an aliasing-controlled
  grid, for whole windows of (t,s) at once;
* a 1D Fourier reduction used by ``green_point`` when the series would need
  more than the term ceiling: integrating out one lattice direction in closed
  form leaves a single well-localized integral, which stays cheap arbitrarily
  close to the unit root.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from . import specfun
from .errors import DomainError, ResourceError


def _quiet_quad(f, a, b, **kw):
    # aggressive epsrel targets trip QUADPACK's roundoff warning on narrow
    # near-unit-root peaks; the returned estimate is still what we want
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **kw)

__all__ = [
    "Walk",
    "GreenKernel",
    "GreenValue",
    "GreenGrid",
    "pk",
    "green_series",
    "green_point",
    "green_fft",
    "h3",
    "h4",
    "h3_bound",
    "scaling_limit_probe",
    "ProbeRow",
]

SERIES_TERM_CEILING = 10_000_000
FFT_SIZE_CEILING = 8192


class Walk(enum.Enum):
    """Nearest-neighbor walk variant."""

    THREE_N = "3n"
    FOUR_N = "4n"

    @property
    def steps(self) -> tuple[tuple[int, int, float], ...]:
        if self is Walk.THREE_N:
            return ((1, 0, 1 / 3), (0, 1, 1 / 3), (0, -1, 1 / 3))
        return ((1, 0, 0.25), (-1, 0, 0.25), (0, 1, 0.25), (0, -1, 0.25))

    @property
    def q(self) -> float:
        """min(q1, q2) with q1 = p(0,1)+p(0,-1), q2 = p(1,0)+p(-1,0)."""
        q1 = sum(p for t, s, p in self.steps if t == 0)
        q2 = 1.0 - q1
        return min(q1, q2)

    def phat(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Transfer function sum exp(-i(tx+sy)) p(t,s); complex for 3N."""
        if self is Walk.THREE_N:
            return (np.exp(-1j * np.asarray(x)) + 2.0 * np.cos(y)) / 3.0
        return (np.cos(x) + np.cos(y)) / 2.0

    @property
    def gamma0(self) -> float:
        return 0.5 if self is Walk.THREE_N else 1.0


class Backend(enum.Enum):
    SERIES = "series"
    FFT_INVERSION = "fft"


@dataclass(frozen=True)
class GreenKernel:
    """Green function of `model` at autoregressive coefficient `a`."""

    model: Walk
    a: float
    truncation_tol: float = 1e-9
    backend: Backend = Backend.SERIES

    def __post_init__(self) -> None:
        if not 0.0 <= self.a < 1.0:
            raise DomainError(f"need 0 <= a < 1, got a={self.a}")
        if not 0.0 < self.truncation_tol <= 1e-3:
            raise DomainError(
                f"truncation_tol must lie in (0, 1e-3], got {self.truncation_tol}"
            )


class GreenValue(NamedTuple):
    value: float
    tail_bound: float


def pk(model: Walk, k: int, t: int, s: int) -> float:
    """k-step location probability p_k(t,s); 0 off the support."""
    if k < 0:
        return 0.0
    if model is Walk.THREE_N:
        if t < 0 or t > k:
            return 0.0
        u = k - t
        if u < abs(s) or (u + s) % 2 != 0:
            return 0.0
        return specfun.binom_pmf(t, k, 1 / 3) * specfun.rw1d_pmf(u, s)
    return specfun.rw1d_pmf(k, t + s) * specfun.rw1d_pmf(k, t - s)


def series_term_count(a: float, tol: float) -> int:
    """Smallest K with geometric tail a^(K+1)/(1-a) <= tol."""
    if a == 0.0:
        return 0
    return max(0, math.ceil(math.log(tol * (1.0 - a)) / math.log(a)))


def _series_3n(t: int, s: int, a: float, kmax: int) -> float:
    # terms run over k = k0, k0+2, ... with k0 = t + |s|; ratio recurrence:
    # term(k+2)/term(k) = a^2 (k+1)(k+2)/((k+1-t)(k+2-t)) * (4/9)
    #                     * (1/4)(u+1)(u+2)/((m1+1)(m2+1)),  u = k-t
    if a == 0.0:
        return 1.0 if (t, s) == (0, 0) else 0.0
    k0 = t + abs(s)
    if k0 > kmax:
        return 0.0
    log_carry = (
        k0 * math.log(a)
        + specfun.binom_log_pmf(t, k0, 1 / 3)
        + specfun.binom_log_pmf((k0 - t + s) // 2, k0 - t, 0.5)
    )
    # term-ratio recurrence accumulated in log space: the early terms are far
    # below the peak near k ~ 3t and a bare cumprod overflows on the way up
    total = 0.0
    chunk = 1 << 20
    k_start = k0
    while k_start <= kmax:
        k = np.arange(k_start, min(k_start + 2 * chunk, kmax + 1), 2, dtype=np.float64)
        if len(k) == 0:
            break
        u = k - t
        m1 = (u + s) / 2.0
        m2 = (u - s) / 2.0
        log_ratio = (
            2.0 * math.log(a)
            + np.log(k + 1.0)
            + np.log(k + 2.0)
            - np.log(k + 1.0 - t)
            - np.log(k + 2.0 - t)
            - math.log(9.0)
            + np.log(u + 1.0)
            + np.log(u + 2.0)
            - np.log(m1 + 1.0)
            - np.log(m2 + 1.0)
        )
        log_terms = log_carry + np.concatenate([[0.0], np.cumsum(log_ratio[:-1])])
        total += float(np.exp(log_terms).sum())
        log_carry = float(log_terms[-1] + log_ratio[-1])
        k_start = int(k[-1]) + 2
    return total


def _series_4n(t: int, s: int, a: float, kmax: int) -> float:
    if a == 0.0:
        return 1.0 if (t, s) == (0, 0) else 0.0
    k0 = abs(t) + abs(s)  # = max(|t+s|, |t-s|), and has the parity of t+s
    if k0 > kmax:
        return 0.0
    log_carry = (
        k0 * math.log(a)
        + specfun.binom_log_pmf((k0 + t + s) // 2, k0, 0.5)
        + specfun.binom_log_pmf((k0 + t - s) // 2, k0, 0.5)
    )
    total = 0.0
    chunk = 1 << 20
    k_start = k0
    while k_start <= kmax:
        k = np.arange(k_start, min(k_start + 2 * chunk, kmax + 1), 2, dtype=np.float64)
        if len(k) == 0:
            break
        log_num = np.log(k + 1.0) + np.log(k + 2.0)
        m1a = (k + (t + s)) / 2.0
        m1b = (k - (t + s)) / 2.0
        m2a = (k + (t - s)) / 2.0
        m2b = (k - (t - s)) / 2.0
        log_ratio = (
            2.0 * math.log(a)
            + 2.0 * log_num
            - math.log(16.0)
            - np.log(m1a + 1.0)
            - np.log(m1b + 1.0)
            - np.log(m2a + 1.0)
            - np.log(m2b + 1.0)
        )
        log_terms = log_carry + np.concatenate([[0.0], np.cumsum(log_ratio[:-1])])
        total += float(np.exp(log_terms).sum())
        log_carry = float(log_terms[-1] + log_ratio[-1])
        k_start = int(k[-1]) + 2
    return total


def green_series(kern: GreenKernel, t: int, s: int) -> GreenValue:
    """g(t,s,a) by direct summation, with a certified geometric tail bound."""
    a, tol = kern.a, kern.truncation_tol
    kmax = series_term_count(a, tol)
    if kmax > SERIES_TERM_CEILING:
        raise ResourceError(
            f"series needs {kmax} terms (> {SERIES_TERM_CEILING}); "
            "use the FFT backend or green_point"
        )
    if kern.model is Walk.THREE_N:
        if t < 0:
            return GreenValue(0.0, 0.0)
        val = _series_3n(t, s, a, kmax)
    else:
        val = _series_4n(t, s, a, kmax)
    tail = a ** (kmax + 1) / (1.0 - a) if a > 0.0 else 0.0
    return GreenValue(val, tail)


# ---------------------------------------------------------------------------
# 1D Fourier reduction: cheap single points arbitrarily close to a = 1
# ---------------------------------------------------------------------------


def _g3_fourier(t: int, s: int, a: float) -> float:
    # g3(t,s,a) = (1/pi) int_0^pi cos(sy) exp(t log(a/3) - (t+1) log(1-(2a/3)cos y)) dy
    if t < 0:
        return 0.0
    if a == 0.0:
        return 1.0 if (t, s) == (0, 0) else 0.0
    lc = t * math.log(a / 3.0)

    def log_env(y: float) -> float:
        return lc - (t + 1) * math.log(1.0 - (2.0 * a / 3.0) * math.cos(y))

    l0 = log_env(0.0)
    # envelope decreases in y; find Y with log_env(Y) <= l0 - 46 by bisection
    target = l0 - 46.0
    if log_env(math.pi) > target:
        ycut = math.pi
    else:
        lo, hi = 0.0, math.pi
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if log_env(mid) > target:
                lo = mid
            else:
                hi = mid
        ycut = hi

    def f(y):
        return math.cos(s * y) * math.exp(log_env(y))

    val, _ = _quiet_quad(f, 0.0, ycut, limit=800, epsabs=1e-300, epsrel=1e-11)
    return val / math.pi


def _g1d(u: int, b: float) -> float:
    # 1D lattice Green function sum_k b^k p_k(u) = rho^|u| / sqrt(1-b^2),
    # rho = b / (1 + sqrt(1-b^2)); valid for |b| < 1.
    s2 = math.sqrt((1.0 - b) * (1.0 + b))
    if b == 0.0:
        return 1.0 if u == 0 else 0.0
    rho = b / (1.0 + s2)
    au = abs(u)
    lmag = au * math.log(abs(rho)) - math.log(s2)
    if lmag < -745.0:
        return 0.0
    sign = -1.0 if (rho < 0.0 and au % 2 == 1) else 1.0
    return sign * math.exp(lmag)


def _g4_fourier(t: int, s: int, a: float) -> float:
    # g4(t,s,a) = (1/pi) int_0^pi cos((t-s)y) G1(|t+s|, a cos y) dy.  Under
    # y -> pi - y the integrand picks up (-1)^{(t+s)+(t-s)} = +1, so the two
    # peaks at y = 0 and y = pi contribute equally:
    # g4 = (2/pi) int_0^{pi/2} cos((t-s)y) G1(|t+s|, a cos y) dy.
    if a == 0.0:
        return 1.0 if (t, s) == (0, 0) else 0.0
    u = abs(t + s)
    v = t - s
    half = math.pi / 2.0

    def log_env(y: float) -> float:
        b = a * math.cos(y)
        if b <= 0.0:
            return -math.inf
        s2 = math.sqrt((1.0 - b) * (1.0 + b))
        return u * math.log(b / (1.0 + s2)) - math.log(s2)

    if u == 0:
        ycut = half
    else:
        target = log_env(0.0) - 46.0
        if log_env(half * 0.999) > target:
            ycut = half
        else:
            lo, hi = 0.0, half * 0.999
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if log_env(mid) > target:
                    lo = mid
                else:
                    hi = mid
            ycut = hi

    def f(y):
        return math.cos(v * y) * _g1d(u, a * math.cos(y))

    val, _ = _quiet_quad(f, 0.0, ycut, limit=800, epsabs=1e-300, epsrel=1e-11)
    if ycut < half:
        val2, _ = _quiet_quad(f, ycut, half, limit=200, epsabs=1e-300, epsrel=1e-8)
        val += val2
    return 2.0 * val / math.pi


def green_point(model: Walk, t: int, s: int, a: float, tol: float = 1e-9) -> float:
    """g(t,s,a) by the cheapest valid route (series if short, else 1D reduction)."""
    if not 0.0 <= a < 1.0:
        raise DomainError(f"need 0 <= a < 1, got a={a}")
    kmax = series_term_count(a, tol)
    if kmax <= 200_000:
        return green_series(GreenKernel(model, a, min(tol, 1e-3)), t, s).value
    if model is Walk.THREE_N:
        return _g3_fourier(t, s, a)
    return _g4_fourier(t, s, a)


# ---------------------------------------------------------------------------
# FFT inversion backend
# ---------------------------------------------------------------------------


@dataclass
class GreenGrid:
    """Window of g(t,s,a) for |t|,|s| <= half_width, plus the full-grid mass."""

    model: Walk
    a: float
    half_width: int
    values: np.ndarray = field(repr=False)  # shape (2h+1, 2h+1), index [t+h, s+h]
    grid_mass: float = 0.0
    fft_size: int = 0
    alias_bound: float = 0.0

    def value(self, t: int, s: int) -> float:
        h = self.half_width
        if abs(t) > h or abs(s) > h:
            raise DomainError(f"({t},{s}) outside window half_width={h}")
        return float(self.values[t + h, s + h])

    def to_csv(self, path) -> None:
        h = self.half_width
        with open(path, "w") as fh:
            fh.write("t,s,value\n")
            for t in range(-h, h + 1):
                for s in range(-h, h + 1):
                    fh.write(f"{t},{s},{self.values[t + h, s + h]!r}\n")


def fft_grid_size(a: float, half_width: int, tol: float) -> int:
    """Smallest power of two M with alias images (distance >= M - 2 half_width)
    contributing at most tol: a^(M - 2 hw)/(1-a) <= tol, and M >= 4 hw."""
    if a == 0.0:
        need = 4 * half_width
    else:
        dist = math.log(tol * (1.0 - a)) / math.log(a)
        need = max(4 * half_width, int(math.ceil(2 * half_width + dist)))
    m = 1
    while m < max(need, 8):
        m <<= 1
    return m


def _ifft_green(model: Walk, a: float, m: int, half_width: int) -> tuple[np.ndarray, float]:
    """Inverse-DFT window |t|,|s| <= half_width of 1/(1 - a p^) on an m x m grid;
    returns (window, full-grid mass)."""
    theta = 2.0 * np.pi * np.arange(m) / m
    ph = model.phat(theta[:, None], theta[None, :])
    ghat = 1.0 / (1.0 - a * ph)
    grid_real = np.fft.ifft2(ghat).real
    grid_mass = float(grid_real.sum())
    h = half_width
    idx = np.concatenate([np.arange(m - h, m), np.arange(0, h + 1)])
    window = grid_real[np.ix_(idx, idx)].copy()
    return window, grid_mass


def green_fft(kern: GreenKernel, half_width: int) -> GreenGrid:
    """g(t,s,a) on the window |t|,|s| <= half_width via inverse DFT of
    1/(1 - a p^).  Resolution/aliasing certified by the walk-range bound."""
    if half_width < 1 or (half_width & (half_width - 1)) != 0:
        raise DomainError(f"half_width must be a power of two, got {half_width}")
    a, tol = kern.a, kern.truncation_tol
    m = fft_grid_size(a, half_width, tol)
    if m > FFT_SIZE_CEILING:
        raise ResourceError(
            f"FFT inversion needs grid size M={m} > {FFT_SIZE_CEILING} "
            f"for a={a}, half_width={half_width}, tol={tol}"
        )
    window, grid_mass = _ifft_green(kern.model, a, m, half_width)
    alias = a ** max(1, m - 2 * half_width) / (1.0 - a) if a > 0 else 0.0
    return GreenGrid(kern.model, a, half_width, window, grid_mass, m, alias)


# ---------------------------------------------------------------------------
# Limit kernels
# ---------------------------------------------------------------------------


def h3(t: float, s: float, z: float) -> float:
    """Heat-kernel limit of the 3N Green function:
    (3 / (2 sqrt(pi t))) exp(-3zt - s^2/(4t)), supported on t > 0."""
    if z <= 0:
        raise DomainError(f"h3 requires z > 0, got z={z}")
    if t <= 0:
        return 0.0
    return 3.0 / (2.0 * math.sqrt(math.pi * t)) * math.exp(-3.0 * z * t - s * s / (4.0 * t))


def h4(t: float, s: float, z: float) -> float:
    """Helmholtz-kernel limit of the 4N Green function:
    (2/pi) K0(2 sqrt(z (t^2 + s^2)))."""
    if z <= 0:
        raise DomainError(f"h4 requires z > 0, got z={z}")
    r2 = t * t + s * s
    if r2 == 0.0:
        raise DomainError("h4 has a logarithmic singularity at (t,s) = (0,0)")
    return 2.0 / math.pi * specfun.bessel_k0(2.0 * math.sqrt(z * r2))


def h3_bound(t: float, s: float, z: float) -> float:
    """Dominating envelope t^(-1/2) exp(-zt - s^2/(16 t)) of the rescaled g3."""
    if t <= 0:
        return 0.0
    return math.exp(-z * t - s * s / (16.0 * t)) / math.sqrt(t)


# ---------------------------------------------------------------------------
# Scaling limit ladders
# ---------------------------------------------------------------------------


class ProbeRow(NamedTuple):
    lam: float
    rescaled_green: float
    limit_kernel: float
    rel_err: float


def scaling_limit_probe(
    model: Walk, t: float, s: float, z: float, lambdas: list[float]
) -> list[ProbeRow]:
    """Rescaled Green values against the limit kernel along a lambda ladder.

    3N: sqrt(lam) g3([lam t], [sqrt(lam) s], 1 - z/lam)  vs  h3(t,s,z)
    4N: g4([lam t], [lam s], 1 - z/lam^2)                vs  h4(t,s,z)
    """
    if z <= 0:
        raise DomainError(f"need z > 0, got z={z}")
    if model is Walk.THREE_N:
        if t <= 0:
            raise DomainError(f"3N limit kernel needs t > 0, got t={t}")
        limit = h3(t, s, z)
    else:
        if t == 0 and s == 0:
            raise DomainError("4N limit kernel needs (t,s) != (0,0)")
        limit = h4(t, s, z)
    rows = []
    for lam in lambdas:
        a = 1.0 - z / lam if model is Walk.THREE_N else 1.0 - z / lam**2
        if not 0.0 < a < 1.0:
            raise DomainError(f"lambda={lam} gives coefficient a={a} outside (0,1)")
        if model is Walk.THREE_N:
            val = math.sqrt(lam) * green_point(
                model, math.floor(lam * t), math.floor(math.sqrt(lam) * s), a
            )
        else:
            val = green_point(model, math.floor(lam * t), math.floor(lam * s), a)
        rows.append(ProbeRow(lam, val, limit, abs(val - limit) / abs(limit)))
    return rows
