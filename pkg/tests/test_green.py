"""Green function tests: brute-force path enumeration for the walk laws,
generating-function closed forms, backend equivalence, Fourier lower bound,
limit kernels against quadrature, and the dominating-bound inequalities."""

import math

import numpy as np
import pytest
from scipy import integrate

from lrd2d import specfun
from lrd2d.errors import DomainError, ResourceError
from lrd2d.green import (
    Backend,
    GreenKernel,
    Walk,
    _g3_fourier,
    _g4_fourier,
    fft_grid_size,
    green_fft,
    green_point,
    green_series,
    h3,
    h3_bound,
    h4,
    pk,
    scaling_limit_probe,
)


def brute_pk(model, k, t, s):
    steps = [(st, ss) for st, ss, _ in model.steps]
    probs = [p for _, _, p in model.steps]
    total = 0.0
    stack = [(0, 0, 0, 1.0)]
    while stack:
        depth, x, y, pr = stack.pop()
        if depth == k:
            if (x, y) == (t, s):
                total += pr
            continue
        for (st, ss), p in zip(steps, probs):
            stack.append((depth + 1, x + st, y + ss, pr * p))
    return total


@pytest.mark.parametrize("model", [Walk.THREE_N, Walk.FOUR_N])
def test_pk_matches_enumeration(model):
    for k in range(0, 7):
        for t in range(-4, 5):
            for s in range(-4, 5):
                assert abs(pk(model, k, t, s) - brute_pk(model, k, t, s)) < 1e-14


def test_pk_examples():
    assert abs(pk(Walk.THREE_N, 1, 1, 0) - 1 / 3) < 1e-15
    assert abs(pk(Walk.THREE_N, 2, 1, 1) - 2 / 9) < 1e-15  # enumerated: 2 of 9 paths
    assert abs(pk(Walk.FOUR_N, 2, 0, 0) - 0.25) < 1e-15  # 4 of 16 paths return


@pytest.mark.parametrize("model", [Walk.THREE_N, Walk.FOUR_N])
def test_pk_normalization_and_parity(model):
    for k in (0, 1, 2, 7, 23, 60):
        total = 0.0
        for t in range(-k, k + 1):
            for s in range(-k, k + 1):
                p = pk(model, k, t, s)
                total += p
                if model is Walk.THREE_N:
                    bad = t < 0 or t > k or (k - t) < abs(s) or (k - t + s) % 2 != 0
                else:
                    bad = abs(t) + abs(s) > k or (k + t + s) % 2 != 0
                if bad:
                    assert p == 0.0
        assert abs(total - 1.0) < 1e-12


def test_green_series_a0():
    for model in (Walk.THREE_N, Walk.FOUR_N):
        kern = GreenKernel(model, 0.0)
        assert green_series(kern, 0, 0).value == 1.0
        assert green_series(kern, 1, 0).value == 0.0


def test_green3_origin_closed_form():
    # generating function sum C(2m,m) x^m = (1-4x)^(-1/2) applied to
    # p_k(0,0) = (2/3)^k p(k,0) gives g3(0,0,a) = (1 - 4a^2/9)^(-1/2)
    for a in (0.2, 0.5, 0.75, 0.9):
        expect = (1.0 - 4.0 * a * a / 9.0) ** -0.5
        assert abs(green_series(GreenKernel(model=Walk.THREE_N, a=a), 0, 0).value - expect) < 1e-10


def test_green_series_tail_bound_certificate():
    kern = GreenKernel(Walk.FOUR_N, 0.9, truncation_tol=1e-6)
    val = green_series(kern, 1, 1)
    assert val.tail_bound <= 1e-6
    tight = green_series(GreenKernel(Walk.FOUR_N, 0.9, truncation_tol=1e-12), 1, 1)
    assert abs(val.value - tight.value) <= val.tail_bound + 1e-15


def test_green_series_resource_error():
    with pytest.raises(ResourceError):
        green_series(GreenKernel(Walk.FOUR_N, 1.0 - 1e-9, truncation_tol=1e-9), 0, 0)


def test_fourier_reduction_matches_series():
    for a in (0.3, 0.95):
        k3 = GreenKernel(Walk.THREE_N, a)
        k4 = GreenKernel(Walk.FOUR_N, a)
        for (t, s) in [(0, 0), (1, 0), (3, 1), (7, -2), (10, 10), (4, 0)]:
            s3 = green_series(k3, t, s).value
            s4 = green_series(k4, t, s).value
            assert abs(_g3_fourier(t, s, a) - s3) < 1e-10 * max(1.0, s3)
            assert abs(_g4_fourier(t, s, a) - s4) < 1e-10 * max(1.0, s4)


def test_backend_equivalence():
    # module-scale version of acceptance criterion 1
    for model in (Walk.THREE_N, Walk.FOUR_N):
        for a in (0.5, 0.9):
            kern = GreenKernel(model, a, truncation_tol=1e-9)
            grid = green_fft(kern, 8)
            for t in range(-8, 9, 3):
                for s in range(-8, 9, 3):
                    sv = green_series(kern, t, s).value
                    assert abs(grid.value(t, s) - sv) < 1e-8


def test_fft_zero_frequency_mass():
    kern = GreenKernel(Walk.FOUR_N, 0.85)
    grid = green_fft(kern, 8)
    assert abs(grid.grid_mass - 1.0 / (1.0 - 0.85)) < 1e-9


def test_fft_3n_causal_zeros():
    kern = GreenKernel(Walk.THREE_N, 0.9, truncation_tol=1e-9)
    grid = green_fft(kern, 8)
    for t in range(-8, 0):
        for s in range(-8, 9):
            assert abs(grid.value(t, s)) <= kern.truncation_tol


def test_fft_half_width_validation():
    with pytest.raises(DomainError):
        green_fft(GreenKernel(Walk.FOUR_N, 0.5), 12)


def test_fft_resource_error():
    assert fft_grid_size(0.999, 32, 1e-9) > 8192
    with pytest.raises(ResourceError):
        green_fft(GreenKernel(Walk.THREE_N, 0.999), 32)


@pytest.mark.parametrize("model", [Walk.THREE_N, Walk.FOUR_N])
def test_fourier_lower_bound(model):
    # |1 - a phat| >= (1/24) q [(1-a) + x^2 + y^2] on a 256 x 256 grid
    q = model.q
    th = np.linspace(-math.pi, math.pi, 256)
    X, Y = np.meshgrid(th, th, indexing="ij")
    for a in (0.5, 0.9, 0.99):
        lhs = np.abs(1.0 - a * model.phat(X, Y))
        rhs = (q / 24.0) * ((1.0 - a) + X**2 + Y**2)
        assert np.all(lhs >= rhs - 1e-14)


# ---------------------------------------------------------------------------
# Limit kernels
# ---------------------------------------------------------------------------


def test_h3_value_and_support():
    expect = 3.0 / (2.0 * math.sqrt(math.pi)) * math.exp(-3.0)
    assert abs(h3(1.0, 0.0, 1.0) - expect) < 1e-14
    assert h3(-0.5, 0.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        h3(1.0, 0.0, 0.0)


def test_h3_scaling_identity():
    for lam in (0.5, 2.0, 10.0):
        for (t, s, z) in [(1.0, 1.0, 1.0), (0.3, -0.7, 2.0)]:
            lhs = h3(lam * t, math.sqrt(lam) * s, z / lam)
            assert abs(lhs - lam**-0.5 * h3(t, s, z)) < 1e-14 * h3(t, s, z) * lam**-0.5 + 1e-300


def test_h3_s_integral_constant():
    # resolves the 12-vs-3 discrepancy: quadrature says the constant is 3
    u, z = 0.7, 1.3
    val, _ = integrate.quad(lambda s: h3(u, s, z), -np.inf, np.inf)
    assert abs(val - 3.0 * math.exp(-3.0 * u * z)) < 1e-10


def test_h4_value_and_symmetries():
    assert abs(h4(1.0, 0.0, 1.0) - 2.0 / math.pi * specfun.bessel_k0(2.0)) < 1e-15
    assert abs(h4(1.0, 0.0, 1.0) - 0.07250709134387023) < 1e-9
    for (t, s, z) in [(0.5, 1.2, 0.7), (2.0, -1.0, 3.0)]:
        assert h4(t, s, z) == h4(s, t, z) == h4(-t, s, z)
        lam = 3.0
        assert abs(h4(lam * t, lam * s, z / lam**2) - h4(t, s, z)) < 1e-14
    with pytest.raises(DomainError):
        h4(0.0, 0.0, 1.0)


def test_h4_heat_kernel_form():
    # proof form pi^-1 int w^-1 exp(-zw - r^2/w) dw (the section header that
    # omits the 1/w is inconsistent with the K0 identity)
    t, s, z = 0.6, 0.3, 1.7
    val, _ = integrate.quad(
        lambda w: math.exp(-z * w - (t * t + s * s) / w) / (math.pi * w), 0, np.inf
    )
    assert abs(val - h4(t, s, z)) < 1e-10


def test_h3_bound_dominates():
    c = 3.0 / (2.0 * math.sqrt(math.pi))
    for t in (0.1, 1.0, 5.0):
        for s in (-3.0, 0.0, 2.0):
            for z in (0.2, 1.0, 4.0):
                assert h3(t, s, z) <= c * h3_bound(t, s, z) * (1 + 1e-12)
    assert h3_bound(1.0, 0.0, 1.0) == math.exp(-1.0)
    assert h3_bound(-1.0, 0.0, 1.0) == 0.0
    assert h3_bound(1.0, 1.0, 2.0) < h3_bound(1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "model,t,s",
    [(Walk.THREE_N, 1.0, 1.0), (Walk.FOUR_N, 1.0, 0.0), (Walk.FOUR_N, 1.0, 1.0)],
)
def test_scaling_limit_ladder(model, t, s):
    rows = scaling_limit_probe(model, t, s, 1.0, [100.0, 400.0, 1600.0])
    errs = [r.rel_err for r in rows]
    for e0, e1 in zip(errs[:-1], errs[1:]):
        assert e1 <= e0 + 1e-6
    assert errs[-1] < 0.05


def test_scaling_limit_domain_errors():
    with pytest.raises(DomainError):
        scaling_limit_probe(Walk.THREE_N, 1.0, 1.0, 1.0, [0.5])  # a <= 0
    with pytest.raises(DomainError):
        scaling_limit_probe(Walk.THREE_N, -1.0, 1.0, 1.0, [100.0])
    with pytest.raises(DomainError):
        scaling_limit_probe(Walk.FOUR_N, 0.0, 0.0, 1.0, [100.0])


@pytest.mark.slow
def test_dominating_bounds():
    # sqrt(lam) g3 <= C (h3_bound + sqrt(lam) exp(-zt - c(lam t)^(1/3)
    #                                   - c(sqrt(lam)|s|)^(1/2))),  (C,c) = (10, 0.05)
    C, c = 10.0, 0.05
    for lam in (400.0, 1600.0):
        for t in (0.25, 1.0, 2.0):
            for s in (0.0, 1.0, 3.0):
                for z in (0.5, 1.0, 2.0):
                    a = 1.0 - z / lam
                    val = math.sqrt(lam) * green_point(
                        Walk.THREE_N, math.floor(lam * t), math.floor(math.sqrt(lam) * s), a
                    )
                    env = C * (
                        h3_bound(t, s, z)
                        + math.sqrt(lam)
                        * math.exp(
                            -z * t - c * (lam * t) ** (1 / 3) - c * (math.sqrt(lam) * abs(s)) ** 0.5
                        )
                    )
                    assert val <= env, (lam, t, s, z, val, env)
    # 4N analogue: g4 <= C (h4 + exp(-c sqrt(lam) (|t|^(1/2) + |s|^(1/2))))
    for lam in (400.0, 1600.0):
        for t in (0.25, 1.0):
            for s in (0.0, 1.0):
                for z in (0.5, 2.0):
                    a = 1.0 - z / lam**2
                    val = green_point(
                        Walk.FOUR_N, math.floor(lam * t), math.floor(lam * s), a
                    )
                    env = C * (
                        h4(t, s if s else 1e-9, z)
                        + math.exp(-c * math.sqrt(lam) * (abs(t) ** 0.5 + abs(s) ** 0.5))
                    )
                    assert val <= env, (lam, t, s, z, val, env)


def test_kernel_validation():
    with pytest.raises(DomainError):
        GreenKernel(Walk.THREE_N, 1.0)
    with pytest.raises(DomainError):
        GreenKernel(Walk.THREE_N, 0.5, truncation_tol=0.1)
    assert GreenKernel(Walk.THREE_N, 0.5, backend=Backend.FFT_INVERSION).backend
