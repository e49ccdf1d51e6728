"""Partial-sum variances under singular spectral densities.

The density with axis singularities (product form) sends the normalized
variance to kappa^2(d1) kappa^2(d2) for EVERY aspect exponent gamma; the
density with a single origin singularity picks out one special gamma0 where
the two-dimensional limit survives.
"""

import numpy as np

from lrd2d.spectra import (
    H_of_gamma,
    TypeI,
    TypeII,
    kappa_sq,
    kappa_sq_integral,
    limit_variance,
    variance_partial_sum,
)

print("== kappa^2(d): closed form vs defining integral ==")
for d in (0.1, 0.25, 0.4):
    c, i = kappa_sq(d), kappa_sq_integral(d)
    print(f"  d={d}: closed {c:.9f}  integral {i:.9f}  rel {abs(c - i) / i:.1e}")

print()
print("== Type II: n^(-2H) E S_n^2 -> kappa^2 kappa^2 for every gamma ==")
m2 = TypeII(0.2, 0.2)
lim = kappa_sq(0.2) ** 2
for gamma in (0.5, 1.0, 2.0):
    H = H_of_gamma(m2, gamma).H
    for n in (256, 1024, 4096):
        v = variance_partial_sum(m2, n, gamma) * n ** (-2 * H)
        print(f"  gamma={gamma}, n={n:5d}: normalized/limit = {v / lim:.5f}  (H = {H})")

print()
print("== Type I at the special aspect gamma0: limit variance of V(1,1) ==")
m1 = TypeI(0.5, 0.5, c=1.0)
H = H_of_gamma(m1, 1.0).H
target = limit_variance(m1, 1.0, 1.0, 1.0)
print(f"  H(gamma0) = {H}, E V^2(1,1) = {target:.6f}")
for n in (64, 128, 256):
    v = variance_partial_sum(m1, n, 1.0) * n ** (-2 * H)
    print(f"  n={n:4d}: normalized = {v:.6f}  (ratio {v / target:.4f})")
