"""Lattice Green functions near the unit root.

Walks the three evaluation routes (series, FFT inversion, single-point Fourier
reduction) past each other, then shows the near-critical scaling collapse:
rescaled Green values marching onto the heat kernel (drifting walk) and the
Bessel-K0 kernel (symmetric walk) along a doubling ladder.
"""

import numpy as np

from lrd2d.green import (
    GreenKernel,
    Walk,
    green_fft,
    green_point,
    green_series,
    h3,
    h4,
    scaling_limit_probe,
)

print("== three routes to g(t, s, a) at a = 0.9 ==")
for model in (Walk.THREE_N, Walk.FOUR_N):
    kern = GreenKernel(model, 0.9)
    grid = green_fft(kern, 8)
    print(f"  {model.value}:  (t,s)   series        fft           point")
    for (t, s) in [(0, 0), (2, 1), (5, -3)]:
        sv = green_series(kern, t, s).value
        fv = grid.value(t, s)
        pv = green_point(model, t, s, 0.9)
        print(f"    ({t:2d},{s:2d})  {sv:.10f}  {fv:.10f}  {pv:.10f}")

print()
print("== mass identity: full-grid sum equals 1/(1-a) ==")
for a in (0.5, 0.9, 0.99):
    grid = green_fft(GreenKernel(Walk.FOUR_N, a), 16)
    print(f"  a={a}: sum = {grid.grid_mass:.8f}, 1/(1-a) = {1/(1-a):.8f}")

print()
print("== scaling collapse onto the limit kernels ==")
lams = [100.0, 400.0, 1600.0, 6400.0]
rows = scaling_limit_probe(Walk.THREE_N, 1.0, 1.0, 1.0, lams)
print(f"  drifting walk, target h3(1,1,1) = {h3(1.0, 1.0, 1.0):.7f}")
for r in rows:
    print(f"    lam={r.lam:6.0f}  sqrt(lam) g3 = {r.rescaled_green:.7f}  rel err {r.rel_err:.2e}")
rows = scaling_limit_probe(Walk.FOUR_N, 1.0, 1.0, 1.0, lams)
print(f"  symmetric walk, target h4(1,1,1) = {h4(1.0, 1.0, 1.0):.7f}")
for r in rows:
    print(f"    lam={r.lam:6.0f}  g4 = {r.rescaled_green:.7f}  rel err {r.rel_err:.2e}")
