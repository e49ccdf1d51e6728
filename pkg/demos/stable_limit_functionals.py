"""Characteristic functionals of the aggregated-autoregression limits.

J_gamma is the alpha-th-power integral of the limit kernel against the
control measure phi1 z^beta du dv dz; the discrete box functional J_n walks
onto it.  The exponent tables and the covariance asymptotics give two more
windows onto the same scaling.
"""

from lrd2d.green import Walk
from lrd2d.stable_limits import (
    H_table,
    J_gamma,
    MixingLaw,
    StableLimitSpec,
    cov_asymptotics,
    j_n_ladder,
)

beta = 0.3
mix = MixingLaw(beta)

print("== H(gamma) tables (alpha = 2, beta = 0.3) ==")
for model in (Walk.THREE_N, Walk.FOUR_N):
    rows = []
    for g in (0.25, model.gamma0, 2.0):
        law = H_table(model, 2.0, beta, g)
        rows.append(f"H({g}) = {law.H:.4f} [{law.regime}]")
    print(f"  {model.value}: " + ";  ".join(rows))

print()
print("== J_n -> J at the dependent aspect gamma0 ==")
for model in (Walk.THREE_N, Walk.FOUR_N):
    spec = StableLimitSpec(model, 2.0, mix, model.gamma0)
    rows, j_ref = j_n_ladder(spec, [16, 32, 64])
    print(f"  {model.value}: J = {j_ref:.5f}")
    for r in rows:
        print(f"    n={r.n:3d}  J_n = {r.value:.5f}  gap = {r.rel_gap:.4f}")

print()
print("== OSRF scaling of J (log-identity residuals) ==")
import math

spec = StableLimitSpec(Walk.THREE_N, 2.0, mix, 0.5)
H = H_table(Walk.THREE_N, 2.0, beta, 0.5).H
j1 = J_gamma(spec, 1.0, 1.0)
for lam in (2.0, 4.0):
    jl = J_gamma(spec, lam, math.sqrt(lam))
    resid = abs(math.log(jl) - math.log(j1) - 2.0 * H * math.log(lam))
    print(f"  lam={lam}: residual {resid:.2e}")

print()
print("== covariance asymptotics (alpha = 2) ==")
rows = cov_asymptotics(Walk.FOUR_N, beta, 1.0, 1.0, [8.0, 16.0, 32.0])
print("  4N at (1,1): scaled covariance vs (t^2+s^2)^(-beta) law")
for r in rows:
    print(f"    lam={r.lam:4.0f}  scaled {r.scaled_cov:.6f}  limit {r.limit_value:.6f}  rel {r.rel_err:.4f}")
