"""Batch CLI: every experiment writes CSV/JSON artifacts plus a manifest that
reproduces the run bit-exactly.

Exit codes: 0 ok, 2 config error, 3 domain error, 4 resource error,
5 check-mode threshold failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys

import numpy as np

from . import __version__, fields, green, spectra, stable_limits
from .errors import ConfigError, DomainError, NumericalError, ResourceError
from .green import Walk
from .spectra import Rectangle, TypeI, TypeII

CHECK_FAIL = 5


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _walk(name: str) -> Walk:
    try:
        return Walk(name)
    except ValueError:
        raise ConfigError(f"unknown walk model {name!r} (use 3n or 4n)")


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


# ---------------------------------------------------------------------------
# Subcommand implementations; each returns (summary line, check_ok)
# ---------------------------------------------------------------------------


def cmd_green_eval(cfg, out):
    model = _walk(cfg["model"])
    kern = green.GreenKernel(model, float(cfg["a"]), float(cfg.get("tol", 1e-9)))
    grid = green.green_fft(kern, int(cfg.get("half_width", 16)))
    path = os.path.join(out, "green_grid.csv")
    grid.to_csv(path)
    mass = grid.grid_mass
    expect = 1.0 / (1.0 - kern.a)
    ok = abs(mass - expect) <= 1e-6 * expect
    return f"green eval: grid {grid.values.shape} mass {mass:.6f} (1/(1-a) = {expect:.6f})", ok


def cmd_green_limit(cfg, out):
    model = _walk(cfg["model"])
    t, s, z = float(cfg.get("t", 1)), float(cfg.get("s", 1)), float(cfg.get("z", 1))
    lambdas = _floats(cfg.get("lambdas", "100,400,1600,6400"))
    rows = green.scaling_limit_probe(model, t, s, z, lambdas)
    _write_csv(
        os.path.join(out, "green_limit.csv"),
        ["lambda", "rescaled_green", "limit_kernel", "rel_err"],
        rows,
    )
    errs = [r.rel_err for r in rows]
    ok = errs[-1] < 0.05 and all(b <= a + 1e-6 for a, b in zip(errs[:-1], errs[1:]))
    return f"green limit: final rel_err {errs[-1]:.2e} over {len(rows)} ladder points", ok


def _spectral_model(cfg) -> spectra.SpectralModel:
    kind = cfg.get("kind", "type2")
    if kind == "type1":
        return TypeI(float(cfg["h1"]), float(cfg["h2"]), float(cfg.get("c", 1.0)))
    if kind == "type2":
        return TypeII(float(cfg.get("d1", 0.2)), float(cfg.get("d2", 0.2)))
    if kind == "lavancier":
        return spectra.Lavancier(
            float(cfg.get("theta1", 1.0)), float(cfg.get("theta2", 1.0)), float(cfg["d"])
        )
    raise ConfigError(f"unknown spectral kind {kind!r}")


def cmd_spectra_var(cfg, out):
    model = _spectral_model(cfg)
    gamma = float(cfg.get("gamma", 1.0))
    ns = _ints(cfg.get("ns", "256,1024,4096"))
    rows = []
    for n in ns:
        law = spectra.H_of_gamma(model, gamma)
        raw = spectra.variance_partial_sum(model, n, gamma)
        rows.append((n, gamma, raw, raw * n ** (-2.0 * law.H)))
    _write_csv(
        os.path.join(out, "spectra_var.csv"),
        ["n", "gamma", "raw_variance", "normalized"],
        rows,
    )
    # density surface for the figure pipeline
    grid = np.linspace(-math.pi, math.pi, 81)
    surf = []
    for x in grid:
        for y in grid:
            try:
                val = spectra.density(model, float(x), float(y))
            except DomainError:
                val = float("nan")
            surf.append((x, y, val))
    _write_csv(os.path.join(out, "density_surface.csv"), ["x", "y", "value"], surf)
    ok = True
    if isinstance(model, TypeII):
        lim = spectra.kappa_sq(model.d1) * spectra.kappa_sq(model.d2)
        ok = abs(rows[-1][3] / lim - 1.0) <= 0.02
    return f"spectra var: normalized at n={ns[-1]} is {rows[-1][3]:.6f}", ok


def cmd_spectra_kappa(cfg, out):
    ds = _floats(cfg.get("ds", "0.1,0.25,0.4"))
    rows = []
    worst = 0.0
    for d in ds:
        c = spectra.kappa_sq(d)
        i = spectra.kappa_sq_integral(d)
        rel = abs(c - i) / i
        worst = max(worst, rel)
        rows.append((d, c, i, rel))
    _write_csv(
        os.path.join(out, "kappa.csv"), ["d", "closed_form", "integral", "rel_err"], rows
    )
    return f"spectra kappa: worst closed-vs-integral rel err {worst:.2e}", worst <= 1e-6


def cmd_limits_jgamma(cfg, out):
    model = _walk(cfg["model"])
    alpha = float(cfg.get("alpha", 2.0))
    beta = float(cfg.get("beta", 0.3))
    gamma = float(cfg.get("gamma", model.gamma0))
    ns = _ints(cfg.get("ns", "16,32,64,128"))
    spec = stable_limits.StableLimitSpec(model, alpha, stable_limits.MixingLaw(beta), gamma)
    H = stable_limits.H_table(model, alpha, beta, gamma).H
    rows, j_ref = stable_limits.j_n_ladder(spec, ns)
    _write_csv(
        os.path.join(out, "jgamma_ladder.csv"), ["n", "value", "rel_gap"], rows
    )
    report = {
        "model": model.value,
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "H": H,
        "J_gamma": j_ref,
        "J_n": [[r.n, r.value, r.rel_gap] for r in rows],
    }
    _write_json(os.path.join(out, "jgamma.json"), report)
    gaps = [r.rel_gap for r in rows]
    plain_gap = abs(rows[-1].value - j_ref) / j_ref
    ok = plain_gap <= 0.10 and all(b <= a + 1e-6 for a, b in zip(gaps[:-1], gaps[1:]))
    return (
        f"limits jgamma: J={j_ref:.5f}, J_{rows[-1].n}={rows[-1].value:.5f} "
        f"(gap {plain_gap:.3f})",
        ok,
    )


def cmd_limits_htable(cfg, out):
    model = _walk(cfg["model"])
    alpha = float(cfg.get("alpha", 2.0))
    beta = float(cfg.get("beta", 0.3))
    gammas = _floats(cfg.get("gammas", "0.5,1,2"))
    rows = []
    for g in gammas:
        law = stable_limits.H_table(model, alpha, beta, g)
        rows.append((g, law.H, law.regime, law.gamma0))
    with open(os.path.join(out, "htable.csv"), "w") as fh:
        fh.write("gamma,H,regime,gamma0\n")
        for g, H, regime, g0 in rows:
            fh.write(f"{_fmt(g)},{_fmt(H)},{regime},{_fmt(g0)}\n")
    _write_json(
        os.path.join(out, "htable.json"),
        {
            "model": model.value,
            "alpha": alpha,
            "beta": beta,
            "laws": [
                {"gamma": g, "H": H, "regime": regime, "gamma0": g0}
                for g, H, regime, g0 in rows
            ],
        },
    )
    return f"limits htable: {len(rows)} rows for {model.value}", True


def cmd_cov_asym(cfg, out):
    model = _walk(cfg["model"])
    beta = float(cfg.get("beta", 0.3))
    t, s = float(cfg.get("t", 1)), float(cfg.get("s", 1))
    lambdas = _floats(cfg.get("lambdas", "8,16,32"))
    rows = stable_limits.cov_asymptotics(model, beta, t, s, lambdas)
    _write_csv(
        os.path.join(out, "cov_asym.csv"),
        ["lambda", "scaled_cov", "limit_value", "rel_err"],
        rows,
    )
    errs = [r.rel_err for r in rows]
    ok = errs[-1] <= 0.10 and all(b <= a + 1e-6 for a, b in zip(errs[:-1], errs[1:]))
    return f"cov asym: final rel_err {errs[-1]:.3f}", ok


def cmd_sim_gauss(cfg, out, seed):
    model = _spectral_model(cfg)
    w = int(cfg.get("width", 128))
    h = int(cfg.get("height", 128))
    method = fields.GaussMethod(cfg.get("method", "fft"))
    fld = fields.simulate_gaussian_spectral(
        model, w, h, seed=seed, method=method, refinement=int(cfg.get("refinement", 4))
    )
    path = os.path.join(out, "field_gauss.bin")
    fields.save_field(fld, path, fmt=cfg.get("format", "bin"))
    return f"sim gauss: {w}x{h} field ({method.value}) -> {path}", True


def cmd_sim_aggregate(cfg, out, seed):
    model = _walk(cfg["model"])
    alpha = float(cfg.get("alpha", 2.0))
    beta = float(cfg.get("beta", 0.3))
    spec = stable_limits.StableLimitSpec(
        model, alpha, stable_limits.MixingLaw(beta), float(cfg.get("gamma", model.gamma0))
    )
    fld = fields.aggregate_field(
        model,
        spec,
        int(cfg.get("components", 50)),
        int(cfg.get("width", 64)),
        int(cfg.get("height", 64)),
        seed=seed,
        tol=float(cfg.get("tol", 1e-6)),
    )
    path = os.path.join(out, "field_aggregate.bin")
    fields.save_field(fld, path, fmt=cfg.get("format", "bin"))
    return f"sim aggregate: {fld.width}x{fld.height}, N={fld.meta['n_components']}", True


def cmd_estimate_hurst(cfg, out, seed):
    gamma = float(cfg.get("gamma", 1.0))
    n_fields = int(cfg.get("fields", 50))
    size = int(cfg.get("size", 256))
    ladder = _ints(cfg.get("ladder", "8,16,32,64"))
    source = cfg.get("source", "type2")
    flds = []
    if source == "type2":
        model = TypeII(float(cfg.get("d1", 0.2)), float(cfg.get("d2", 0.2)))
        theory = spectra.H_of_gamma(model, gamma).H
        for i in range(n_fields):
            flds.append(
                fields.simulate_gaussian_spectral(
                    model, size, size, seed=seed + i, refinement=int(cfg.get("refinement", 4))
                )
            )
    elif source == "white":
        theory = (1.0 + gamma) / 2.0
        model = TypeII(0.0, 0.0)
        for i in range(n_fields):
            flds.append(
                fields.simulate_gaussian_spectral(model, size, size, seed=seed + i, refinement=2)
            )
    elif source in ("3n", "4n"):
        walk = _walk(source)
        alpha = float(cfg.get("alpha", 2.0))
        beta = float(cfg.get("beta", 0.4))
        theory = stable_limits.H_table(walk, alpha, beta, gamma).H
        spec = stable_limits.StableLimitSpec(walk, alpha, stable_limits.MixingLaw(beta), gamma)
        for i in range(n_fields):
            flds.append(
                fields.aggregate_field(
                    walk,
                    spec,
                    int(cfg.get("components", 24)),
                    size,
                    size,
                    seed=seed + i,
                    tol=float(cfg.get("tol", 1e-6)),
                )
            )
    else:
        raise ConfigError(f"unknown source {source!r}")
    est = fields.estimate_H(flds, gamma, ladder)
    _write_csv(
        os.path.join(out, "hurst.csv"),
        ["n", "m", "variance", "n_samples"],
        est.per_n,
    )
    _write_json(
        os.path.join(out, "hurst.json"),
        {
            "H_hat": est.H_hat,
            "stderr": est.stderr,
            "gamma": gamma,
            "theory": theory,
            "source": source,
        },
    )
    tol = float(cfg.get("h_tol", 0.05))
    ok = abs(est.H_hat - theory) <= tol
    return f"estimate hurst: H_hat = {est.H_hat:.4f} +- {est.stderr:.4f} (theory {theory:.4f})", ok


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

PROBE_TOL = 1e-8


def _stable_probes(model: Walk, alpha: float, beta: float, gamma: float):
    """(horizontal-separation probe, vertical-separation probe, invariance
    flags) for the limit field at this gamma.  A probe of 0 means independent
    increments across that separating line; an invariance flag means the
    kernel is blind to translations along that axis."""
    spec = stable_limits.StableLimitSpec(
        model, alpha, stable_limits.MixingLaw(beta), gamma
    )
    K = Rectangle(0.0, 0.0, 1.0, 1.0)
    K_up = Rectangle(0.0, 2.0, 1.0, 3.0)  # separated by a horizontal line
    K_right = Rectangle(2.0, 0.0, 3.0, 1.0)  # separated by a vertical line
    g = stable_limits.semi_dependence_gram(spec, [K, K_up, K_right])
    cross_h, cross_v = g[0, 1], g[0, 2]
    invar_v = abs(g[0, 0] + g[1, 1] - 2.0 * cross_h) <= PROBE_TOL * max(g[0, 0], 1e-12)
    invar_h = abs(g[0, 0] + g[2, 2] - 2.0 * cross_v) <= PROBE_TOL * max(g[0, 0], 1e-12)
    return cross_h, cross_v, invar_v, invar_h


def _gaussian_probes(model: spectra.SpectralModel, gamma: float):
    K = Rectangle(0.0, 0.0, 1.0, 1.0)
    K_up = Rectangle(0.0, 2.0, 1.0, 3.0)
    K_right = Rectangle(2.0, 0.0, 3.0, 1.0)
    try:
        k = lambda u, v: spectra.limit_function(model, u, v, gamma)
        cross_h = abs(spectra.increment_cov_functional(k, K, K_up))
        cross_v = abs(spectra.increment_cov_functional(k, K, K_right))
        return cross_h, cross_v, False, False
    except DomainError:
        # degenerate one-dimensional limit: invariant in one direction
        return 0.0, 0.0, True, True


def classify(gammas, theory_H, H_hats, stderrs, probes):
    """Operational Definition-2.3 verdict on the probed gamma grid."""
    nondeg = []
    for (cross_h, cross_v, invar_v, invar_h) in probes:
        dependent_h = cross_v > PROBE_TOL and not invar_h
        dependent_v = cross_h > PROBE_TOL and not invar_v
        nondeg.append(dependent_h and dependent_v)
    for H_hat, se, th in zip(H_hats, stderrs, theory_H):
        if H_hat is None:
            continue
        if abs(H_hat - th) > max(3.0 * se, 0.1):
            return "Undetermined", None, nondeg
    count = sum(nondeg)
    if count == len(gammas) and count > 0:
        return "TypeII", None, nondeg
    if count == 1:
        g0 = gammas[nondeg.index(True)]
        if abs(g0 - 1.0) < 1e-9:
            return "TypeI_isotropic", g0, nondeg
        return "TypeI_anisotropic", g0, nondeg
    return "Undetermined", None, nondeg


def cmd_report_classify(cfg, out, seed):
    source = cfg.get("model", "type2")
    gammas = _floats(cfg.get("gammas", "0.5,1,2"))
    estimate = cfg.get("estimate", "yes") == "yes"
    n_fields = int(cfg.get("fields", 16))
    size = int(cfg.get("size", 128))
    rows = []
    probes = []
    theory = []
    H_hats = []
    stderrs = []
    if source in ("3n", "4n"):
        walk = _walk(source)
        alpha = float(cfg.get("alpha", 2.0))
        beta = float(cfg.get("beta", 0.3))
        for g in gammas:
            theory.append(stable_limits.H_table(walk, alpha, beta, g).H)
            probes.append(_stable_probes(walk, alpha, beta, g))
    elif source == "type2":
        m = TypeII(float(cfg.get("d1", 0.2)), float(cfg.get("d2", 0.2)))
        for g in gammas:
            theory.append(spectra.H_of_gamma(m, g).H)
            probes.append(_gaussian_probes(m, g))
    elif source == "type1":
        m = TypeI(float(cfg["h1"]), float(cfg["h2"]), float(cfg.get("c", 1.0)))
        for g in gammas:
            theory.append(spectra.H_of_gamma(m, g).H)
            probes.append(_gaussian_probes(m, g))
    else:
        raise ConfigError(f"unknown classify model {source!r}")

    for gi, g in enumerate(gammas):
        if not estimate:
            H_hats.append(None)
            stderrs.append(0.0)
            continue
        ladder = [n for n in (2, 3, 4, 6, 8, 12, 16, 24, 32) if n <= size // 2 and n**g <= size // 2]
        ladder = ladder[-6:]
        if len(ladder) < 3:
            raise ConfigError(f"field size {size} too small for a ladder at gamma={g}")
        flds = []
        for i in range(n_fields):
            if source in ("3n", "4n"):
                walk = _walk(source)
                spec = stable_limits.StableLimitSpec(
                    walk,
                    float(cfg.get("alpha", 2.0)),
                    stable_limits.MixingLaw(float(cfg.get("beta", 0.3))),
                    g,
                )
                flds.append(
                    fields.aggregate_field(
                        walk, spec, int(cfg.get("components", 16)), size, size,
                        seed=seed + 1000 * gi + i, tol=float(cfg.get("tol", 1e-6)),
                    )
                )
            else:
                mobj = (
                    TypeII(float(cfg.get("d1", 0.2)), float(cfg.get("d2", 0.2)))
                    if source == "type2"
                    else TypeI(float(cfg["h1"]), float(cfg["h2"]), float(cfg.get("c", 1.0)))
                )
                flds.append(
                    fields.simulate_gaussian_spectral(
                        mobj, size, size, seed=seed + 1000 * gi + i
                    )
                )
        est = fields.estimate_H(flds, g, ladder)
        H_hats.append(est.H_hat)
        stderrs.append(est.stderr)

    verdict, g0, nondeg = classify(gammas, theory, H_hats, stderrs, probes)
    for g, th, hh, se, pr, nd in zip(gammas, theory, H_hats, stderrs, probes, nondeg):
        rows.append(
            (g, th, hh if hh is not None else float("nan"), se, pr[0], pr[1], int(nd))
        )
    _write_csv(
        os.path.join(out, "classify.csv"),
        ["gamma", "H_theory", "H_hat", "stderr", "probe_horizontal", "probe_vertical", "nondegenerate"],
        rows,
    )
    report = {
        "model": source,
        "gammas": gammas,
        "gamma0_detected": g0,
        "verdict": verdict,
        "ladder": [
            {
                "gamma": g,
                "H_theory": th,
                "H_hat": hh,
                "stderr": se,
                "nondegenerate": bool(nd),
            }
            for g, th, hh, se, nd in zip(gammas, theory, H_hats, stderrs, nondeg)
        ],
    }
    _write_json(os.path.join(out, "classify.json"), report)
    expect = cfg.get("expect")
    ok = True if expect is None else verdict == expect
    return f"report classify: verdict {verdict} (gamma0 = {g0})", ok


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

COMMANDS = {
    ("green", "eval"): ("green_eval", cmd_green_eval, False),
    ("green", "limit"): ("green_limit", cmd_green_limit, False),
    ("spectra", "var"): ("spectra_var", cmd_spectra_var, False),
    ("spectra", "kappa"): ("spectra_kappa", cmd_spectra_kappa, False),
    ("limits", "jgamma"): ("limits_jgamma", cmd_limits_jgamma, False),
    ("limits", "htable"): ("limits_htable", cmd_limits_htable, False),
    ("cov", "asym"): ("cov_asym", cmd_cov_asym, False),
    ("sim", "gauss"): ("sim_gauss", cmd_sim_gauss, True),
    ("sim", "aggregate"): ("sim_aggregate", cmd_sim_aggregate, True),
    ("estimate", "hurst"): ("estimate_hurst", cmd_estimate_hurst, True),
    ("report", "classify"): ("report_classify", cmd_report_classify, True),
}


def _load_config(path: str | None, section: str) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file {path!r} not found")
    parser = configparser.ConfigParser()
    parser.read(path)
    if section in parser:
        return dict(parser[section])
    return {}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="lrd2d",
        description="Anisotropic long-range dependence experiments on the planar lattice",
    )
    ap.add_argument("group", nargs="?", help="command group (green/spectra/limits/cov/sim/estimate/report)")
    ap.add_argument("action", nargs="?", help="action within the group")
    ap.add_argument("--config", help="INI config file; section name = group_action")
    ap.add_argument("--manifest", help="re-run from a manifest.json (byte-identical outputs)")
    ap.add_argument("--seed", type=int, default=0, help="master seed")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--check", action="store_true", help="exit 5 unless thresholds hold")
    ap.add_argument("--tol", type=float, help="override tolerance where applicable")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="parameter override (repeatable)")
    args = ap.parse_args(argv)

    try:
        if args.manifest:
            with open(args.manifest) as fh:
                man = json.load(fh)
            group, action = man["command"]
            cfg = dict(man["config"])
            seed = man["seed"]
            out = args.out if args.out != "." else man["out"]
        else:
            if not args.group or not args.action:
                ap.print_help()
                return 2
            group, action = args.group, args.action
            if (group, action) not in COMMANDS:
                raise ConfigError(f"unknown subcommand {group} {action}")
            section = f"{group}_{action}"
            cfg = _load_config(args.config, section)
            for kv in args.set:
                if "=" not in kv:
                    raise ConfigError(f"bad --set {kv!r}; expected KEY=VALUE")
                k, v = kv.split("=", 1)
                cfg[k.strip()] = v.strip()
            if args.tol is not None:
                cfg["tol"] = str(args.tol)
            seed = args.seed
            out = args.out
            if out == "." and os.environ.get(fields.SCRATCH_ENV):
                out = fields.scratch_dir()
        os.makedirs(out, exist_ok=True)
        name, fn, needs_seed = COMMANDS[(group, action)]
        summary, ok = fn(cfg, out, seed) if needs_seed else fn(cfg, out)
        _write_json(
            os.path.join(out, "manifest.json"),
            {
                "command": [group, action],
                "config": cfg,
                "seed": seed,
                "out": out,
                "version": __version__,
            },
        )
        print(summary + ("" if ok else "  [check: FAIL]"))
        if args.check and not ok:
            return CHECK_FAIL
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 3
    except (ResourceError, MemoryError) as e:
        print(f"resource error: {e}", file=sys.stderr)
        return 4
    except NumericalError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 4
    except KeyError as e:
        print(f"config error: missing parameter {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
