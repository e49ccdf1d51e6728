/** The five figure kinds rendered from lrd2d artifacts.  Display only: every
 * number is read from the input files, nothing is recomputed. */

import { parseCsv, requireColumns, SchemaError, Table } from "./csv.js";
import {
  axes,
  document as svgDoc,
  el,
  fmt,
  heatColor,
  H,
  linearScale,
  logScale,
  MARGIN,
  polyline,
  text,
  W,
} from "./svg.js";

const PLOT = {
  x0: MARGIN.left,
  x1: W - MARGIN.right,
  y0: H - MARGIN.bottom,
  y1: MARGIN.top,
};

function finiteExtent(vals: number[], source: string): [number, number] {
  const xs = vals.filter((v) => Number.isFinite(v));
  if (xs.length === 0) throw new SchemaError(`${source}: no finite values`);
  return [Math.min(...xs), Math.max(...xs)];
}

/** density_surface.csv (x,y,value) -> log-intensity heat map */
export function densitySurface(csv: string, source = "density_surface.csv"): string {
  const t = parseCsv(csv, source);
  const [cx, cy, cv] = requireColumns(t, ["x", "y", "value"]);
  const xs = Array.from(new Set(t.rows.map((r) => r[cx]))).sort((a, b) => a - b);
  const ys = Array.from(new Set(t.rows.map((r) => r[cy]))).sort((a, b) => a - b);
  const logs = t.rows.map((r) => (Number.isFinite(r[cv]) && r[cv] > 0 ? Math.log10(r[cv]) : NaN));
  const [lo, hi] = finiteExtent(logs, source);
  const sx = linearScale(xs[0], xs[xs.length - 1], PLOT.x0, PLOT.x1);
  const sy = linearScale(ys[0], ys[ys.length - 1], PLOT.y0, PLOT.y1);
  const cw = (PLOT.x1 - PLOT.x0) / Math.max(xs.length - 1, 1);
  const ch = (PLOT.y0 - PLOT.y1) / Math.max(ys.length - 1, 1);
  const cells: string[] = [];
  t.rows.forEach((r, i) => {
    const l = logs[i];
    if (!Number.isFinite(l)) return;
    const u = (l - lo) / (hi - lo || 1);
    cells.push(
      el("rect", {
        x: sx(r[cx]) - cw / 2,
        y: sy(r[cy]) - ch / 2,
        width: cw + 0.5,
        height: ch + 0.5,
        fill: heatColor(u),
      }),
    );
  });
  const body =
    cells.join("\n") +
    "\n" +
    axes(sx, sy, "frequency x", "frequency y", "spectral density (log10 color scale)");
  return svgDoc(body);
}

/** green_limit.csv (lambda, rescaled_green, limit_kernel, rel_err) -> log-log ladder */
export function greenLadder(csv: string, source = "green_limit.csv"): string {
  const t = parseCsv(csv, source);
  const [cl, , , ce] = requireColumns(t, [
    "lambda",
    "rescaled_green",
    "limit_kernel",
    "rel_err",
  ]);
  const rows = [...t.rows].sort((a, b) => a[cl] - b[cl]);
  const errs = rows.map((r) => Math.max(r[ce], 1e-16));
  const [elo, ehi] = finiteExtent(errs, source);
  const sx = logScale(rows[0][cl], rows[rows.length - 1][cl], PLOT.x0, PLOT.x1);
  const sy = logScale(Math.min(elo, ehi / 10), Math.max(ehi, elo * 10), PLOT.y0, PLOT.y1);
  const pts = rows.map((r, i) => [sx(r[cl]), sy(errs[i])] as [number, number]);
  const body =
    axes(sx, sy, "lambda", "relative error", "scaling-limit ladder") +
    "\n" +
    polyline(pts, "#1f77b4", 2) +
    "\n" +
    pts.map(([x, y]) => el("circle", { cx: x, cy: y, r: 3.5, fill: "#1f77b4" })).join("\n");
  return svgDoc(body);
}

/** jgamma_ladder.csv (n, value, rel_gap) + jgamma.json -> convergence curve */
export function jgammaCurve(csv: string, json: string, source = "jgamma_ladder.csv"): string {
  const t = parseCsv(csv, source);
  const [cn, cv] = requireColumns(t, ["n", "value", "rel_gap"]);
  let ref: { J_gamma: number; model?: string; gamma?: number };
  try {
    ref = JSON.parse(json);
  } catch (e) {
    throw new SchemaError(`jgamma.json: ${String(e)}`);
  }
  if (typeof ref.J_gamma !== "number") {
    throw new SchemaError("jgamma.json: field 'J_gamma' missing or not a number");
  }
  const rows = [...t.rows].sort((a, b) => a[cn] - b[cn]);
  const vals = rows.map((r) => r[cv]).concat([ref.J_gamma]);
  const [vlo, vhi] = finiteExtent(vals, source);
  const pad = 0.1 * (vhi - vlo || Math.abs(vhi) || 1);
  const sx = logScale(rows[0][cn], rows[rows.length - 1][cn], PLOT.x0, PLOT.x1);
  const sy = linearScale(vlo - pad, vhi + pad, PLOT.y0, PLOT.y1);
  const pts = rows.map((r) => [sx(r[cn]), sy(r[cv])] as [number, number]);
  const refY = sy(ref.J_gamma);
  const body =
    axes(sx, sy, "n", "J_n", "discrete functional J_n against its limit") +
    "\n" +
    polyline([[PLOT.x0, refY], [PLOT.x1, refY]], "#d62728", 1.5, "6,4") +
    "\n" +
    text(PLOT.x1 - 4, refY - 6, `J = ${fmt(ref.J_gamma)}`, "end", 11) +
    "\n" +
    polyline(pts, "#1f77b4", 2) +
    "\n" +
    pts.map(([x, y]) => el("circle", { cx: x, cy: y, r: 3.5, fill: "#1f77b4" })).join("\n");
  return svgDoc(body);
}

/** classify.csv (gamma, H_theory, H_hat, stderr, ...) -> theory vs estimates */
export function hurstFigure(csv: string, source = "classify.csv"): string {
  const t = parseCsv(csv, source);
  const [cg, cth, chh, cse] = requireColumns(t, ["gamma", "H_theory", "H_hat", "stderr"]);
  const rows = [...t.rows].sort((a, b) => a[cg] - b[cg]);
  const hs = rows
    .flatMap((r) => [r[cth], r[chh] + 2 * r[cse], r[chh] - 2 * r[cse]])
    .filter((v) => Number.isFinite(v));
  const [hlo, hhi] = finiteExtent(hs, source);
  const pad = 0.1 * (hhi - hlo || 1);
  const sx = linearScale(rows[0][cg], rows[rows.length - 1][cg], PLOT.x0, PLOT.x1);
  const sy = linearScale(hlo - pad, hhi + pad, PLOT.y0, PLOT.y1);
  const theory = rows.map((r) => [sx(r[cg]), sy(r[cth])] as [number, number]);
  const marks: string[] = [];
  for (const r of rows) {
    if (!Number.isFinite(r[chh])) continue;
    const px = sx(r[cg]);
    marks.push(polyline([[px, sy(r[chh] - 2 * r[cse])], [px, sy(r[chh] + 2 * r[cse])]], "#2ca02c", 1.5));
    marks.push(el("circle", { cx: px, cy: sy(r[chh]), r: 4, fill: "#2ca02c" }));
  }
  const body =
    axes(sx, sy, "gamma", "H(gamma)", "scaling exponent: theory line, estimates with 2 se bars") +
    "\n" +
    polyline(theory, "#d62728", 2) +
    "\n" +
    marks.join("\n");
  return svgDoc(body);
}

/** cov_asym.csv (lambda, scaled_cov, limit_value, rel_err) -> ratio plot */
export function covRatio(csv: string, source = "cov_asym.csv"): string {
  const t = parseCsv(csv, source);
  const [cl, cs, cv] = requireColumns(t, ["lambda", "scaled_cov", "limit_value"]);
  const rows = [...t.rows].sort((a, b) => a[cl] - b[cl]);
  const ratios = rows.map((r) => r[cs] / r[cv]);
  const [rlo, rhi] = finiteExtent(ratios.concat([1.0]), source);
  const pad = Math.max(0.05, 0.2 * (rhi - rlo));
  const sx = logScale(rows[0][cl], rows[rows.length - 1][cl], PLOT.x0, PLOT.x1);
  const sy = linearScale(rlo - pad, rhi + pad, PLOT.y0, PLOT.y1);
  const pts = rows.map((r, i) => [sx(r[cl]), sy(ratios[i])] as [number, number]);
  const oneY = sy(1.0);
  const body =
    axes(sx, sy, "lambda", "scaled covariance / limit", "covariance asymptotics ratio") +
    "\n" +
    polyline([[PLOT.x0, oneY], [PLOT.x1, oneY]], "#d62728", 1.5, "6,4") +
    "\n" +
    polyline(pts, "#1f77b4", 2) +
    "\n" +
    pts.map(([x, y]) => el("circle", { cx: x, cy: y, r: 3.5, fill: "#1f77b4" })).join("\n");
  return svgDoc(body);
}
