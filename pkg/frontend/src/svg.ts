/** Deterministic SVG assembly: fixed style constants, shortest-stable number
 * formatting, no timestamps or generated ids anywhere, so identical inputs
 * give byte-identical files. */

export const W = 640;
export const H = 440;
export const MARGIN = { left: 64, right: 20, top: 36, bottom: 48 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  const s = x.toPrecision(6);
  // strip trailing zeros without losing exponent notation stability
  return String(Number(s));
}

export interface Scale {
  (x: number): number;
  ticks: number[];
  label(t: number): string;
}

function niceTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => span / c <= n + 1) ?? 10 * mag;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) out.push(Number(v.toPrecision(12)));
  return out;
}

export function linearScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  const span = hi - lo || 1;
  const f = ((x: number) => rlo + ((x - lo) / span) * (rhi - rlo)) as Scale;
  f.ticks = niceTicks(lo, hi);
  f.label = (t) => fmt(t);
  return f;
}

export function logScale(lo: number, hi: number, rlo: number, rhi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const f = ((x: number) => rlo + ((Math.log10(x) - llo) / span) * (rhi - rlo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi) + 1e-9; e++) ticks.push(Math.pow(10, e));
  if (ticks.length < 2) {
    f.ticks = niceTicks(lo, hi, 4);
  } else {
    f.ticks = ticks;
  }
  f.label = (t) => (t >= 1e4 || t < 1e-3 ? `1e${Math.round(Math.log10(t))}` : fmt(t));
  return f;
}

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return body === "" ? `<${tag} ${a}/>` : `<${tag} ${a}>${body}</${tag}>`;
}

export function text(x: number, y: number, s: string, anchor = "middle", size = 12): string {
  return el(
    "text",
    { x, y, "text-anchor": anchor, "font-size": size, "font-family": "sans-serif", fill: "#222" },
    escapeXml(s),
  );
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function polyline(pts: [number, number][], stroke: string, width = 1.5, dash = ""): string {
  const d = pts.map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`).join(" ");
  const attrs: Record<string, string | number> = {
    d,
    fill: "none",
    stroke,
    "stroke-width": width,
  };
  if (dash) attrs["stroke-dasharray"] = dash;
  return el("path", attrs);
}

export function axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, title: string): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(polyline([[x0, y0], [x1, y0]], "#000", 1));
  parts.push(polyline([[x0, y0], [x0, y1]], "#000", 1));
  for (const t of xs.ticks) {
    const px = xs(t);
    if (px < x0 - 1e-6 || px > x1 + 1e-6) continue;
    parts.push(polyline([[px, y0], [px, y0 + 5]], "#000", 1));
    parts.push(text(px, y0 + 18, xs.label(t)));
  }
  for (const t of ys.ticks) {
    const py = ys(t);
    if (py > y0 + 1e-6 || py < y1 - 1e-6) continue;
    parts.push(polyline([[x0 - 5, py], [x0, py]], "#000", 1));
    parts.push(text(x0 - 8, py + 4, ys.label(t), "end", 11));
  }
  parts.push(text((x0 + x1) / 2, H - 12, xLabel));
  parts.push(
    el(
      "text",
      {
        x: 16,
        y: (y0 + y1) / 2,
        "text-anchor": "middle",
        "font-size": 12,
        "font-family": "sans-serif",
        fill: "#222",
        transform: `rotate(-90 16 ${fmt((y0 + y1) / 2)})`,
      },
      escapeXml(yLabel),
    ),
  );
  parts.push(text((x0 + x1) / 2, 20, title, "middle", 14));
  return parts.join("\n");
}

export function document(body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}">\n` +
    `<rect x="0" y="0" width="${W}" height="${H}" fill="#ffffff"/>\n` +
    body +
    "\n</svg>\n"
  );
}

/** fixed two-ramp color map (deep blue -> white -> dark red), t in [0,1] */
export function heatColor(t: number): string {
  const clamp = (v: number) => Math.max(0, Math.min(255, Math.round(v)));
  const u = Math.max(0, Math.min(1, t));
  let r: number, g: number, b: number;
  if (u < 0.5) {
    const s = u / 0.5;
    r = 30 + s * (255 - 30);
    g = 60 + s * (255 - 60);
    b = 150 + s * (255 - 150);
  } else {
    const s = (u - 0.5) / 0.5;
    r = 255;
    g = 255 - s * (255 - 60);
    b = 255 - s * (255 - 40);
  }
  return `rgb(${clamp(r)},${clamp(g)},${clamp(b)})`;
}
