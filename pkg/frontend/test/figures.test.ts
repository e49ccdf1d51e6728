import { createHash } from "node:crypto";
import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import {
  covRatio,
  densitySurface,
  greenLadder,
  hurstFigure,
  jgammaCurve,
} from "../src/figures.js";
import { renderAll, renderKind } from "../src/cli.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const FIX = path.join(HERE, "fixtures");

function fixture(name: string): string {
  return fs.readFileSync(path.join(FIX, name), "utf8");
}

function sha(s: string): string {
  return createHash("sha256").update(s).digest("hex");
}

describe("figure kinds", () => {
  it("renders the density surface", () => {
    const svg = densitySurface(fixture("density_surface.csv"));
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("spectral density");
    expect(svg).toContain("<rect");
  });

  it("renders the scaling ladder", () => {
    const svg = greenLadder(fixture("green_limit.csv"));
    expect(svg).toContain("scaling-limit ladder");
    expect(svg).toContain("circle");
  });

  it("renders the J_n convergence curve with its reference line", () => {
    const svg = jgammaCurve(fixture("jgamma_ladder.csv"), fixture("jgamma.json"));
    expect(svg).toContain("J_n");
    expect(svg).toContain("stroke-dasharray");
  });

  it("renders theory-vs-estimate exponents", () => {
    const svg = hurstFigure(fixture("classify.csv"));
    expect(svg).toContain("scaling exponent");
  });

  it("renders the covariance ratio plot", () => {
    const svg = covRatio(fixture("cov_asym.csv"));
    expect(svg).toContain("covariance asymptotics ratio");
  });
});

describe("determinism", () => {
  it("is byte-stable across repeated in-process renders", () => {
    for (let i = 0; i < 2; i++) {
      expect(sha(densitySurface(fixture("density_surface.csv")))).toBe(
        sha(densitySurface(fixture("density_surface.csv"))),
      );
      expect(sha(greenLadder(fixture("green_limit.csv")))).toBe(
        sha(greenLadder(fixture("green_limit.csv"))),
      );
    }
  });

  it("is byte-stable across two file-level render passes", () => {
    const tmp = fs.mkdtempSync(path.join(HERE, "tmp-"));
    try {
      const a = path.join(tmp, "a.svg");
      const b = path.join(tmp, "b.svg");
      renderKind("cov-ratio", [path.join(FIX, "cov_asym.csv")], a);
      renderKind("cov-ratio", [path.join(FIX, "cov_asym.csv")], b);
      expect(fs.readFileSync(a)).toEqual(fs.readFileSync(b));
      expect(fs.readFileSync(a, "utf8")).not.toContain(new Date().getFullYear().toString() + "-");
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });
});

describe("schema validation", () => {
  it("names the missing column", () => {
    expect(() => greenLadder("lambda,wrong\n1,2\n", "x.csv")).toThrowError(
      /column 'rescaled_green' missing/,
    );
  });

  it("rejects empty inputs rather than emitting an empty figure", () => {
    expect(() => covRatio("", "empty.csv")).toThrow(SchemaError);
    expect(() => covRatio("lambda,scaled_cov,limit_value,rel_err\n", "empty.csv")).toThrowError(
      /no data rows/,
    );
  });

  it("rejects non-numeric cells with position info", () => {
    expect(() =>
      covRatio("lambda,scaled_cov,limit_value,rel_err\n1,oops,3,4\n", "bad.csv"),
    ).toThrowError(/column 'scaled_cov' row 1/);
  });

  it("rejects a jgamma report without the limit value", () => {
    expect(() => jgammaCurve(fixture("jgamma_ladder.csv"), "{}")).toThrowError(/J_gamma/);
  });
});

describe("render-all driver", () => {
  it("renders every figure kind found in a directory", () => {
    const tmp = fs.mkdtempSync(path.join(HERE, "out-"));
    try {
      const written = renderAll(FIX, tmp);
      expect(written.sort()).toEqual(
        [
          "cov_ratio.svg",
          "density_surface.svg",
          "green_ladder.svg",
          "hurst.svg",
          "jgamma.svg",
        ].sort(),
      );
      for (const f of written) {
        expect(fs.statSync(path.join(tmp, f)).size).toBeGreaterThan(500);
      }
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("errors when nothing is renderable", () => {
    const tmp = fs.mkdtempSync(path.join(HERE, "none-"));
    try {
      expect(() => renderAll(tmp, tmp)).toThrowError(/no renderable artifacts/);
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });
});
