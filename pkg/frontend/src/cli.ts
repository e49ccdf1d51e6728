/** Figure renderer CLI.
 *
 *   node dist/cli.js <kind> <input.csv> [extra.json] <output.svg>
 *   node dist/cli.js all <artifact-dir> <output-dir>
 *
 * Kinds: density-surface, green-ladder, jgamma, hurst, cov-ratio.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import {
  covRatio,
  densitySurface,
  greenLadder,
  hurstFigure,
  jgammaCurve,
} from "./figures.js";

function read(p: string): string {
  if (!fs.existsSync(p)) {
    throw new Error(`input ${p} does not exist`);
  }
  return fs.readFileSync(p, "utf8");
}

export function renderKind(kind: string, inputs: string[], out: string): void {
  let svg: string;
  switch (kind) {
    case "density-surface":
      svg = densitySurface(read(inputs[0]), path.basename(inputs[0]));
      break;
    case "green-ladder":
      svg = greenLadder(read(inputs[0]), path.basename(inputs[0]));
      break;
    case "jgamma":
      svg = jgammaCurve(read(inputs[0]), read(inputs[1]), path.basename(inputs[0]));
      break;
    case "hurst":
      svg = hurstFigure(read(inputs[0]), path.basename(inputs[0]));
      break;
    case "cov-ratio":
      svg = covRatio(read(inputs[0]), path.basename(inputs[0]));
      break;
    default:
      throw new Error(`unknown figure kind ${kind}`);
  }
  fs.mkdirSync(path.dirname(path.resolve(out)), { recursive: true });
  fs.writeFileSync(out, svg);
}

const ALL: [string, string[], string][] = [
  ["density-surface", ["density_surface.csv"], "density_surface.svg"],
  ["green-ladder", ["green_limit.csv"], "green_ladder.svg"],
  ["jgamma", ["jgamma_ladder.csv", "jgamma.json"], "jgamma.svg"],
  ["hurst", ["classify.csv"], "hurst.svg"],
  ["cov-ratio", ["cov_asym.csv"], "cov_ratio.svg"],
];

export function renderAll(inDir: string, outDir: string): string[] {
  const written: string[] = [];
  for (const [kind, inputs, outName] of ALL) {
    const paths = inputs.map((f) => path.join(inDir, f));
    if (!paths.every((p) => fs.existsSync(p))) continue;
    renderKind(kind, paths, path.join(outDir, outName));
    written.push(outName);
  }
  if (written.length === 0) {
    throw new Error(`no renderable artifacts found in ${inDir}`);
  }
  return written;
}

function main(argv: string[]): number {
  try {
    if (argv[0] === "all") {
      const written = renderAll(argv[1], argv[2]);
      console.log(`rendered ${written.length} figures: ${written.join(", ")}`);
      return 0;
    }
    const kind = argv[0];
    const out = argv[argv.length - 1];
    const inputs = argv.slice(1, -1);
    if (!kind || inputs.length === 0 || !out) {
      console.error(
        "usage: cli.js <kind> <input...> <output.svg> | cli.js all <in-dir> <out-dir>",
      );
      return 2;
    }
    renderKind(kind, inputs, out);
    console.log(`wrote ${out}`);
    return 0;
  } catch (e) {
    console.error(String(e instanceof Error ? e.message : e));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
