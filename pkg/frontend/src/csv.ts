/** Minimal CSV reader for the lrd2d artifact schemas.
 *
 * Artifacts are plain comma-separated files with a header row and numeric
 * cells (NaN allowed for masked values, e.g. on a density's singular set);
 * schema mismatches name the offending column so a wrong file fails loudly.
 */

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
  /** column index by name */
  col(name: string): number;
}

export function parseCsv(text: string, source: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${source}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  if (lines.length === 1) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${source}: row ${i} has ${parts.length} cells, expected ${columns.length}`,
      );
    }
    rows.push(
      parts.map((p, j) => {
        const v = Number(p);
        if (Number.isNaN(v) && p.trim() !== "nan" && p.trim() !== "NaN") {
          throw new SchemaError(
            `${source}: column '${columns[j]}' row ${i}: non-numeric cell ${JSON.stringify(p)}`,
          );
        }
        return v;
      }),
    );
  }
  return {
    columns,
    rows,
    col(name: string): number {
      const idx = columns.indexOf(name);
      if (idx < 0) {
        throw new SchemaError(
          `${source}: column '${name}' missing (have: ${columns.join(", ")})`,
        );
      }
      return idx;
    },
  };
}

export function requireColumns(t: Table, names: string[]): number[] {
  return names.map((n) => t.col(n));
}
