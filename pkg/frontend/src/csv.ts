/** CSV reading and schema validation for the benchmark outputs. */

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  const columns = lines[0]!.split(",");
  const rows = lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(`row ${i + 2}: expected ${columns.length} fields, got ${parts.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((name, j) => {
      row[name] = parts[j]!;
    });
    return row;
  });
  return { columns, rows };
}

/** Throws a SchemaError naming the first missing column. */
export function requireColumns(table: Table, required: string[]): void {
  for (const name of required) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`missing column: ${name}`);
    }
  }
}

export function numeric(row: Record<string, string>, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`column ${column}: not a number: ${row[column]}`);
  }
  return value;
}

/** Columns of the raw benchmark CSV emitted by the experiment runner. */
export const RUN_COLUMNS = [
  "run_id",
  "arm",
  "seed",
  "step",
  "sim_steps",
  "hop_steps",
  "pct_of_optimal",
  "wall_ms",
  "explored_states",
  "propagation_updates",
];

/** Columns of the sorted max-Q distribution CSV. */
export const QDIST_COLUMNS = ["arm", "seed", "rank", "max_q"];
