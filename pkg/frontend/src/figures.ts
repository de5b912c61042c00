/** The three figure kinds built from benchmark CSVs. */

import { QDIST_COLUMNS, RUN_COLUMNS, SchemaError, Table, numeric, requireColumns } from "./csv.js";
import { groupBy, mean, std } from "./stats.js";
import { ChartSpec, Series, renderChart } from "./svg.js";

export const KINDS = ["learning_curve", "wallclock", "qdist"] as const;
export type FigureKind = (typeof KINDS)[number];

function mergedRows(tables: Table[], required: string[]): Record<string, string>[] {
  const rows: Record<string, string>[] = [];
  for (const table of tables) {
    requireColumns(table, required);
    rows.push(...table.rows);
  }
  if (rows.length === 0) {
    throw new SchemaError("no data rows in input");
  }
  return rows;
}

/** Mean pct-of-optimal vs training step, one series per arm, +/- one std band. */
export function learningCurve(tables: Table[]): ChartSpec {
  const rows = mergedRows(tables, RUN_COLUMNS);
  const series: Series[] = [];
  for (const [arm, armRows] of groupBy(rows, (r) => r.arm!)) {
    const bySteps = groupBy(armRows, (r) => r.step!);
    const steps = [...bySteps.keys()].map(Number).sort((a, b) => a - b);
    const points = steps.map((step) => {
      const pcts = bySteps.get(String(step))!.map((r) => numeric(r, "pct_of_optimal"));
      return { x: step, y: mean(pcts) };
    });
    const band = steps.map((step) => {
      const pcts = bySteps.get(String(step))!.map((r) => numeric(r, "pct_of_optimal"));
      return std(pcts);
    });
    series.push({ label: arm, points, band });
  }
  return {
    title: "Learning speed",
    xLabel: "training steps",
    yLabel: "% of optimal",
    series,
  };
}

/** Mean pct-of-optimal vs mean wall-clock time per checkpoint, per arm. */
export function wallclockCurve(tables: Table[]): ChartSpec {
  const rows = mergedRows(tables, RUN_COLUMNS);
  const series: Series[] = [];
  for (const [arm, armRows] of groupBy(rows, (r) => r.arm!)) {
    const bySteps = groupBy(armRows, (r) => r.step!);
    const steps = [...bySteps.keys()].map(Number).sort((a, b) => a - b);
    const points = steps.map((step) => {
      const bucket = bySteps.get(String(step))!;
      return {
        x: mean(bucket.map((r) => numeric(r, "wall_ms"))),
        y: mean(bucket.map((r) => numeric(r, "pct_of_optimal"))),
      };
    });
    series.push({ label: arm, points });
  }
  return {
    title: "Solution quality vs computation time",
    xLabel: "wall-clock ms",
    yLabel: "% of optimal",
    series,
  };
}

/** Sorted per-state maximum values: mean over seeds at each rank, per arm. */
export function qdistCurve(tables: Table[]): ChartSpec {
  const rows = mergedRows(tables, QDIST_COLUMNS);
  const series: Series[] = [];
  for (const [arm, armRows] of groupBy(rows, (r) => r.arm!)) {
    const bySeed = groupBy(armRows, (r) => r.seed!);
    // restrict to ranks present for every seed so the mean is unbiased
    const depth = Math.min(...[...bySeed.values()].map((seedRows) => seedRows.length));
    const byRank = new Map<number, number[]>();
    for (const seedRows of bySeed.values()) {
      for (const row of seedRows) {
        const rank = numeric(row, "rank");
        if (rank < depth) {
          const bucket = byRank.get(rank) ?? [];
          bucket.push(numeric(row, "max_q"));
          byRank.set(rank, bucket);
        }
      }
    }
    const ranks = [...byRank.keys()].sort((a, b) => a - b);
    series.push({
      label: arm,
      points: ranks.map((rank) => ({ x: rank, y: mean(byRank.get(rank)!) })),
    });
  }
  return {
    title: "Per-state maximum values of explored states",
    xLabel: "state rank (sorted by value)",
    yLabel: "max Q",
    series,
  };
}

export function renderFigure(kind: FigureKind, tables: Table[]): string {
  switch (kind) {
    case "learning_curve":
      return renderChart(learningCurve(tables));
    case "wallclock":
      return renderChart(wallclockCurve(tables));
    case "qdist":
      return renderChart(qdistCurve(tables));
  }
}
