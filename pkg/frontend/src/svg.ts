/** Minimal deterministic SVG chart builder (no runtime dependencies).
 *
 * Output is a pure function of the input series and fixed styling, so
 * re-rendering identical data produces byte-identical files.
 */

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  points: Point[];
  /** Optional +/- band half-width per point (e.g. one standard deviation). */
  band?: number[];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 860;
const HEIGHT = 520;
const MARGIN = { top: 48, right: 170, bottom: 56, left: 72 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(value: number): string {
  if (!Number.isFinite(value)) return "0";
  const rounded = Math.round(value * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    hi = lo + 1;
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((c) => span / c <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-9; t += chosen) {
    ticks.push(Math.round(t * 1e9) / 1e9);
  }
  return ticks;
}

export function renderChart(spec: ChartSpec): string {
  const points = spec.series.flatMap((s) =>
    s.points.flatMap((p, i) => {
      const half = s.band?.[i] ?? 0;
      return [p.y - half, p.y + half].map((y) => ({ x: p.x, y }));
    }),
  );
  let xLo = Math.min(...points.map((p) => p.x));
  let xHi = Math.max(...points.map((p) => p.x));
  let yLo = Math.min(0, ...points.map((p) => p.y));
  let yHi = Math.max(...points.map((p) => p.y));
  if (xLo === xHi) xHi = xLo + 1;
  if (yLo === yHi) yHi = yLo + 1;

  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const sy = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-size="17">${escapeXml(spec.title)}</text>`,
  );

  for (const tick of niceTicks(xLo, xHi)) {
    const x = sx(tick);
    parts.push(`<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`);
    parts.push(
      `<text x="${fmt(x)}" y="${MARGIN.top + plotH + 20}" text-anchor="middle" font-size="12">${fmt(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(yLo, yHi)) {
    const y = sy(tick);
    parts.push(`<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#dddddd"/>`);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="12">${fmt(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#444444"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 14}" text-anchor="middle" font-size="14">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="20" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="14" transform="rotate(-90 20 ${MARGIN.top + plotH / 2})">${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length]!;
    if (series.band && series.points.length > 1) {
      const upper = series.points.map((p, i) => `${fmt(sx(p.x))},${fmt(sy(p.y + (series.band![i] ?? 0)))}`);
      const lower = series.points
        .map((p, i) => `${fmt(sx(p.x))},${fmt(sy(p.y - (series.band![i] ?? 0)))}`)
        .reverse();
      parts.push(`<polygon points="${[...upper, ...lower].join(" ")}" fill="${color}" fill-opacity="0.15"/>`);
    }
    const line = series.points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
    parts.push(`<polyline points="${line}" fill="none" stroke="${color}" stroke-width="1.8" class="series"/>`);
  });

  spec.series.forEach((series, index) => {
    const color = PALETTE[index % PALETTE.length]!;
    const y = MARGIN.top + 14 + index * 20;
    const x = MARGIN.left + plotW + 14;
    parts.push(`<line x1="${x}" y1="${y}" x2="${x + 22}" y2="${y}" stroke="${color}" stroke-width="2.5"/>`);
    parts.push(`<text x="${x + 28}" y="${y + 4}" font-size="13">${escapeXml(series.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
