/** Log-log convergence plot with fitted slope annotation. */
import { existsSync, readdirSync, statSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { BLACK, BLUE, Canvas, fmtNum, LIGHT } from "./canvas.js";
import { readSweepCsv, SweepRow } from "./csvdata.js";
import { fitLogLog } from "./fit.js";

const MARGIN_LEFT = 80;
const MARGIN_RIGHT = 30;
const MARGIN_TOP = 30;
const MARGIN_BOTTOM = 50;
const PLOT_W = 460;
const PLOT_H = 320;

const AXES = ["h", "eps", "ds"] as const;
type Axis = (typeof AXES)[number];

/** Pick the parameter column that actually varies across the sweep. */
export function varyingAxis(rows: SweepRow[]): Axis {
  let best: Axis = "eps";
  let bestSpread = -Infinity;
  for (const axis of AXES) {
    const vals = rows.map((r) => r[axis]);
    const spread = Math.max(...vals) / Math.min(...vals);
    if (spread > bestSpread) {
      bestSpread = spread;
      best = axis;
    }
  }
  return best;
}

export interface LogLogResult {
  slope: number;
  used: number;
  skipped: number;
  axis: Axis;
}

/** Resolve a sweep CSV from a path that may be a file or an artifact dir. */
export function resolveSweepCsv(input: string, protocol?: string): string {
  if (existsSync(input) && statSync(input).isFile()) return input;
  if (!existsSync(input)) throw new Error(`no such file or directory: ${input}`);
  if (protocol) {
    const path = join(input, `sweep_${protocol}.csv`);
    if (!existsSync(path)) throw new Error(`no sweep_${protocol}.csv in ${input}`);
    return path;
  }
  const names = readdirSync(input).filter((n) => /^sweep_.*\.csv$/.test(n)).sort();
  if (!names.length) throw new Error(`no sweep_*.csv files in ${input}`);
  return join(input, names[0]);
}

export function renderLogLog(input: string, outPath: string, protocol?: string): LogLogResult {
  const csvPath = resolveSweepCsv(input, protocol);
  const rows = readSweepCsv(csvPath);
  const usable: SweepRow[] = [];
  let skipped = 0;
  for (const row of rows) {
    if (Number.isFinite(row.error) && row.error > 0) {
      usable.push(row);
    } else {
      skipped += 1;
      console.warn(`skipping row with non-positive error: ${JSON.stringify(row)}`);
    }
  }
  if (usable.length < 2) {
    throw new Error(`need at least 2 usable rows, got ${usable.length} from ${csvPath}`);
  }

  const axis = varyingAxis(usable);
  const xs = usable.map((r) => r[axis]);
  const ys = usable.map((r) => r.error);
  const { slope } = fitLogLog(xs, ys);

  const lx = xs.map(Math.log10);
  const ly = ys.map(Math.log10);
  const pad = 0.25;
  const xLo = Math.min(...lx) - pad;
  const xHi = Math.max(...lx) + pad;
  const yLo = Math.min(...ly) - pad;
  const yHi = Math.max(...ly) + pad;

  const cv = new Canvas(MARGIN_LEFT + PLOT_W + MARGIN_RIGHT, MARGIN_TOP + PLOT_H + MARGIN_BOTTOM);
  const toPx = (v: number) => MARGIN_LEFT + ((v - xLo) / (xHi - xLo)) * (PLOT_W - 1);
  const toPy = (v: number) => MARGIN_TOP + (1 - (v - yLo) / (yHi - yLo)) * (PLOT_H - 1);

  // decade grid lines with 1e<k> labels
  for (let k = Math.ceil(xLo); k <= Math.floor(xHi); k++) {
    const px = Math.round(toPx(k));
    cv.line(px, MARGIN_TOP, px, MARGIN_TOP + PLOT_H - 1, LIGHT);
    cv.text(px - 12, MARGIN_TOP + PLOT_H + 8, `1e${k}`, BLACK);
  }
  for (let k = Math.ceil(yLo); k <= Math.floor(yHi); k++) {
    const py = Math.round(toPy(k));
    cv.line(MARGIN_LEFT, py, MARGIN_LEFT + PLOT_W - 1, py, LIGHT);
    cv.text(MARGIN_LEFT - 36, py - 3, `1e${k}`, BLACK);
  }
  // frame
  cv.line(MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT + PLOT_W - 1, MARGIN_TOP, BLACK);
  cv.line(MARGIN_LEFT, MARGIN_TOP + PLOT_H - 1, MARGIN_LEFT + PLOT_W - 1, MARGIN_TOP + PLOT_H - 1, BLACK);
  cv.line(MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT, MARGIN_TOP + PLOT_H - 1, BLACK);
  cv.line(MARGIN_LEFT + PLOT_W - 1, MARGIN_TOP, MARGIN_LEFT + PLOT_W - 1, MARGIN_TOP + PLOT_H - 1, BLACK);

  // sort by abscissa for the polyline
  const order = usable.map((_, i) => i).sort((a, b) => lx[a] - lx[b]);
  for (let n = 1; n < order.length; n++) {
    const a = order[n - 1];
    const b = order[n];
    cv.line(toPx(lx[a]), toPy(ly[a]), toPx(lx[b]), toPy(ly[b]), BLUE);
  }
  for (const i of order) {
    cv.marker(toPx(lx[i]), toPy(ly[i]), BLUE, 3);
  }

  const caseName = usable[0].case;
  cv.text(MARGIN_LEFT, 8, `${caseName}: error vs ${axis}`, BLACK);
  cv.text(MARGIN_LEFT + 10, MARGIN_TOP + 10, `slope = ${slope.toFixed(2)}`, BLACK, 2);
  cv.text(MARGIN_LEFT + Math.round(PLOT_W / 2) - 10, MARGIN_TOP + PLOT_H + 26, axis, BLACK);
  cv.text(14, MARGIN_TOP + Math.round(PLOT_H / 2) - 20, "error", BLACK);

  writeFileSync(outPath, cv.toPng());
  return { slope, used: usable.length, skipped, axis };
}
