/** Heatmap renderer: field CSV + meta -> PNG with axes and colour bar. */
import { writeFileSync } from "node:fs";
import { join } from "node:path";

import { BLACK, Canvas, fmtNum, GREY, WHITE } from "./canvas.js";
import { colormap } from "./colormap.js";
import { domainFromMeta, findFieldCsv, readGridCsv, readMeta } from "./csvdata.js";

const MARGIN_LEFT = 64;
const MARGIN_RIGHT = 96;
const MARGIN_TOP = 26;
const MARGIN_BOTTOM = 42;
const MAP_WIDTH = 560;

export interface HeatmapOptions {
  field?: string;
}

export function renderHeatmap(artifactDir: string, outPath: string, opts: HeatmapOptions = {}): void {
  const meta = readMeta(join(artifactDir, "meta"));
  const { Lx, Ly } = domainFromMeta(meta);
  const { path, field } = findFieldCsv(artifactDir, opts.field);
  const grid = readGridCsv(path);

  let { min, max } = grid;
  if (!(max > min)) {
    // constant field: spread the bar symmetrically so the scale stays readable
    const pad = Math.max(0.5, Math.abs(min) * 0.05);
    min -= pad;
    max += pad;
  }

  const mapW = MAP_WIDTH;
  const mapH = Math.max(100, Math.round((MAP_WIDTH * Ly) / Lx));
  const width = MARGIN_LEFT + mapW + MARGIN_RIGHT;
  const height = MARGIN_TOP + mapH + MARGIN_BOTTOM;
  const cv = new Canvas(width, height);

  // raster cells, nearest node
  for (let py = 0; py < mapH; py++) {
    const j = Math.min(grid.ny - 1, Math.floor(((mapH - 1 - py) / mapH) * grid.ny));
    for (let px = 0; px < mapW; px++) {
      const i = Math.min(grid.nx - 1, Math.floor((px / mapW) * grid.nx));
      const t = (grid.values[i][j] - min) / (max - min);
      cv.set(MARGIN_LEFT + px, MARGIN_TOP + py, colormap(t));
    }
  }

  frameAndTicks(cv, MARGIN_LEFT, MARGIN_TOP, mapW, mapH, 0, Lx, 0, Ly);
  colorBar(cv, MARGIN_LEFT + mapW + 24, MARGIN_TOP, 18, mapH, min, max);

  const label = meta["case"] ? `${field} (${meta["case"]})` : field;
  cv.text(MARGIN_LEFT, 8, label, BLACK);
  writeFileSync(outPath, cv.toPng());
}

export function frameAndTicks(
  cv: Canvas, x0: number, y0: number, w: number, h: number,
  xLo: number, xHi: number, yLo: number, yHi: number,
): void {
  cv.line(x0, y0, x0 + w - 1, y0, BLACK);
  cv.line(x0, y0 + h - 1, x0 + w - 1, y0 + h - 1, BLACK);
  cv.line(x0, y0, x0, y0 + h - 1, BLACK);
  cv.line(x0 + w - 1, y0, x0 + w - 1, y0 + h - 1, BLACK);

  const nxt = 5;
  for (let k = 0; k <= nxt; k++) {
    const px = x0 + Math.round((k / nxt) * (w - 1));
    cv.line(px, y0 + h - 1, px, y0 + h + 4, BLACK);
    const label = fmtNum(xLo + (k / nxt) * (xHi - xLo));
    cv.text(px - 3 * label.length, y0 + h + 8, label, BLACK);
  }
  const nyt = 2;
  for (let k = 0; k <= nyt; k++) {
    const py = y0 + h - 1 - Math.round((k / nyt) * (h - 1));
    cv.line(x0 - 5, py, x0 - 1, py, BLACK);
    const label = fmtNum(yLo + (k / nyt) * (yHi - yLo));
    cv.text(x0 - 10 - 6 * label.length, py - 3, label, BLACK);
  }
  cv.text(x0 + Math.round(w / 2) - 3, y0 + h + 24, "x", BLACK);
  cv.text(x0 - 40, y0 + Math.round(h / 2) - 14, "y", BLACK);
}

function colorBar(
  cv: Canvas, x0: number, y0: number, w: number, h: number, min: number, max: number,
): void {
  for (let py = 0; py < h; py++) {
    const t = (h - 1 - py) / (h - 1);
    const c = colormap(t);
    for (let px = 0; px < w; px++) {
      cv.set(x0 + px, y0 + py, c);
    }
  }
  cv.line(x0, y0, x0 + w - 1, y0, BLACK);
  cv.line(x0, y0 + h - 1, x0 + w - 1, y0 + h - 1, BLACK);
  cv.line(x0, y0, x0, y0 + h - 1, BLACK);
  cv.line(x0 + w - 1, y0, x0 + w - 1, y0 + h - 1, BLACK);
  cv.text(x0 + w + 4, y0 - 3, fmtNum(max), BLACK);
  cv.text(x0 + w + 4, y0 + Math.round(h / 2) - 3, fmtNum((min + max) / 2), BLACK);
  cv.text(x0 + w + 4, y0 + h - 4, fmtNum(min), BLACK);
}
