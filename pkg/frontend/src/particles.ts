/** Particle-position scatter panel from a particles.csv dump. */
import { writeFileSync } from "node:fs";
import { join } from "node:path";

import { BLACK, BLUE, Canvas, GREY } from "./canvas.js";
import { domainFromMeta, readMeta, readParticlesCsv } from "./csvdata.js";
import { frameAndTicks } from "./heatmap.js";

const MARGIN_LEFT = 64;
const MARGIN_RIGHT = 30;
const MARGIN_TOP = 26;
const MARGIN_BOTTOM = 42;
const MAP_WIDTH = 560;

export function renderParticles(artifactDir: string, outPath: string): void {
  const meta = readMeta(join(artifactDir, "meta"));
  const { Lx, Ly } = domainFromMeta(meta);
  const rows = readParticlesCsv(join(artifactDir, "particles.csv"));

  // plot extent covers the extension bands the dump may contain
  let xLo = 0;
  let xHi = Lx;
  for (const r of rows) {
    if (r.x < xLo) xLo = r.x;
    if (r.x > xHi) xHi = r.x;
  }

  const mapW = MAP_WIDTH;
  const mapH = Math.max(100, Math.round((MAP_WIDTH * Ly) / (xHi - xLo)));
  const cv = new Canvas(MARGIN_LEFT + mapW + MARGIN_RIGHT, MARGIN_TOP + mapH + MARGIN_BOTTOM);

  // domain box (the dump extends past it by the kernel radius)
  const toPx = (x: number) => MARGIN_LEFT + ((x - xLo) / (xHi - xLo)) * (mapW - 1);
  const toPy = (y: number) => MARGIN_TOP + (1 - y / Ly) * (mapH - 1);
  cv.line(toPx(0), MARGIN_TOP, toPx(0), MARGIN_TOP + mapH - 1, GREY);
  cv.line(toPx(Lx), MARGIN_TOP, toPx(Lx), MARGIN_TOP + mapH - 1, GREY);

  for (const r of rows) {
    cv.marker(toPx(r.x), toPy(((r.y % Ly) + Ly) % Ly), BLUE, 1);
  }

  frameAndTicks(cv, MARGIN_LEFT, MARGIN_TOP, mapW, mapH, xLo, xHi, 0, Ly);
  cv.text(MARGIN_LEFT, 8, `particles (n = ${rows.length})`, BLACK);
  writeFileSync(outPath, cv.toPng());
}
