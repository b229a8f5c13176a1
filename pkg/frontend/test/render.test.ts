import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it, vi } from "vitest";

import { renderHeatmap } from "../src/heatmap.js";
import { renderLogLog } from "../src/loglog.js";
import { renderParticles } from "../src/particles.js";
import { pngDimensions } from "../src/png.js";
import { main as heatmapMain } from "../src/render_heatmap.js";
import { main as loglogMain } from "../src/render_loglog.js";
import { main as particlesMain } from "../src/render_particles.js";

const FIXTURES = join(__dirname, "fixtures");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "pffig-"));
}

describe("heatmap", () => {
  it("renders a solve artifact deterministically", () => {
    const dir = tmp();
    const out1 = join(dir, "a.png");
    const out2 = join(dir, "b.png");
    renderHeatmap(join(FIXTURES, "run1"), out1);
    renderHeatmap(join(FIXTURES, "run1"), out2);
    const a = readFileSync(out1);
    expect(Buffer.compare(a, readFileSync(out2))).toBe(0);
    const { width, height } = pngDimensions(a);
    expect(width).toBeGreaterThan(600);
    expect(height).toBeGreaterThan(100);
  });

  it("handles a constant grid with a degenerate colour range", () => {
    const dir = tmp();
    writeFileSync(join(dir, "u.csv"), "1,1,1\n1,1,1\n1,1,1\n");
    writeFileSync(join(dir, "meta"), "domain.Lx = 1.0\ndomain.Ly = 0.25\n");
    const out = join(dir, "const.png");
    renderHeatmap(dir, out);
    expect(pngDimensions(readFileSync(out)).width).toBeGreaterThan(0);
  });

  it("selects landscape fields explicitly", () => {
    const dir = tmp();
    for (const field of ["z", "h", "c"]) {
      const out = join(dir, `${field}.png`);
      renderHeatmap(join(FIXTURES, "land", "step_2"), out, { field });
      expect(pngDimensions(readFileSync(out)).width).toBeGreaterThan(0);
    }
  });
});

describe("particles panel", () => {
  it("renders the dump", () => {
    const out = join(tmp(), "particles.png");
    renderParticles(join(FIXTURES, "run1"), out);
    expect(pngDimensions(readFileSync(out)).width).toBeGreaterThan(0);
  });
});

describe("log-log plot", () => {
  it("annotates an exact power law with slope 2.00", () => {
    const dir = tmp();
    const csv = join(dir, "sweep_x.csv");
    const rows = [-2, -1, 0, 1, 2].map((p) => {
      const eps = 0.0025 * 2 ** p;
      return `0.025,${eps},${4 * eps},${(eps / 0.025) ** 2},1.0,synthetic`;
    });
    writeFileSync(csv, "h,eps,ds,error,runtime,case\n" + rows.join("\n") + "\n");
    const res = renderLogLog(csv, join(dir, "out.png"));
    expect(Math.abs(res.slope - 2.0)).toBeLessThan(0.01);
    expect(res.slope.toFixed(2)).toBe("2.00");
    expect(res.axis).toBe("eps");
  });

  it("skips non-positive rows with a warning", () => {
    const dir = tmp();
    const csv = join(dir, "sweep_x.csv");
    writeFileSync(
      csv,
      "h,eps,ds,error,runtime,case\n" +
        "0.025,0.001,0.004,1e-3,1,flat\n" +
        "0.025,0.002,0.008,nan,1,flat:failed\n" +
        "0.025,0.004,0.016,4e-3,1,flat\n",
    );
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const res = renderLogLog(csv, join(dir, "out.png"));
    expect(res.used).toBe(2);
    expect(res.skipped).toBe(1);
    expect(warn).toHaveBeenCalledOnce();
    warn.mockRestore();
  });

  it("rejects a single usable point", () => {
    const dir = tmp();
    const csv = join(dir, "sweep_x.csv");
    writeFileSync(csv, "h,eps,ds,error,runtime,case\n0.025,0.001,0.004,1e-3,1,flat\n");
    expect(() => renderLogLog(csv, join(dir, "out.png"))).toThrow(/at least 2/);
  });

  it("resolves a sweep from an artifact directory", () => {
    const out = join(tmp(), "c.png");
    const res = renderLogLog(join(FIXTURES, "sweeps"), out, "c");
    expect(res.used).toBe(4);
    expect(Number.isFinite(res.slope)).toBe(true);
  });
});

describe("figure-kind entry points on a completed artifact tree", () => {
  it("all three render without error", () => {
    const dir = tmp();
    expect(heatmapMain([join(FIXTURES, "run1"), join(dir, "u.png")])).toBe(0);
    expect(particlesMain([join(FIXTURES, "run1"), join(dir, "p.png")])).toBe(0);
    expect(loglogMain([join(FIXTURES, "sweeps"), join(dir, "l.png")])).toBe(0);
    expect(heatmapMain([join(FIXTURES, "land", "step_2"), join(dir, "z.png"), "z"])).toBe(0);
    expect(particlesMain([join(FIXTURES, "land", "step_2"), join(dir, "lp.png")])).toBe(0);
  });

  it("bad inputs exit nonzero", () => {
    const dir = tmp();
    expect(heatmapMain([join(FIXTURES, "nonexistent"), join(dir, "x.png")])).toBe(1);
    expect(loglogMain([join(FIXTURES, "run1"), join(dir, "x.png")])).toBe(1);
    expect(heatmapMain([])).toBe(2);
  });
});
