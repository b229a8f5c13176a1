import { describe, expect, it } from "vitest";

import { fitLine, fitLogLog } from "../src/fit.js";

describe("log-log slope fit", () => {
  it("recovers an exact power law", () => {
    const xs = [1e-3, 2e-3, 4e-3, 8e-3];
    const ys = xs.map((x) => 5 * x * x);
    expect(fitLogLog(xs, ys).slope).toBeCloseTo(2.0, 6);
  });

  it("recovers slope 1 with noise-free data", () => {
    const xs = [0.1, 0.2, 0.4];
    expect(fitLogLog(xs, xs).slope).toBeCloseTo(1.0, 12);
  });

  it("rejects a single point", () => {
    expect(() => fitLine([1], [1])).toThrow(/at least 2/);
  });

  it("rejects degenerate abscissae", () => {
    expect(() => fitLine([2, 2], [1, 3])).toThrow(/degenerate/);
  });
});
