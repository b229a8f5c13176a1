/** Least-squares line fit in decimal-log coordinates. */

export interface Fit {
  slope: number;
  intercept: number;
}

export function fitLine(xs: number[], ys: number[]): Fit {
  const n = xs.length;
  if (n < 2) throw new Error("need at least 2 points to fit a slope");
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  if (den === 0) throw new Error("degenerate abscissae: all x equal");
  const slope = num / den;
  return { slope, intercept: my - slope * mx };
}

export function fitLogLog(xs: number[], ys: number[]): Fit {
  return fitLine(xs.map(Math.log10), ys.map(Math.log10));
}
