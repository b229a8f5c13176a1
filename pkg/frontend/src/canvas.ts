/** Software RGB canvas with lines, rectangles and bitmap text. */
import { GLYPH_H, GLYPH_W, glyph } from "./font.js";
import { encodePng } from "./png.js";

export type RGB = [number, number, number];

export const BLACK: RGB = [0, 0, 0];
export const WHITE: RGB = [255, 255, 255];
export const GREY: RGB = [150, 150, 150];
export const LIGHT: RGB = [230, 230, 230];
export const BLUE: RGB = [36, 86, 166];

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number, background: RGB = WHITE) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 3);
    this.fillRect(0, 0, width, height, background);
  }

  set(x: number, y: number, c: RGB): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 3;
    this.pixels[i] = c[0];
    this.pixels[i + 1] = c[1];
    this.pixels[i + 2] = c[2];
  }

  fillRect(x: number, y: number, w: number, h: number, c: RGB): void {
    const x1 = Math.max(0, x);
    const y1 = Math.max(0, y);
    const x2 = Math.min(this.width, x + w);
    const y2 = Math.min(this.height, y + h);
    for (let yy = y1; yy < y2; yy++) {
      for (let xx = x1; xx < x2; xx++) {
        const i = (yy * this.width + xx) * 3;
        this.pixels[i] = c[0];
        this.pixels[i + 1] = c[1];
        this.pixels[i + 2] = c[2];
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, c: RGB): void {
    // Bresenham
    let [xa, ya, xb, yb] = [Math.round(x0), Math.round(y0), Math.round(x1), Math.round(y1)];
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, c);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  marker(x: number, y: number, c: RGB, size = 2): void {
    this.fillRect(Math.round(x) - size + 1, Math.round(y) - size + 1, 2 * size - 1, 2 * size - 1, c);
  }

  text(x: number, y: number, s: string, c: RGB, scale = 1): void {
    let cx = Math.round(x);
    const cy = Math.round(y);
    for (const ch of s) {
      const rows = glyph(ch);
      for (let r = 0; r < GLYPH_H; r++) {
        const row = rows[r] ?? "";
        for (let k = 0; k < GLYPH_W; k++) {
          if (row[k] === "X") {
            this.fillRect(cx + k * scale, cy + r * scale, scale, scale, c);
          }
        }
      }
      cx += (GLYPH_W + 1) * scale;
    }
  }

  toPng(): Buffer {
    return encodePng(this.width, this.height, this.pixels);
  }
}

/** Compact deterministic number label, e.g. 0.025, 1.2e-5, 317. */
export function fmtNum(v: number): string {
  if (v === 0) return "0";
  if (!Number.isFinite(v)) return String(v);
  const a = Math.abs(v);
  let s: string;
  if (a >= 1e4 || a < 1e-3) {
    s = v.toExponential(2).replace(/\.?0+e/, "e");
  } else {
    s = v.toPrecision(3);
    if (s.includes(".")) s = s.replace(/\.?0+$/, "");
  }
  return s;
}
