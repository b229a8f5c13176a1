/** 5x7 bitmap glyphs for axis labels and annotations. */

const G: Record<string, string[]> = {
  " ": ["", "", "", "", "", "", ""],
  "0": [".XXX.", "X...X", "X..XX", "X.X.X", "XX..X", "X...X", ".XXX."],
  "1": ["..X..", ".XX..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  "2": [".XXX.", "X...X", "....X", "...X.", "..X..", ".X...", "XXXXX"],
  "3": [".XXX.", "X...X", "....X", "..XX.", "....X", "X...X", ".XXX."],
  "4": ["...X.", "..XX.", ".X.X.", "X..X.", "XXXXX", "...X.", "...X."],
  "5": ["XXXXX", "X....", "XXXX.", "....X", "....X", "X...X", ".XXX."],
  "6": [".XXX.", "X....", "X....", "XXXX.", "X...X", "X...X", ".XXX."],
  "7": ["XXXXX", "....X", "...X.", "..X..", "..X..", "..X..", "..X.."],
  "8": [".XXX.", "X...X", "X...X", ".XXX.", "X...X", "X...X", ".XXX."],
  "9": [".XXX.", "X...X", "X...X", ".XXXX", "....X", "....X", ".XXX."],
  ".": ["", "", "", "", "", ".XX..", ".XX.."],
  ",": ["", "", "", "", ".XX..", "..X..", ".X..."],
  "-": ["", "", "", ".XXXX", "", "", ""],
  "+": ["", "..X..", "..X..", "XXXXX", "..X..", "..X..", ""],
  "=": ["", "", "XXXXX", "", "XXXXX", "", ""],
  ":": ["", ".XX..", ".XX..", "", ".XX..", ".XX..", ""],
  "/": ["....X", "....X", "...X.", "..X..", ".X...", "X....", "X...."],
  "%": ["XX..X", "XX..X", "...X.", "..X..", ".X...", "X..XX", "X..XX"],
  "(": ["...X.", "..X..", ".X...", ".X...", ".X...", "..X..", "...X."],
  ")": [".X...", "..X..", "...X.", "...X.", "...X.", "..X..", ".X..."],
  "[": [".XXX.", ".X...", ".X...", ".X...", ".X...", ".X...", ".XXX."],
  "]": [".XXX.", "...X.", "...X.", "...X.", "...X.", "...X.", ".XXX."],
  "^": ["..X..", ".X.X.", "X...X", "", "", "", ""],
  _: ["", "", "", "", "", "", "XXXXX"],
  a: ["", "", ".XXX.", "....X", ".XXXX", "X...X", ".XXXX"],
  b: ["X....", "X....", "XXXX.", "X...X", "X...X", "X...X", "XXXX."],
  c: ["", "", ".XXXX", "X....", "X....", "X....", ".XXXX"],
  d: ["....X", "....X", ".XXXX", "X...X", "X...X", "X...X", ".XXXX"],
  e: ["", "", ".XXX.", "X...X", "XXXXX", "X....", ".XXXX"],
  f: ["..XX.", ".X...", "XXXX.", ".X...", ".X...", ".X...", ".X..."],
  g: ["", ".XXXX", "X...X", "X...X", ".XXXX", "....X", ".XXX."],
  h: ["X....", "X....", "XXXX.", "X...X", "X...X", "X...X", "X...X"],
  i: ["..X..", "", ".XX..", "..X..", "..X..", "..X..", ".XXX."],
  j: ["...X.", "", "..XX.", "...X.", "...X.", "X..X.", ".XX.."],
  k: ["X....", "X....", "X..X.", "X.X..", "XX...", "X.X..", "X..X."],
  l: [".XX..", "..X..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  m: ["", "", "XX.X.", "X.X.X", "X.X.X", "X.X.X", "X.X.X"],
  n: ["", "", "XXXX.", "X...X", "X...X", "X...X", "X...X"],
  o: ["", "", ".XXX.", "X...X", "X...X", "X...X", ".XXX."],
  p: ["", "", "XXXX.", "X...X", "XXXX.", "X....", "X...."],
  q: ["", "", ".XXXX", "X...X", ".XXXX", "....X", "....X"],
  r: ["", "", "X.XX.", "XX..X", "X....", "X....", "X...."],
  s: ["", "", ".XXXX", "X....", ".XXX.", "....X", "XXXX."],
  t: [".X...", ".X...", "XXXX.", ".X...", ".X...", ".X..X", "..XX."],
  u: ["", "", "X...X", "X...X", "X...X", "X...X", ".XXXX"],
  v: ["", "", "X...X", "X...X", "X...X", ".X.X.", "..X.."],
  w: ["", "", "X.X.X", "X.X.X", "X.X.X", "X.X.X", ".X.X."],
  x: ["", "", "X...X", ".X.X.", "..X..", ".X.X.", "X...X"],
  y: ["", "X...X", "X...X", ".XXXX", "....X", "X...X", ".XXX."],
  z: ["", "", "XXXXX", "...X.", "..X..", ".X...", "XXXXX"],
  K: ["X...X", "X..X.", "X.X..", "XX...", "X.X..", "X..X.", "X...X"],
};

export const GLYPH_W = 5;
export const GLYPH_H = 7;

/** Pixel rows of a glyph; unknown characters render as a low dash. */
export function glyph(ch: string): string[] {
  return G[ch] ?? G["_"];
}

export function textWidth(text: string, scale = 1): number {
  return text.length * (GLYPH_W + 1) * scale;
}
