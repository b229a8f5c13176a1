/** Readers for the solver's artifact files (pure consumers, no physics). */
import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";

export interface GridData {
  nx: number;
  ny: number;
  values: number[][]; // [i][j], i = x index
  min: number;
  max: number;
}

export interface Meta {
  [key: string]: string;
}

export interface ParticleRow {
  k: number;
  j: number;
  x: number;
  y: number;
  omega: number;
  rho: number;
}

export interface SweepRow {
  h: number;
  eps: number;
  ds: number;
  error: number;
  runtime: number;
  case: string;
}

/** Headerless grid CSV: one line per x index, ny comma-separated values. */
export function readGridCsv(path: string): GridData {
  const lines = readFileSync(path, "utf8").trim().split(/\r?\n/);
  const values = lines.map((line, i) => {
    const row = line.split(",").map(Number);
    if (row.some((v) => Number.isNaN(v))) {
      throw new Error(`${path}: non-numeric value on line ${i + 1}`);
    }
    return row;
  });
  const ny = values[0].length;
  if (values.some((r) => r.length !== ny)) {
    throw new Error(`${path}: ragged rows (expected ${ny} columns)`);
  }
  let min = Infinity;
  let max = -Infinity;
  for (const row of values) {
    for (const v of row) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  return { nx: values.length, ny, values, min, max };
}

/** Flat "key = value" metadata file. */
export function readMeta(path: string): Meta {
  const meta: Meta = {};
  if (!existsSync(path)) return meta;
  for (const raw of readFileSync(path, "utf8").split(/\r?\n/)) {
    const line = raw.trim();
    if (!line || line.startsWith("#") || !line.includes("=")) continue;
    const idx = line.indexOf("=");
    meta[line.slice(0, idx).trim()] = line.slice(idx + 1).trim();
  }
  return meta;
}

export function metaNumber(meta: Meta, keys: string[], fallback: number): number {
  for (const key of keys) {
    const raw = meta[key];
    if (raw !== undefined && raw !== "") {
      const v = Number(raw);
      if (Number.isFinite(v)) return v;
    }
  }
  return fallback;
}

/** Domain extents from either the solve or the landscape meta dialect. */
export function domainFromMeta(meta: Meta): { Lx: number; Ly: number } {
  return {
    Lx: metaNumber(meta, ["domain.Lx", "Lx", "landscape.Lx"], 1.0),
    Ly: metaNumber(meta, ["domain.Ly", "Ly", "landscape.Ly"], 0.25),
  };
}

export function readParticlesCsv(path: string): ParticleRow[] {
  const lines = readFileSync(path, "utf8").trim().split(/\r?\n/);
  if (lines.length < 1 || !lines[0].startsWith("k,")) {
    throw new Error(`${path}: expected header k,j,x,y,omega,rho`);
  }
  return lines.slice(1).map((line) => {
    const [k, j, x, y, omega, rho] = line.split(",").map(Number);
    return { k, j, x, y, omega, rho };
  });
}

export function readSweepCsv(path: string): SweepRow[] {
  const lines = readFileSync(path, "utf8").trim().split(/\r?\n/);
  if (lines[0] !== "h,eps,ds,error,runtime,case") {
    throw new Error(`${path}: expected header h,eps,ds,error,runtime,case`);
  }
  return lines.slice(1).map((line) => {
    const parts = line.split(",");
    return {
      h: Number(parts[0]),
      eps: Number(parts[1]),
      ds: Number(parts[2]),
      error: Number(parts[3]),
      runtime: Number(parts[4]),
      case: parts[5] ?? "",
    };
  });
}

/** Locate a named field CSV inside an artifact directory. */
export function findFieldCsv(dir: string, field?: string): { path: string; field: string } {
  const candidates = field ? [field] : ["u", "z", "h", "c"];
  for (const name of candidates) {
    const path = join(dir, `${name}.csv`);
    if (existsSync(path)) return { path, field: name };
  }
  throw new Error(
    `no ${field ? field + ".csv" : "field CSV (u/z/h/c)"} found in ${dir}`,
  );
}
