#!/usr/bin/env node
/** Usage: render_heatmap <artifact-dir> <out.png> [field] */
import { renderHeatmap } from "./heatmap.js";

export function main(argv: string[]): number {
  const positional = argv.filter((a) => !a.startsWith("--"));
  if (positional.length < 2) {
    console.error("usage: render_heatmap <artifact-dir> <out.png> [field]");
    return 2;
  }
  const [dir, out, field] = positional;
  try {
    renderHeatmap(dir, out, { field });
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  console.log(`wrote ${out}`);
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
