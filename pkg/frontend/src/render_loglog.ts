#!/usr/bin/env node
/** Usage: render_loglog <sweep.csv | artifact-dir> <out.png> [protocol] */
import { renderLogLog } from "./loglog.js";

export function main(argv: string[]): number {
  const positional = argv.filter((a) => !a.startsWith("--"));
  if (positional.length < 2) {
    console.error("usage: render_loglog <sweep.csv|artifact-dir> <out.png> [protocol]");
    return 2;
  }
  const [input, out, protocol] = positional;
  try {
    const res = renderLogLog(input, out, protocol);
    console.log(
      `wrote ${out} (axis ${res.axis}, slope ${res.slope.toFixed(2)}, ` +
        `${res.used} points, ${res.skipped} skipped)`,
    );
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
