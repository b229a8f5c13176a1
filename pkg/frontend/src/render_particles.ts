#!/usr/bin/env node
/** Usage: render_particles <artifact-dir> <out.png> */
import { renderParticles } from "./particles.js";

export function main(argv: string[]): number {
  const positional = argv.filter((a) => !a.startsWith("--"));
  if (positional.length < 2) {
    console.error("usage: render_particles <artifact-dir> <out.png>");
    return 2;
  }
  try {
    renderParticles(positional[0], positional[1]);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
  console.log(`wrote ${positional[1]}`);
  return 0;
}

if (import.meta.url === `file://${process.argv[1]}`) {
  process.exit(main(process.argv.slice(2)));
}
