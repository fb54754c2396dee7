import { spawnSync } from "node:child_process";

import { MapGrid, MaskGrid, mapGrid, maskGrid } from "../src/grid";

/** Tiny deterministic PRNG so parity cases reproduce across runs. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform integer in [lo, hi] inclusive. */
export function randInt(next: () => number, lo: number, hi: number): number {
  return lo + Math.floor(next() * (hi - lo + 1));
}

/** Random 8-bit mask; roughly half the bytes are zero, one always set. */
export function randomMaskGrid(next: () => number, maxSide: number): MaskGrid {
  const h = randInt(next, 1, maxSide);
  const w = randInt(next, 1, maxSide);
  const data = new Uint8Array(h * w);
  for (let i = 0; i < data.length; i++) {
    data[i] = next() < 0.5 ? 0 : randInt(next, 1, 255);
  }
  data[randInt(next, 0, data.length - 1)] = 255;
  return maskGrid(h, w, data);
}

/**
 * Random probability map on a coarse value lattice (k/20), which makes
 * threshold ties and argmax ties common enough to matter.
 */
export function randomMapGrid(next: () => number, h: number, w: number): MapGrid {
  const data = new Float32Array(h * w);
  for (let i = 0; i < data.length; i++) {
    data[i] = Math.fround(randInt(next, 0, 20) / 20);
  }
  return mapGrid(h, w, data);
}

/** Deep copy of a grid's buffer, for before/after mutation checks. */
export function snapshot(grid: MaskGrid | MapGrid): number[] {
  return Array.from(grid.data);
}

export function unchanged(grid: MaskGrid | MapGrid, before: number[]): boolean {
  if (grid.data.length !== before.length) {
    return false;
  }
  for (let i = 0; i < before.length; i++) {
    if (!Object.is(grid.data[i], before[i])) {
      return false;
    }
  }
  return true;
}

/**
 * Run a Python snippet that reads JSONL cases from stdin and writes one
 * JSON result per line, using the core library directly. This is the
 * independent side of the parity harness: the bindings go through the
 * CLI and file formats, the reference goes through the library API.
 */
export function pythonReference(script: string, cases: unknown[]): any[] {
  const input = cases.map((c) => JSON.stringify(c)).join("\n") + "\n";
  const result = spawnSync("python3", ["-c", script], {
    input,
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (result.status !== 0) {
    throw new Error(`reference runner failed: ${result.stderr}`);
  }
  const lines = result.stdout.trim().split("\n");
  if (lines.length !== cases.length) {
    throw new Error(`expected ${cases.length} results, got ${lines.length}`);
  }
  return lines.map((line) => JSON.parse(line));
}
