import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { BioparseError, errorFromExit } from "./errors";

/**
 * The command used to reach the core toolkit. Defaults to the module
 * entry point of an installed `bioparse`; set BIOPARSE_CLI to override
 * (whitespace-separated, e.g. "python3 -m bioparse" or a binary path).
 */
export function cliCommand(): string[] {
  const override = process.env.BIOPARSE_CLI;
  if (override && override.trim().length > 0) {
    return override.trim().split(/\s+/);
  }
  return ["python3", "-m", "bioparse"];
}

/** Run one CLI invocation, returning stdout or throwing a typed error. */
export function runCli(args: string[]): string {
  const [command, ...prefix] = cliCommand();
  const result = spawnSync(command, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 256 * 1024 * 1024,
  });
  if (result.error) {
    throw new BioparseError(
      "internal", `could not launch ${command}: ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw errorFromExit(result.status ?? -1, result.stderr ?? "");
  }
  return result.stdout;
}

/** Run a callback with a private scratch directory, cleaned up after. */
export function withScratchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "bioparse-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
