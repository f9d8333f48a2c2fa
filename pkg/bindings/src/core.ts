/**
 * Subprocess plumbing for the core CLI.
 *
 * The core is any program with the `tmfield` command-line surface; by
 * default `python3 -m tmfield`, overridable with the TMFIELD_CLI environment
 * variable (split on whitespace). All interchange is file-based: series go
 * in as CSV, images come back as NPY or CSV, reports and run records as
 * JSON on stdout. Core failures surface as {@link CoreError} carrying the
 * machine-readable code from the `error[code]: message` stderr line.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export class CoreError extends Error {
  constructor(
    readonly code: string,
    message: string,
    readonly exitCode: number,
  ) {
    super(message);
    this.name = "CoreError";
  }
}

export function coreCommand(): string[] {
  const override = process.env["TMFIELD_CLI"];
  if (override && override.trim().length > 0) {
    return override.trim().split(/\s+/);
  }
  return ["python3", "-m", "tmfield"];
}

export interface CoreResult {
  /** The JSON run record every successful invocation prints to stdout. */
  record: Record<string, unknown>;
  warnings: string[];
}

const ERROR_LINE = /^error\[([^\]]+)\]:\s*(.*)$/;

/** Run the core with the given arguments; throw CoreError on failure. */
export function runCore(args: string[]): CoreResult {
  const [command, ...prefix] = coreCommand();
  const proc = spawnSync(command!, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 1 << 28,
  });
  if (proc.error) {
    throw new CoreError("spawn", `could not run core CLI: ${proc.error.message}`, -1);
  }
  const stderrLines = (proc.stderr ?? "").split("\n").filter((line) => line.length > 0);
  if (proc.status !== 0) {
    for (const line of stderrLines) {
      const match = ERROR_LINE.exec(line);
      if (match) {
        throw new CoreError(match[1]!, match[2]!, proc.status ?? -1);
      }
    }
    throw new CoreError(
      "unknown",
      `core exited with status ${proc.status}: ${proc.stderr}`,
      proc.status ?? -1,
    );
  }
  let record: Record<string, unknown>;
  try {
    record = JSON.parse(proc.stdout) as Record<string, unknown>;
  } catch {
    throw new CoreError("protocol", `core printed no JSON run record: ${proc.stdout}`, 0);
  }
  const warnings = stderrLines.filter((line) => line.startsWith("warning["));
  return { record, warnings };
}

/** Run `fn` with a fresh scratch directory, removed afterwards. */
export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "tmfield-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

/**
 * Write numbers as headerless single-column CSV. JavaScript's default
 * number formatting is the shortest string that round-trips, which the
 * core parses back to the identical double.
 */
export function writeSeriesCsv(path: string, values: ArrayLike<number>): void {
  const lines: string[] = [];
  for (let i = 0; i < values.length; i++) {
    const value = values[i]!;
    if (!Number.isFinite(value)) {
      throw new CoreError("invalid-input", `non-finite value at position ${i}`, 2);
    }
    lines.push(String(value));
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

/** Write a row-major matrix as CSV (the `pool` subcommand's input format). */
export function writeMatrixCsv(
  path: string,
  entries: ArrayLike<number>,
  rows: number,
  cols: number,
): void {
  if (rows * cols !== entries.length) {
    throw new CoreError(
      "invalid-input",
      `matrix of ${entries.length} entries cannot be ${rows}x${cols}`,
      2,
    );
  }
  const lines: string[] = [];
  for (let r = 0; r < rows; r++) {
    const cells: string[] = [];
    for (let c = 0; c < cols; c++) {
      const value = entries[r * cols + c]!;
      if (!Number.isFinite(value)) {
        throw new CoreError("invalid-input", `non-finite entry at (${r}, ${c})`, 2);
      }
      cells.push(String(value));
    }
    lines.push(cells.join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

export function readFileBytes(path: string): Uint8Array {
  return new Uint8Array(readFileSync(path));
}
