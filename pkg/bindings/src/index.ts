/**
 * High-level API over the core CLI: encode series into transition-field
 * images, assign quantile states, fetch regime diagnostics, and pool images,
 * all through the core's documented file formats. No numerical logic lives
 * here — results are bit-for-bit what the core computes.
 */

import { join } from "node:path";

import {
  CoreError,
  readFileBytes,
  runCore,
  withTempDir,
  writeMatrixCsv,
  writeSeriesCsv,
} from "./core.js";
import { parseNpy } from "./npy.js";

export { CoreError, coreCommand } from "./core.js";
export { NpyFormatError, parseNpy, type NpyArray } from "./npy.js";

export type ChunkPolicy = "strict" | "near_equal";
export type FallbackPolicy = "error" | "uniform" | "global";
export type EncodeMode = "global" | "temporal";
export type RegimeLabel =
  | "persistent"
  | "mean_reverting"
  | "trending_up"
  | "trending_down"
  | "uniform_like"
  | "mixed";

export interface EncodeOptions {
  /** Number of temporal chunks K (core default: 4). */
  chunks?: number;
  chunkPolicy?: ChunkPolicy;
  fallback?: FallbackPolicy;
  mode?: EncodeMode;
  /** Average-pool each channel down to poolSize x poolSize. */
  poolSize?: number;
}

/** A square image: `entries[i * size + j]` is the pixel at row i, column j. */
export interface FieldImage {
  readonly size: number;
  readonly entries: Float64Array;
}

export interface FieldStack {
  readonly size: number;
  readonly bins: readonly number[];
  readonly channels: readonly Float64Array[];
}

export interface RegimeSummary {
  diag_mass: number;
  upper_mass: number;
  lower_mass: number;
  uniformity_dev: number;
  label: RegimeLabel;
  /** 1-based matrix rows that were substituted rather than estimated. */
  fallback_rows: number[];
}

export interface MatrixReport {
  probs: number[][];
  row_provenance: string[];
  summary: RegimeSummary;
}

export interface ChunkReport extends MatrixReport {
  chunk: number;
  /** Half-open 0-based index range [start, stop) of the chunk. */
  start: number;
  stop: number;
}

export interface PlanCheck {
  T: number;
  Q: number;
  K: number;
  per_chunk_transitions: number;
  required_min: number;
  status: "pass" | "warn";
}

export interface DiagnoseReport {
  states: number[];
  bin_boundaries: number[];
  label_thresholds: Record<string, number>;
  check_plan: PlanCheck;
  global: MatrixReport;
  chunks: ChunkReport[];
}

function seriesArgs(options: EncodeOptions): string[] {
  const args: string[] = [];
  if (options.chunks !== undefined) args.push("--chunks", String(options.chunks));
  if (options.chunkPolicy !== undefined) args.push("--chunk-policy", options.chunkPolicy);
  if (options.fallback !== undefined) args.push("--fallback", options.fallback);
  return args;
}

function splitChannels(shape: readonly number[], data: Float64Array): {
  size: number;
  channels: Float64Array[];
} {
  if (shape.length === 2 && shape[0] === shape[1]) {
    return { size: shape[0]!, channels: [data] };
  }
  if (shape.length === 3 && shape[1] === shape[2]) {
    const size = shape[1]!;
    const channels: Float64Array[] = [];
    for (let r = 0; r < shape[0]!; r++) {
      channels.push(data.slice(r * size * size, (r + 1) * size * size));
    }
    return { size, channels };
  }
  throw new CoreError("protocol", `unexpected image shape (${shape.join(", ")})`, 0);
}

/**
 * Encode a series as one image channel per bin count.
 *
 * Temporal mode (the default) estimates one transition matrix per chunk, so
 * each horizontal band of the image reflects its own era; global mode uses
 * a single whole-series matrix.
 */
export function encodeStack(
  values: ArrayLike<number>,
  bins: readonly number[],
  options: EncodeOptions = {},
): FieldStack {
  if (bins.length === 0) {
    throw new CoreError("invalid-bin-count", "at least one bin count is required", 1);
  }
  return withTempDir((dir) => {
    const input = join(dir, "series.csv");
    const output = join(dir, "field.npy");
    writeSeriesCsv(input, values);
    const args = ["encode", "--input", input, "--output", output, "--format", "npy"];
    for (const Q of bins) args.push("--bins", String(Q));
    args.push(...seriesArgs(options));
    if (options.mode !== undefined) args.push("--mode", options.mode);
    if (options.poolSize !== undefined) args.push("--pool", String(options.poolSize));
    runCore(args);
    const parsed = parseNpy(readFileBytes(output));
    const { size, channels } = splitChannels(parsed.shape, parsed.data);
    return { size, bins: [...bins], channels };
  });
}

/** Encode a single chunked-transition image (one bin count, K chunks). */
export function temporalField(
  values: ArrayLike<number>,
  Q: number,
  K: number,
  options: Omit<EncodeOptions, "chunks" | "mode"> = {},
): FieldImage {
  const stack = encodeStack(values, [Q], { ...options, chunks: K, mode: "temporal" });
  return { size: stack.size, entries: stack.channels[0]! };
}

/** Map each observation to its 1-based quantile state. */
export function assignStates(values: ArrayLike<number>, Q: number): number[] {
  return diagnose(values, Q, { chunks: 1 }).states;
}

/**
 * Full diagnostics: states, bin boundaries, the whole-series and per-chunk
 * transition matrices with row provenance, regime summaries, and the
 * chunk-count guideline check.
 */
export function diagnose(
  values: ArrayLike<number>,
  Q: number,
  options: Omit<EncodeOptions, "mode" | "poolSize"> = {},
): DiagnoseReport {
  return withTempDir((dir) => {
    const input = join(dir, "series.csv");
    writeSeriesCsv(input, values);
    const args = ["diagnose", "--input", input, "--bins", String(Q)];
    args.push(...seriesArgs(options));
    const { record } = runCore(args);
    if (!Array.isArray(record["states"])) {
      throw new CoreError("protocol", "diagnose record has no states array", 0);
    }
    return record as unknown as DiagnoseReport;
  });
}

/** Average-pool a square image down to size x size. */
export function poolImage(image: FieldImage | number[][], size: number): FieldImage {
  let flat: ArrayLike<number>;
  let side: number;
  if (Array.isArray(image)) {
    side = image.length;
    const entries = new Float64Array(side * side);
    image.forEach((row, r) => {
      if (row.length !== side) {
        throw new CoreError(
          "dimension-mismatch",
          `row ${r} has ${row.length} entries, expected ${side}`,
          1,
        );
      }
      entries.set(row, r * side);
    });
    flat = entries;
  } else {
    side = image.size;
    flat = image.entries;
  }
  return withTempDir((dir) => {
    const input = join(dir, "image.csv");
    const output = join(dir, "pooled.npy");
    writeMatrixCsv(input, flat, side, side);
    runCore(["pool", "--input", input, "--size", String(size), "--output", output]);
    const parsed = parseNpy(readFileBytes(output));
    const { size: outSize, channels } = splitChannels(parsed.shape, parsed.data);
    return { size: outSize, entries: channels[0]! };
  });
}
