/**
 * Differential tests: everything the binding returns must be bit-for-bit
 * what the core CLI writes, checked against independently driven core runs
 * and against frozen worked-example values.
 */

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import {
  CoreError,
  coreCommand,
  assignStates,
  diagnose,
  encodeStack,
  poolImage,
  temporalField,
} from "../src/index.js";
import { withTempDir, writeSeriesCsv } from "../src/core.js";
import { parseNpy } from "../src/npy.js";

const fixtures = JSON.parse(
  readFileSync(new URL("./fixtures/worked_example.json", import.meta.url), "utf8"),
) as {
  series: number[];
  states: number[];
  global_field: number[][];
  temporal_field: number[][];
};

/** Deterministic 64-bit-ish LCG so the random corpus is reproducible. */
function makeRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32 - 0.5;
  };
}

function flatten(rows: number[][]): Float64Array {
  return Float64Array.from(rows.flat());
}

/** Bitwise equality via the underlying bytes (catches -0 and NaN payloads). */
function expectBitwiseEqual(actual: Float64Array, expected: Float64Array): void {
  expect(actual.length).toBe(expected.length);
  const a = new Uint8Array(actual.buffer, actual.byteOffset, actual.byteLength);
  const b = new Uint8Array(expected.buffer, expected.byteOffset, expected.byteLength);
  expect(Buffer.compare(Buffer.from(a), Buffer.from(b))).toBe(0);
}

/** Drive the core directly (not through the binding) and read its NPY bytes. */
function coreEncodeDirect(values: number[], args: string[]): Float64Array {
  return withTempDir((dir) => {
    const input = join(dir, "series.csv");
    const output = join(dir, "field.npy");
    writeSeriesCsv(input, values);
    const [command, ...prefix] = coreCommand();
    const proc = spawnSync(
      command!,
      [...prefix, "encode", "--input", input, "--output", output, ...args],
      { encoding: "utf8" },
    );
    expect(proc.status, proc.stderr).toBe(0);
    return parseNpy(new Uint8Array(readFileSync(output))).data;
  });
}

describe("worked-example goldens", () => {
  it("reproduces the frozen chunked field through the binding", () => {
    const image = temporalField(fixtures.series, 3, 2, { fallback: "error" });
    expect(image.size).toBe(12);
    expectBitwiseEqual(image.entries, flatten(fixtures.temporal_field));
  });

  it("reproduces the frozen whole-series field through the binding", () => {
    const stack = encodeStack(fixtures.series, [3], {
      mode: "global",
      fallback: "error",
    });
    expect(stack.size).toBe(12);
    expectBitwiseEqual(stack.channels[0]!, flatten(fixtures.global_field));
  });

  it("assigns the frozen quantile states", () => {
    expect(assignStates(fixtures.series, 3)).toEqual(fixtures.states);
  });

  it("labels the two eras differently", () => {
    const report = diagnose(fixtures.series, 3, { chunks: 2, fallback: "error" });
    expect(report.chunks).toHaveLength(2);
    expect(report.chunks[0]!.summary.label).toBe("mean_reverting");
    expect(report.chunks[1]!.summary.label).toBe("trending_up");
    expect(report.bin_boundaries).toEqual([12, 22, 55, 91]);
    expect(report.check_plan.status).toBe("warn");
    expect(report.global.row_provenance).toEqual(["sampled", "sampled", "sampled"]);
  });
});

describe("binding output equals core NPY payload", () => {
  it("matches on 50 random inputs", { timeout: 120_000 }, () => {
    const rng = makeRng(20240814);
    for (let round = 0; round < 50; round++) {
      const T = 16 + Math.floor((rng() + 0.5) * 48); // 16..64
      const values = Array.from({ length: T }, () => rng() * 20);
      const Q = 2 + (round % 5);
      const K = 1 + (round % 3);
      const viaBinding = encodeStack(values, [Q], {
        chunks: K,
        chunkPolicy: "near_equal",
      });
      const direct = coreEncodeDirect(values, [
        "--bins",
        String(Q),
        "--chunks",
        String(K),
        "--chunk-policy",
        "near_equal",
      ]);
      expect(viaBinding.size).toBe(T);
      expectBitwiseEqual(viaBinding.channels[0]!, direct);
    }
  });

  it("splits stacked channels exactly as the payload lays them out", () => {
    const values = fixtures.series;
    const stack = encodeStack(values, [3, 4], { chunks: 2 });
    const direct = coreEncodeDirect(values, [
      "--bins", "3", "--bins", "4", "--chunks", "2",
    ]);
    expect(stack.channels).toHaveLength(2);
    const reassembled = new Float64Array(direct.length);
    stack.channels.forEach((channel, i) => {
      reassembled.set(channel, i * channel.length);
    });
    expectBitwiseEqual(reassembled, direct);
  });
});

describe("pooling through the core", () => {
  it("is the identity at full size and the mean at size 1", () => {
    const matrix = [
      [0.0, 0.25],
      [0.5, 1.0],
    ];
    const same = poolImage(matrix, 2);
    expectBitwiseEqual(same.entries, Float64Array.from([0, 0.25, 0.5, 1]));
    const one = poolImage(matrix, 1);
    expect(one.size).toBe(1);
    expect(one.entries[0]).toBeCloseTo(0.4375, 15);
  });

  it("accepts a FieldImage and shrinks an encoded field", () => {
    const image = temporalField(fixtures.series, 3, 2);
    const pooled = poolImage(image, 4);
    expect(pooled.size).toBe(4);
    for (const value of pooled.entries) {
      expect(value).toBeGreaterThanOrEqual(0);
      expect(value).toBeLessThanOrEqual(1);
    }
  });
});

describe("error mapping", () => {
  it("maps usage errors with their machine code and exit 1", () => {
    try {
      encodeStack(fixtures.series, [3], { chunks: 5 }); // 5 does not divide 12
      expect.unreachable("divisibility violation must throw");
    } catch (error) {
      expect(error).toBeInstanceOf(CoreError);
      const coreError = error as CoreError;
      expect(coreError.code).toBe("divisibility");
      expect(coreError.exitCode).toBe(1);
      expect(coreError.message).toMatch(/divide/);
    }
  });

  it("maps data errors with exit 2", () => {
    try {
      // Strictly increasing series: the first chunk never leaves the lower
      // states, so fallback=error reports an unsampled state.
      encodeStack([1, 2, 3, 4, 5, 6, 7, 8], [4], { chunks: 2, fallback: "error" });
      expect.unreachable("unsampled state must throw");
    } catch (error) {
      const coreError = error as CoreError;
      expect(coreError.code).toBe("unsampled-state");
      expect(coreError.exitCode).toBe(2);
    }
  });

  it("rejects non-finite input before ever invoking the core", () => {
    expect(() => encodeStack([1, NaN, 3], [2])).toThrow(CoreError);
    try {
      encodeStack([1, Infinity, 3], [2]);
    } catch (error) {
      expect((error as CoreError).code).toBe("invalid-input");
    }
  });

  it("rejects bad pool sizes with the core's code", () => {
    try {
      poolImage([[0.5]], 7);
      expect.unreachable("upscaling must throw");
    } catch (error) {
      expect((error as CoreError).code).toBe("invalid-pool-size");
      expect((error as CoreError).exitCode).toBe(1);
    }
  });

  it("rejects ragged matrices locally", () => {
    expect(() => poolImage([[0.1, 0.2], [0.3]], 1)).toThrow(/row 1/);
  });
});
