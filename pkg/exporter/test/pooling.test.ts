import { describe, expect, it } from "vitest";

import { poolNormalized, poolStates, poolSum } from "../src/pooling.js";

// pieces: [w0, w1a, w1b, w2] -> words 0, 1, 1, 2
const ALIGN = [0, 1, 1, 2];

describe("poolSum", () => {
  it("sums pieces into their word buckets", () => {
    expect(poolSum([0.1, 0.2, 0.3, 0.4], ALIGN, 3)).toEqual([0.1, 0.5, 0.4]);
  });

  it("conserves probability mass", () => {
    const values = [0.15, 0.05, 0.4, 0.4];
    const pooled = poolSum(values, ALIGN, 3);
    const before = values.reduce((a, v) => a + v, 0);
    const after = pooled.reduce((a, v) => a + v, 0);
    expect(Math.abs(after - before)).toBeLessThanOrEqual(1e-12);
  });

  it("leaves words with no surviving pieces at zero", () => {
    expect(poolSum([0.6, 0.4], [0, 0], 3)).toEqual([1.0, 0, 0]);
  });
});

describe("poolNormalized", () => {
  it("renormalizes to total 1 after truncation drops mass", () => {
    const pooled = poolNormalized([0.3, 0.3], [0, 1], 4);
    expect(pooled.reduce((a, v) => a + v, 0)).toBeCloseTo(1.0, 12);
    expect(pooled[0]).toBeCloseTo(0.5, 12);
    expect(pooled[2]).toBe(0);
  });

  it("falls back to uniform on zero mass", () => {
    expect(poolNormalized([], [], 4)).toEqual([0.25, 0.25, 0.25, 0.25]);
  });
});

describe("poolStates", () => {
  it("averages the piece states of each word", () => {
    const states = [
      [2, 4],
      [1, 0],
      [3, 2],
      [5, 6],
    ];
    const pooled = poolStates(states, ALIGN, 3, 2);
    expect(pooled).toEqual([
      [2, 4],
      [2, 1],
      [5, 6],
    ]);
  });

  it("zero-fills words whose pieces were all dropped", () => {
    const pooled = poolStates([[1, 1]], [0], 2, 2);
    expect(pooled[1]).toEqual([0, 0]);
  });
});
