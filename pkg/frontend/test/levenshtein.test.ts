import { describe, expect, it } from "vitest";

import { levenshtein } from "../src/levenshtein.js";
import { mulberry32, randomWord } from "./prng.js";

/** Full-matrix reference over code points, no shortcuts. */
function reference(a: string, b: string): number {
  const xs = Array.from(a);
  const ys = Array.from(b);
  const rows = xs.length + 1;
  const cols = ys.length + 1;
  const d: number[][] = Array.from({ length: rows }, (_, i) =>
    Array.from({ length: cols }, (_, j) => (i === 0 ? j : j === 0 ? i : 0)),
  );
  for (let i = 1; i < rows; i += 1) {
    for (let j = 1; j < cols; j += 1) {
      d[i][j] = Math.min(
        d[i - 1][j] + 1,
        d[i][j - 1] + 1,
        d[i - 1][j - 1] + (xs[i - 1] === ys[j - 1] ? 0 : 1),
      );
    }
  }
  return d[rows - 1][cols - 1];
}

describe("levenshtein", () => {
  it("matches the classic hand examples", () => {
    expect(levenshtein("kitten", "sitting")).toBe(3);
    expect(levenshtein("flaw", "lawn")).toBe(2);
    expect(levenshtein("", "")).toBe(0);
    expect(levenshtein("abc", "")).toBe(3);
    expect(levenshtein("", "abc")).toBe(3);
    expect(levenshtein("abc", "abc")).toBe(0);
    expect(levenshtein("ab", "ba")).toBe(2);
  });

  it("counts code points, not UTF-16 units", () => {
    expect(levenshtein("\u{1F600}a", "a")).toBe(1);
    expect(levenshtein("x\u{1F600}y", "xy")).toBe(1);
    expect(levenshtein("\u{1F600}", "\u{1F603}")).toBe(1);
  });

  it("appending n characters costs exactly n", () => {
    const base = "Dear friend, thank you for writing back so quickly.";
    expect(levenshtein(base, `${base}!!!`)).toBe(3);
    expect(levenshtein(base, `${base} Bye!`)).toBe(5);
  });

  it("agrees with the full-matrix reference on random pairs", () => {
    const rng = mulberry32(0xbead);
    const alphabet = ["a", "b", "c", "\u{1F600}"];
    for (let round = 0; round < 300; round += 1) {
      const a = randomWord(rng, alphabet, 12);
      const b = randomWord(rng, alphabet, 12);
      expect(levenshtein(a, b)).toBe(reference(a, b));
    }
  });

  it("satisfies the metric axioms on random triples", () => {
    const rng = mulberry32(0xfeed);
    const alphabet = ["x", "y", "z"];
    for (let round = 0; round < 200; round += 1) {
      const a = randomWord(rng, alphabet, 10);
      const b = randomWord(rng, alphabet, 10);
      const c = randomWord(rng, alphabet, 10);
      const ab = levenshtein(a, b);
      expect(levenshtein(a, a)).toBe(0);
      expect(ab === 0).toBe(a === b);
      expect(levenshtein(b, a)).toBe(ab);
      expect(levenshtein(a, c)).toBeLessThanOrEqual(ab + levenshtein(b, c));
      expect(ab).toBeGreaterThanOrEqual(Math.abs(a.length - b.length));
      expect(ab).toBeLessThanOrEqual(Math.max(a.length, b.length));
    }
  });
});
