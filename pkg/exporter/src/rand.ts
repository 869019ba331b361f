/** Deterministic hashing and pseudo-random vectors (no I/O, no state). */

/** 32-bit FNV-1a hash of a string. */
export function fnv1a(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193);
  }
  return hash >>> 0;
}

/** Mulberry32 PRNG: fast, seedable, and identical on every platform. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Pseudo-random vector in [-1, 1)^dim keyed by (label, seed). */
export function seededVector(label: string, seed: number, dim: number): number[] {
  const next = mulberry32(fnv1a(label) ^ Math.imul(seed + 1, 0x9e3779b1));
  const vec = new Array<number>(dim);
  for (let d = 0; d < dim; d++) {
    vec[d] = next() * 2 - 1;
  }
  return vec;
}
