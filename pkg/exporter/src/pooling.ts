/** Piece-to-word pooling for probabilities, attentions, and states.
 *
 * Probabilities are summed per word, which conserves total mass exactly
 * up to float re-association. Attention weights are summed per word and
 * then renormalized so the word-level vector sums to 1 even after
 * truncation dropped some pieces. Hidden states average their pieces.
 */

/** Sum piece values into wordCount buckets; missing words stay 0. */
export function poolSum(
  values: number[],
  wordIndex: number[],
  wordCount: number,
): number[] {
  const pooled = new Array<number>(wordCount).fill(0);
  for (let i = 0; i < values.length; i++) {
    pooled[wordIndex[i]] += values[i];
  }
  return pooled;
}

/** Sum then renormalize to total 1; uniform fallback for zero mass. */
export function poolNormalized(
  values: number[],
  wordIndex: number[],
  wordCount: number,
): number[] {
  const pooled = poolSum(values, wordIndex, wordCount);
  const total = pooled.reduce((acc, v) => acc + v, 0);
  if (total <= 0) {
    return new Array<number>(wordCount).fill(1 / wordCount);
  }
  return pooled.map((v) => v / total);
}

/** Average piece state vectors per word; dropped words get zeros. */
export function poolStates(
  states: number[][],
  wordIndex: number[],
  wordCount: number,
  dim: number,
): number[][] {
  const pooled = Array.from({ length: wordCount }, () => new Array<number>(dim).fill(0));
  const counts = new Array<number>(wordCount).fill(0);
  for (let i = 0; i < states.length; i++) {
    const wi = wordIndex[i];
    counts[wi]++;
    for (let d = 0; d < dim; d++) {
      pooled[wi][d] += states[i][d];
    }
  }
  for (let wi = 0; wi < wordCount; wi++) {
    if (counts[wi] > 0) {
      for (let d = 0; d < dim; d++) {
        pooled[wi][d] /= counts[wi];
      }
    }
  }
  return pooled;
}
