/** Answer-span selection, byte-compatible with the engine's rule.
 *
 * The engine re-derives the span from the emitted distributions when it
 * loads a protocol file and rejects records that disagree, so this must
 * replicate the exact argmax and tie-breaking: maximize
 * pStart[l] * pEnd[m] over l <= m (or l < m when single-token spans are
 * disallowed) with m - l + 1 <= maxSpanLen; ties resolve to the smaller
 * l, then the smaller m.
 */

export interface SpanChoice {
  l: number;
  m: number;
  score: number;
}

export function selectSpan(
  pStart: number[],
  pEnd: number[],
  maxSpanLen = 10,
  allowSingleToken = true,
): SpanChoice {
  const n = pStart.length;
  if (pEnd.length !== n) {
    throw new Error("pStart and pEnd lengths differ");
  }
  if (n < 1) {
    throw new Error("empty distributions");
  }
  if (maxSpanLen < 1) {
    throw new Error("maxSpanLen must be >= 1");
  }
  let best: SpanChoice | null = null;
  let bestScore = -1.0;
  for (let l = 0; l < n; l++) {
    const first = allowSingleToken ? l : l + 1;
    const last = Math.min(n - 1, l + maxSpanLen - 1);
    for (let m = first; m <= last; m++) {
      const score = pStart[l] * pEnd[m];
      if (score > bestScore) {
        best = { l, m, score };
        bestScore = score;
      }
    }
  }
  if (best === null) {
    throw new Error("no valid span");
  }
  return best;
}
