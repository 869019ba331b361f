/** Word-to-subword splitting with an alignment map back to word indices.
 *
 * The engine works on whole word tokens; the model works on fixed-width
 * subword pieces. Continuation pieces carry a "##" prefix, wordpiece
 * style, so "colosseum" becomes ["colo", "##sseu", "##m"]. Splitting is
 * purely positional and therefore deterministic and reversible.
 */

/** Maximum characters per piece (before the "##" continuation prefix). */
export const PIECE_WIDTH = 4;

export interface SubwordSequence {
  /** Subword pieces in document order. */
  pieces: string[];
  /** For each piece, the index of the word it came from. */
  wordIndex: number[];
}

/** Split one word into positional pieces of at most PIECE_WIDTH chars. */
export function splitWord(word: string): string[] {
  if (word.length <= PIECE_WIDTH) {
    return [word];
  }
  const pieces: string[] = [];
  for (let start = 0; start < word.length; start += PIECE_WIDTH) {
    const chunk = word.slice(start, start + PIECE_WIDTH);
    pieces.push(start === 0 ? chunk : `##${chunk}`);
  }
  return pieces;
}

/** Split every word, keeping the piece-to-word alignment. */
export function splitWords(words: string[]): SubwordSequence {
  const pieces: string[] = [];
  const wordIndex: number[] = [];
  words.forEach((word, wi) => {
    for (const piece of splitWord(word)) {
      pieces.push(piece);
      wordIndex.push(wi);
    }
  });
  return { pieces, wordIndex };
}

/**
 * Truncate a sequence to at most maxPieces on a word boundary, so no
 * word is ever split across the cut. Returns the kept sequence plus the
 * number of whole words dropped.
 */
export function truncateToWords(
  seq: SubwordSequence,
  maxPieces: number,
): { kept: SubwordSequence; droppedWords: number } {
  if (seq.pieces.length <= maxPieces) {
    return { kept: seq, droppedWords: 0 };
  }
  let cut = maxPieces;
  while (cut > 0 && seq.wordIndex[cut - 1] === seq.wordIndex[cut]) {
    cut--;
  }
  const totalWords = seq.wordIndex.length ? seq.wordIndex[seq.wordIndex.length - 1] + 1 : 0;
  const keptWords = cut > 0 ? seq.wordIndex[cut - 1] + 1 : 0;
  return {
    kept: {
      pieces: seq.pieces.slice(0, cut),
      wordIndex: seq.wordIndex.slice(0, cut),
    },
    droppedWords: totalWords - keptWords,
  };
}
