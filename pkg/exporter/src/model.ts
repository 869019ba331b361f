/** Seeded stand-in for a pretrained transformer reader.
 *
 * A real checkpoint is out of scope here, so this runs an untrained but
 * architecturally faithful stack: token/position embeddings, 12 layers
 * of scaled dot-product self-attention with residual mixing, a top-layer
 * start/end span head, and per-layer attention maps. Every weight is a
 * pure function of (model id, seed), making exports reproducible to the
 * bit on any platform. Scores carry no learned signal — downstream
 * consumers validate protocol invariants, not answer quality.
 *
 * Attention weights for the engine's alpha come from an early layer and
 * beta from the second-to-last layer; both are read off the [CLS] row
 * and restricted to document positions.
 */

import { poolNormalized, poolSum } from "./pooling.js";
import { seededVector } from "./rand.js";
import { splitWords, truncateToWords } from "./subword.js";

export interface ModelSpec {
  id: string;
  layers: number;
  dim: number;
  /** 1-based layer whose [CLS] attention row becomes alpha. */
  alphaLayer: number;
  /** 1-based layer whose [CLS] attention row becomes beta. */
  betaLayer: number;
}

export const MODELS: Record<string, ModelSpec> = {
  "mini-12": { id: "mini-12", layers: 12, dim: 24, alphaLayer: 3, betaLayer: 11 },
};

/** Piece-level model outputs for one (question, document) pair. */
export interface PairEncoding {
  /** Start/end distributions over document pieces (each sums to 1). */
  pStartPieces: number[];
  pEndPieces: number[];
  /** [CLS] attention over document pieces, renormalized, per role. */
  alphaPieces: number[];
  betaPieces: number[];
  /** Last-layer hidden states of the document pieces. */
  docStates: number[][];
  /** Word index per document piece (after truncation). */
  docAlignment: number[];
  /** Words dropped from the document to fit the sequence budget. */
  droppedWords: number;
}

/** Word-level distributions pooled from a PairEncoding. */
export interface PooledDistributions {
  pStart: number[];
  pEnd: number[];
  alpha: number[];
  beta: number[];
}

function softmax(values: number[]): number[] {
  const top = Math.max(...values);
  const exps = values.map((v) => Math.exp(v - top));
  const total = exps.reduce((acc, v) => acc + v, 0);
  return exps.map((v) => v / total);
}

const POSITION_CAP = 64;
const POSITION_SCALE = 0.3;
const LOGIT_SCALE = 4.0;
const MLP_HIDDEN = 8;

export class MiniTransformer {
  readonly spec: ModelSpec;
  readonly seed: number;
  private readonly gates: number[][];
  private readonly startHead: number[];
  private readonly endHead: number[];
  private readonly gammaHead: number[];
  private readonly mlpW1: number[][];
  private readonly mlpB1: number[];
  private readonly mlpW2: number[];
  private readonly mlpB2: number;

  constructor(modelId: string, seed = 0) {
    const spec = MODELS[modelId];
    if (!spec) {
      throw new Error(
        `unknown model ${JSON.stringify(modelId)}; available: ${Object.keys(MODELS).join(", ")}`,
      );
    }
    this.spec = spec;
    this.seed = seed;
    this.gates = [];
    for (let layer = 1; layer <= spec.layers; layer++) {
      this.gates.push(
        seededVector(`${spec.id}:gate:${layer}`, seed, spec.dim).map(
          (g) => 0.5 + 0.25 * g,
        ),
      );
    }
    this.startHead = seededVector(`${spec.id}:head:start`, seed, spec.dim);
    this.endHead = seededVector(`${spec.id}:head:end`, seed, spec.dim);
    this.gammaHead = seededVector(`${spec.id}:head:gamma`, seed, spec.dim);
    this.mlpW1 = [];
    for (let j = 0; j < MLP_HIDDEN; j++) {
      this.mlpW1.push(seededVector(`${spec.id}:mlp:w1:${j}`, seed, spec.dim));
    }
    this.mlpB1 = seededVector(`${spec.id}:mlp:b1`, seed, MLP_HIDDEN);
    this.mlpW2 = seededVector(`${spec.id}:mlp:w2`, seed, MLP_HIDDEN);
    this.mlpB2 = seededVector(`${spec.id}:mlp:b2`, seed, 1)[0];
  }

  private embed(piece: string, position: number): number[] {
    const tok = seededVector(`${this.spec.id}:piece:${piece}`, this.seed, this.spec.dim);
    const pos = seededVector(
      `${this.spec.id}:pos:${Math.min(position, POSITION_CAP - 1)}`,
      this.seed,
      this.spec.dim,
    );
    return tok.map((v, d) => v + POSITION_SCALE * pos[d]);
  }

  /** One self-attention layer; returns new states and attention rows. */
  private layerStep(
    states: number[][],
    layer: number,
  ): { next: number[][]; attention: number[][] } {
    const { dim } = this.spec;
    const n = states.length;
    const rot = layer % dim;
    const scale = 1 / Math.sqrt(dim);
    const attention: number[][] = [];
    const next: number[][] = [];
    for (let i = 0; i < n; i++) {
      const scores = new Array<number>(n);
      for (let j = 0; j < n; j++) {
        let dot = 0;
        for (let d = 0; d < dim; d++) {
          dot += states[i][(d + rot) % dim] * states[j][d];
        }
        scores[j] = dot * scale;
      }
      attention.push(softmax(scores));
    }
    const gate = this.gates[layer - 1];
    for (let i = 0; i < n; i++) {
      const ctx = new Array<number>(dim).fill(0);
      for (let j = 0; j < n; j++) {
        const w = attention[i][j];
        for (let d = 0; d < dim; d++) {
          ctx[d] += w * states[j][d];
        }
      }
      const out = new Array<number>(dim);
      for (let d = 0; d < dim; d++) {
        out[d] = Math.tanh(states[i][d] + gate[d] * ctx[d]);
      }
      next.push(out);
    }
    return { next, attention };
  }

  /**
   * Encode one (question, document) token pair.
   *
   * The model sequence is [CLS] q-pieces [SEP] doc-pieces; when it would
   * exceed maxPieces the document is truncated on a word boundary.
   */
  encodePair(
    questionTokens: string[],
    docTokens: string[],
    maxPieces = 384,
  ): PairEncoding {
    const question = splitWords(questionTokens);
    const docFull = splitWords(docTokens);
    const budget = Math.max(1, maxPieces - 2 - question.pieces.length);
    const { kept: doc, droppedWords } = truncateToWords(docFull, budget);

    const pieces = ["[CLS]", ...question.pieces, "[SEP]", ...doc.pieces];
    const docOffset = question.pieces.length + 2;
    let states = pieces.map((piece, i) => this.embed(piece, i));

    let alphaRow: number[] = [];
    let betaRow: number[] = [];
    for (let layer = 1; layer <= this.spec.layers; layer++) {
      const { next, attention } = this.layerStep(states, layer);
      if (layer === this.spec.alphaLayer) {
        alphaRow = attention[0].slice(docOffset);
      }
      if (layer === this.spec.betaLayer) {
        betaRow = attention[0].slice(docOffset);
      }
      states = next;
    }

    const docStates = states.slice(docOffset);
    const startLogits = docStates.map(
      (h) => LOGIT_SCALE * h.reduce((acc, v, d) => acc + v * this.startHead[d], 0),
    );
    const endLogits = docStates.map(
      (h) => LOGIT_SCALE * h.reduce((acc, v, d) => acc + v * this.endHead[d], 0),
    );
    const renorm = (row: number[]) => {
      const total = row.reduce((acc, v) => acc + v, 0);
      return row.map((v) => (total > 0 ? v / total : 1 / row.length));
    };
    return {
      pStartPieces: softmax(startLogits),
      pEndPieces: softmax(endLogits),
      alphaPieces: renorm(alphaRow),
      betaPieces: renorm(betaRow),
      docStates,
      docAlignment: doc.wordIndex,
      droppedWords,
    };
  }

  /** Pool a pair encoding back to the engine's word-level arrays. */
  poolToWords(encoding: PairEncoding, wordCount: number): PooledDistributions {
    return {
      pStart: poolSum(encoding.pStartPieces, encoding.docAlignment, wordCount),
      pEnd: poolSum(encoding.pEndPieces, encoding.docAlignment, wordCount),
      alpha: poolNormalized(encoding.alphaPieces, encoding.docAlignment, wordCount),
      beta: poolNormalized(encoding.betaPieces, encoding.docAlignment, wordCount),
    };
  }

  /**
   * Rerank score over selected word positions in (0, 1).
   *
   * Word states are attention-pooled (softmax of a seeded probe over the
   * selected positions) and passed through a small MLP with a sigmoid
   * output. Returns 0 when no position is selected, matching the
   * engine's convention for an empty question-masked span.
   */
  rerankScore(wordStates: number[][], positions: number[]): number {
    if (positions.length === 0) {
      return 0.0;
    }
    const { dim } = this.spec;
    const logits = positions.map((k) =>
      wordStates[k].reduce((acc, v, d) => acc + v * this.gammaHead[d], 0),
    );
    const gamma = softmax(logits);
    const pooled = new Array<number>(dim).fill(0);
    positions.forEach((k, i) => {
      for (let d = 0; d < dim; d++) {
        pooled[d] += gamma[i] * wordStates[k][d];
      }
    });
    let out = this.mlpB2;
    for (let j = 0; j < MLP_HIDDEN; j++) {
      let pre = this.mlpB1[j];
      for (let d = 0; d < dim; d++) {
        pre += this.mlpW1[j][d] * pooled[d];
      }
      out += this.mlpW2[j] * Math.tanh(pre);
    }
    return 1 / (1 + Math.exp(-out));
  }
}
