/** End-to-end export: engine token/graph files in, protocol file out.
 *
 * For every (question, document) pair in the token export, the model
 * encodes the pair, piece-level outputs are pooled back to the engine's
 * word positions, the answer span is chosen with the engine's own
 * argmax rule, and the rerank head scores the span twice — once over
 * all span words, once restricted to words linked to the question
 * (gq == 1). The resulting records satisfy the core loader's checks by
 * construction: distributions sum to one over each document's tokens
 * and the recorded span equals the loader's recomputed argmax.
 */

import { MiniTransformer } from "./model.js";
import { poolStates } from "./pooling.js";
import {
  AlignedQuestion,
  ProtocolRecord,
  alignExports,
  readGraphExport,
  readTokenExport,
  writeProtocol,
} from "./protocol.js";
import { selectSpan } from "./span.js";

export interface ExportJob {
  /** Token export JSONL written by the engine. */
  tokensPath: string;
  /** Graph export JSONL written by the engine. */
  graphsPath: string;
  /** Destination for the scorer protocol JSONL. */
  outPath: string;
  /** Model identifier (see MODELS). */
  model?: string;
  /** Seed for the model's deterministic weights. */
  seed?: number;
  /** Questions per processing batch (bounds peak state held at once). */
  batchSize?: number;
  /** Sequence budget in pieces; documents are cut on word boundaries. */
  maxPieces?: number;
  /** Span rule parameters; must match the consuming run's scorer. */
  maxSpanLen?: number;
  allowSingleToken?: boolean;
  /** Compute device; this build only ships cpu kernels. */
  device?: string;
}

export interface TruncationWarning {
  question_id: string;
  doc_id: string;
  dropped_words: number;
}

export interface ExportSummary {
  model: string;
  seed: number;
  device: string;
  questions: number;
  records: number;
  truncated: TruncationWarning[];
  out: string;
}

const DEFAULTS = {
  model: "mini-12",
  seed: 0,
  batchSize: 8,
  maxPieces: 384,
  maxSpanLen: 10,
  allowSingleToken: true,
  device: "cpu",
};

function resolve(job: ExportJob): Required<ExportJob> {
  const full = { ...DEFAULTS, ...job } as Required<ExportJob>;
  if (full.device !== "cpu") {
    throw new Error(`unsupported device ${JSON.stringify(full.device)}; only "cpu" is available`);
  }
  if (!Number.isInteger(full.batchSize) || full.batchSize < 1) {
    throw new Error(`batchSize must be a positive integer, got ${full.batchSize}`);
  }
  if (!Number.isInteger(full.maxPieces) || full.maxPieces < 16) {
    throw new Error(`maxPieces must be an integer >= 16, got ${full.maxPieces}`);
  }
  if (!Number.isInteger(full.seed)) {
    throw new Error(`seed must be an integer, got ${full.seed}`);
  }
  return full;
}

/** Score every document of one question; returns its protocol records. */
function scoreQuestion(
  model: MiniTransformer,
  question: AlignedQuestion,
  job: Required<ExportJob>,
  truncated: TruncationWarning[],
): ProtocolRecord[] {
  const { tokens, graphs } = question;
  const records: ProtocolRecord[] = [];
  tokens.documents.forEach((doc, i) => {
    const encoding = model.encodePair(tokens.question, doc.tokens, job.maxPieces);
    if (encoding.docAlignment.length === 0) {
      throw new Error(
        `question ${tokens.question_id}, document ${doc.doc_id}: ` +
          `no document pieces fit within maxPieces=${job.maxPieces}`,
      );
    }
    if (encoding.droppedWords > 0) {
      truncated.push({
        question_id: tokens.question_id,
        doc_id: doc.doc_id,
        dropped_words: encoding.droppedWords,
      });
    }
    const n = doc.tokens.length;
    const pooled = model.poolToWords(encoding, n);
    const span = selectSpan(
      pooled.pStart,
      pooled.pEnd,
      job.maxSpanLen,
      job.allowSingleToken,
    );
    const wordStates = poolStates(
      encoding.docStates,
      encoding.docAlignment,
      n,
      model.spec.dim,
    );
    const spanWords: number[] = [];
    const linkedSpanWords: number[] = [];
    for (let k = span.l; k <= span.m; k++) {
      spanWords.push(k);
      if (graphs.gq[i][k] === 1) {
        linkedSpanWords.push(k);
      }
    }
    records.push({
      question_id: tokens.question_id,
      doc_id: doc.doc_id,
      p_start: pooled.pStart,
      p_end: pooled.pEnd,
      alpha: pooled.alpha,
      beta: pooled.beta,
      span: [span.l, span.m],
      s3: model.rerankScore(wordStates, spanWords),
      s3_qmasked: model.rerankScore(wordStates, linkedSpanWords),
    });
  });
  return records;
}

/**
 * Run a full export job and write the protocol file.
 *
 * Truncated documents are reported in the summary and via ``log`` (one
 * line each); a question missing from the graph export aborts the job.
 */
export async function runExport(
  job: ExportJob,
  log: (message: string) => void = (m) => console.error(m),
): Promise<ExportSummary> {
  const full = resolve(job);
  const tokens = await readTokenExport(full.tokensPath);
  const graphs = await readGraphExport(full.graphsPath);
  const aligned = alignExports(tokens, graphs);
  const model = new MiniTransformer(full.model, full.seed);

  const records: ProtocolRecord[] = [];
  const truncated: TruncationWarning[] = [];
  for (let start = 0; start < aligned.length; start += full.batchSize) {
    const batch = aligned.slice(start, start + full.batchSize);
    for (const question of batch) {
      const before = truncated.length;
      records.push(...scoreQuestion(model, question, full, truncated));
      for (const warning of truncated.slice(before)) {
        log(
          `warning: question ${warning.question_id}, document ${warning.doc_id}: ` +
            `dropped ${warning.dropped_words} words to fit ${full.maxPieces} pieces`,
        );
      }
    }
  }

  await writeProtocol(records, full.outPath);
  return {
    model: full.model,
    seed: full.seed,
    device: full.device,
    questions: aligned.length,
    records: records.length,
    truncated,
    out: full.outPath,
  };
}
