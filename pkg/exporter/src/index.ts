/** Public surface of the exporter package. */

export { fnv1a, mulberry32, seededVector } from "./rand.js";
export {
  PIECE_WIDTH,
  SubwordSequence,
  splitWord,
  splitWords,
  truncateToWords,
} from "./subword.js";
export { SpanChoice, selectSpan } from "./span.js";
export { poolNormalized, poolStates, poolSum } from "./pooling.js";
export {
  MODELS,
  MiniTransformer,
  ModelSpec,
  PairEncoding,
  PooledDistributions,
} from "./model.js";
export {
  AlignedQuestion,
  GraphExportRecord,
  ProtocolRecord,
  TokenDocument,
  TokenExportRecord,
  alignExports,
  readGraphExport,
  readTokenExport,
  writeProtocol,
} from "./protocol.js";
export {
  ExportJob,
  ExportSummary,
  TruncationWarning,
  runExport,
} from "./export.js";
export { main, parseJob } from "./cli.js";
