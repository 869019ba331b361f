/** JSONL schemas shared with the core engine.
 *
 * Three files cross the boundary:
 *
 * - token export (engine -> exporter): one record per question with the
 *   engine's exact tokenization of the question and each document;
 * - graph export (engine -> exporter): per-question link graphs, gq as
 *   0/1 flags and gd as document indices with -1 for unlinked tokens;
 * - scorer protocol (exporter -> engine): one record per
 *   (question, document) pair with word-level distributions, the span
 *   argmax, and the rerank scores. The engine re-validates everything
 *   on load, so writers must match its tokenization exactly.
 */

import { createReadStream } from "node:fs";
import { writeFile } from "node:fs/promises";
import { createInterface } from "node:readline";

export interface TokenDocument {
  doc_id: string;
  tokens: string[];
}

export interface TokenExportRecord {
  question_id: string;
  question: string[];
  documents: TokenDocument[];
}

export interface GraphExportRecord {
  question_id: string;
  /** Per document: 0/1 per token (linked to the question or not). */
  gq: number[][];
  /** Per document: linked document index per token, -1 when none. */
  gd: number[][];
}

export interface ProtocolRecord {
  question_id: string;
  doc_id: string;
  p_start: number[];
  p_end: number[];
  alpha: number[];
  beta: number[];
  span: [number, number];
  s3: number;
  s3_qmasked: number;
}

/** One question's inputs after joining the two export files. */
export interface AlignedQuestion {
  tokens: TokenExportRecord;
  graphs: GraphExportRecord;
}

async function readJsonl(path: string): Promise<unknown[]> {
  const rows: unknown[] = [];
  const lines = createInterface({
    input: createReadStream(path, { encoding: "utf-8" }),
    crlfDelay: Infinity,
  });
  let lineNo = 0;
  for await (const line of lines) {
    lineNo += 1;
    if (!line.trim()) {
      continue;
    }
    try {
      rows.push(JSON.parse(line));
    } catch (exc) {
      throw new Error(`${path}: line ${lineNo}: invalid JSON (${exc})`);
    }
  }
  return rows;
}

function isStringArray(value: unknown): value is string[] {
  return Array.isArray(value) && value.every((v) => typeof v === "string");
}

function isIntMatrix(value: unknown): value is number[][] {
  return (
    Array.isArray(value) &&
    value.every(
      (row) =>
        Array.isArray(row) && row.every((v) => Number.isInteger(v)),
    )
  );
}

/** Load and validate a token export file. */
export async function readTokenExport(path: string): Promise<TokenExportRecord[]> {
  const records: TokenExportRecord[] = [];
  for (const row of await readJsonl(path)) {
    const obj = row as Partial<TokenExportRecord>;
    if (typeof obj.question_id !== "string" || !isStringArray(obj.question)) {
      throw new Error(`${path}: bad token record for ${JSON.stringify(obj.question_id)}`);
    }
    if (
      !Array.isArray(obj.documents) ||
      !obj.documents.every(
        (d) => typeof d.doc_id === "string" && isStringArray(d.tokens) && d.tokens.length > 0,
      )
    ) {
      throw new Error(`${path}: bad documents for question ${obj.question_id}`);
    }
    records.push(obj as TokenExportRecord);
  }
  return records;
}

/** Load and validate a graph export file. */
export async function readGraphExport(path: string): Promise<GraphExportRecord[]> {
  const records: GraphExportRecord[] = [];
  for (const row of await readJsonl(path)) {
    const obj = row as Partial<GraphExportRecord>;
    if (
      typeof obj.question_id !== "string" ||
      !isIntMatrix(obj.gq) ||
      !isIntMatrix(obj.gd)
    ) {
      throw new Error(`${path}: bad graph record for ${JSON.stringify(obj.question_id)}`);
    }
    records.push(obj as GraphExportRecord);
  }
  return records;
}

/**
 * Join token and graph exports by question id.
 *
 * Every question in the token export must have a graph record whose row
 * shapes match the documents token for token; a missing or mismatched
 * entry aborts the export rather than emitting unscorable records.
 */
export function alignExports(
  tokens: TokenExportRecord[],
  graphs: GraphExportRecord[],
): AlignedQuestion[] {
  const byId = new Map<string, GraphExportRecord>();
  for (const record of graphs) {
    if (byId.has(record.question_id)) {
      throw new Error(`duplicate graph record for question ${record.question_id}`);
    }
    byId.set(record.question_id, record);
  }
  const aligned: AlignedQuestion[] = [];
  for (const record of tokens) {
    const graph = byId.get(record.question_id);
    if (!graph) {
      throw new Error(`no graph record for question ${record.question_id}; aborting`);
    }
    const nDocs = record.documents.length;
    if (graph.gq.length !== nDocs || graph.gd.length !== nDocs) {
      throw new Error(
        `question ${record.question_id}: ${nDocs} documents but ` +
          `${graph.gq.length} gq rows and ${graph.gd.length} gd rows`,
      );
    }
    record.documents.forEach((doc, i) => {
      if (graph.gq[i].length !== doc.tokens.length || graph.gd[i].length !== doc.tokens.length) {
        throw new Error(
          `question ${record.question_id}, document ${doc.doc_id}: ` +
            `graph rows do not match its ${doc.tokens.length} tokens`,
        );
      }
    });
    aligned.push({ tokens: record, graphs: graph });
  }
  return aligned;
}

/** Write protocol records as JSONL (one compact object per line). */
export async function writeProtocol(
  records: ProtocolRecord[],
  path: string,
): Promise<void> {
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  await writeFile(path, records.length ? body + "\n" : "", "utf-8");
}
