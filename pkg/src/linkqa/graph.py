"""Per-question link graphs between the question and candidate documents.

For each document two per-token lists are built:

* ``gq[i][k]`` is 1 when token k of document i sits in a KB phrase
  connected to some question phrase, else 0.
* ``gd[i][k]`` is the index of the other document with the most tokens
  KB-connected to token k's phrase (ties to the smallest index), or None.

Two pruning passes keep the graphs informative: question phrases touching
more than t1 distinct documents lose all their edges (they no longer
discriminate), and each document keeps links at no more than t2 token
positions, preferring high-IDF tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import CorpusStats, QuestionInstance
from .kb import TripleStore, match_phrases


@dataclass
class LinkGraphs:
    question_id: str
    doc_ids: tuple[str, ...]
    gq: list[list[int]]
    gd: list[list[int | None]]

    def validate(self, instance: QuestionInstance) -> None:
        """Check structural invariants against the source instance."""
        n = len(instance.documents)
        if len(self.gq) != n or len(self.gd) != n:
            raise ValueError("graph/document count mismatch")
        for i, doc in enumerate(instance.documents):
            if len(self.gq[i]) != len(doc.tokens) or len(self.gd[i]) != len(doc.tokens):
                raise ValueError(f"graph length mismatch for document {i}")
            for k, j in enumerate(self.gd[i]):
                if j is None:
                    continue
                if j == i or not (0 <= j < n):
                    raise ValueError(f"gd[{i}][{k}] = {j} is invalid")


def _document_matches(instance: QuestionInstance, store: TripleStore):
    return [
        match_phrases(doc.tokens, store, doc.phrase_spans)
        for doc in instance.documents
    ]


def build_gq(instance: QuestionInstance, store: TripleStore, t1: int = 10):
    """Question-document lists with t1 pruning.

    A question phrase connected to more than t1 distinct documents has
    all its edges removed before marking tokens.
    """
    if t1 < 1:
        raise ValueError("t1 must be >= 1")
    q_forms = {form for _, _, form in match_phrases(instance.q_tokens, store)}
    doc_matches = _document_matches(instance, store)

    doc_counts = dict.fromkeys(q_forms, 0)
    for matches in doc_matches:
        forms_here = {form for _, _, form in matches}
        for qf in q_forms:
            if any(store.connected(df, qf) for df in forms_here):
                doc_counts[qf] += 1
    active = {qf for qf in q_forms if doc_counts[qf] <= t1}

    gq = []
    for doc, matches in zip(instance.documents, doc_matches):
        row = [0] * len(doc.tokens)
        for start, end, form in matches:
            if any(store.connected(form, qf) for qf in active):
                for k in range(start, end + 1):
                    row[k] = 1
        gq.append(row)
    return gq


def build_gd(
    instance: QuestionInstance,
    store: TripleStore,
    stats: CorpusStats,
    t2: int = 10,
):
    """Document-document lists with t2 pruning.

    For a token inside a matched phrase, every other document j scores
    |T(j)| = the number of its token positions whose phrase connects to
    this one; the token links to the argmax (smallest j on ties) or None
    when every T(j) is empty. Each document then keeps links at no more
    than t2 positions, preferring high-IDF tokens (ties to the smaller
    position).
    """
    if t2 < 1:
        raise ValueError("t2 must be >= 1")
    doc_matches = _document_matches(instance, store)
    n_docs = len(instance.documents)

    gd: list[list[int | None]] = []
    for i, doc in enumerate(instance.documents):
        row: list[int | None] = [None] * len(doc.tokens)
        for start, end, form in doc_matches[i]:
            best_j = None
            best_size = 0
            for j in range(n_docs):
                if j == i:
                    continue
                size = sum(
                    e - s + 1
                    for s, e, other in doc_matches[j]
                    if store.connected(form, other)
                )
                if size > best_size:
                    best_j, best_size = j, size
            if best_j is not None:
                for k in range(start, end + 1):
                    row[k] = best_j

        linked = [k for k, v in enumerate(row) if v is not None]
        if len(linked) > t2:
            keep = sorted(linked, key=lambda k: (-stats.idf_of(doc.tokens[k]), k))
            for k in keep[t2:]:
                row[k] = None
        gd.append(row)
    return gd


def build_graphs(
    instance: QuestionInstance,
    store: TripleStore,
    stats: CorpusStats,
    t1: int = 10,
    t2: int = 10,
) -> LinkGraphs:
    graphs = LinkGraphs(
        question_id=instance.question_id,
        doc_ids=tuple(d.doc_id for d in instance.documents),
        gq=build_gq(instance, store, t1),
        gd=build_gd(instance, store, stats, t2),
    )
    graphs.validate(instance)
    return graphs


def graphs_to_record(graphs: LinkGraphs) -> dict:
    """JSON-safe export record; None links encode as -1."""
    return {
        "question_id": graphs.question_id,
        "gq": graphs.gq,
        "gd": [[-1 if v is None else v for v in row] for row in graphs.gd],
    }


def write_graphs(graphs_iter, path) -> int:
    """Write one JSON object per question; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for graphs in graphs_iter:
            fh.write(json.dumps(graphs_to_record(graphs)) + "\n")
            count += 1
    return count
