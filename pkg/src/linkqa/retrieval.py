"""TF-IDF retrieval scores and their knowledge-aided fusion.

The fused score per document is

    s1_hat[i] = s1[i] + wq * sq1[i] + wd * sd1[i]

where the q-link term sq1[i] = sum_k gq[i][k] * alpha[i][k] * s1[i]
re-weights a document by its question-connected tokens, and the d-link
term sd1[i] = sum_k alpha[i][k] * s1[gd[i][k]] pulls in the retrieval
scores of KB-connected documents. None entries of gd contribute nothing.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .corpus import CorpusStats
from .graph import LinkGraphs


@dataclass
class RetrievalScores:
    s1: list[float]
    sq1: list[float]
    sd1: list[float]
    s1_hat: list[float]


def tfidf_cosine(question, doc, stats: CorpusStats) -> float:
    """Cosine of raw-term-frequency x IDF vectors; 0 for empty input.

    Tokens unseen at IDF time get the smoothing floor of 1.0.
    """
    q_tf = Counter(question)
    d_tf = Counter(doc)
    if not q_tf or not d_tf:
        return 0.0
    q_vec = {t: tf * stats.idf_of(t) for t, tf in q_tf.items()}
    d_vec = {t: tf * stats.idf_of(t) for t, tf in d_tf.items()}
    dot = sum(w * d_vec[t] for t, w in q_vec.items() if t in d_vec)
    q_norm = math.sqrt(sum(w * w for w in q_vec.values()))
    d_norm = math.sqrt(sum(w * w for w in d_vec.values()))
    if q_norm == 0.0 or d_norm == 0.0:
        return 0.0
    return dot / (q_norm * d_norm)


def fuse_retrieval(
    s1,
    graphs: LinkGraphs,
    alpha,
    wq: float = 0.5,
    wd: float = 0.5,
) -> RetrievalScores:
    """Fuse baseline scores with q-link and d-link terms.

    ``alpha`` holds one non-negative weight vector per document, each
    normalized over that document's tokens. Raises ValueError when a
    document's alpha/gq/gd lengths disagree.
    """
    if wq < 0 or wd < 0:
        raise ValueError("fusion weights must be non-negative")
    n = len(s1)
    if not (len(graphs.gq) == len(graphs.gd) == len(alpha) == n):
        raise ValueError(
            f"question {graphs.question_id!r}: got {n} scores, "
            f"{len(alpha)} alpha vectors, {len(graphs.gq)} graph rows"
        )
    s1 = list(s1)
    sq1 = []
    sd1 = []
    s1_hat = []
    for i in range(n):
        gq_row, gd_row, a_row = graphs.gq[i], graphs.gd[i], alpha[i]
        if not (len(gq_row) == len(gd_row) == len(a_row)):
            doc_id = graphs.doc_ids[i] if i < len(graphs.doc_ids) else "?"
            raise ValueError(
                f"question {graphs.question_id!r}, document {i} "
                f"({doc_id!r}): alpha length {len(a_row)} vs graph "
                f"lengths {len(gq_row)}/{len(gd_row)}"
            )
        q_term = sum(g * a * s1[i] for g, a in zip(gq_row, a_row))
        d_term = sum(a * s1[j] for j, a in zip(gd_row, a_row) if j is not None)
        sq1.append(q_term)
        sd1.append(d_term)
        s1_hat.append(s1[i] + wq * q_term + wd * d_term)
    return RetrievalScores(s1=s1, sq1=sq1, sd1=sd1, s1_hat=s1_hat)
