"""Knowledge-aided reranking of candidate answers.

The fused confidence per document is

    s3_hat[i] = s3[i] + wq * sq3[i] + wd * sd3[i]

with sq3[i] the scorer's question-masked confidence and
sd3[i] = sum over span tokens k (gd[i][k] != None) of
beta[i][k] * s3[gd[i][k]]. Only tokens inside the chosen answer span
contribute, and d-links always pull in the *base* confidence of the
other document, never its fused value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import LinkGraphs


@dataclass
class RerankScores:
    s3: list[float]
    sq3: list[float]
    sd3: list[float]
    s3_hat: list[float]


def fuse_rerank(outputs, graphs: LinkGraphs, wq: float = 0.5, wd: float = 0.5) -> RerankScores:
    """Fuse base rerank confidences with q-link and d-link terms.

    ``outputs`` holds one ScorerOutput per document. Raises ValueError on
    a span outside the document's token range (corrupt scorer output).
    """
    if wq < 0 or wd < 0:
        raise ValueError("fusion weights must be non-negative")
    n = len(outputs)
    if len(graphs.gd) != n:
        raise ValueError(
            f"question {graphs.question_id!r}: {n} scorer outputs vs "
            f"{len(graphs.gd)} graph rows"
        )
    s3 = [out.s3 for out in outputs]
    sq3 = []
    sd3 = []
    s3_hat = []
    for i, out in enumerate(outputs):
        gd_row = graphs.gd[i]
        l, m = out.span
        if not (0 <= l <= m < len(gd_row)):
            doc_id = graphs.doc_ids[i] if i < len(graphs.doc_ids) else "?"
            raise ValueError(
                f"question {graphs.question_id!r}, document {i} ({doc_id!r}): "
                f"span ({l}, {m}) outside {len(gd_row)} tokens"
            )
        d_term = sum(
            out.beta[k] * s3[gd_row[k]]
            for k in range(l, m + 1)
            if gd_row[k] is not None
        )
        sq3.append(out.s3_qmasked)
        sd3.append(d_term)
        s3_hat.append(s3[i] + wq * out.s3_qmasked + wd * d_term)
    return RerankScores(s3=s3, sq3=sq3, sd3=sd3, s3_hat=s3_hat)
