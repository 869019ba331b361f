"""Answer scorers: span distributions, attention weights, rerank scores.

Scorers produce one ScorerOutput per (question, document) pair. Two kinds
ship here:

* ``lexical`` — a deterministic in-process scorer driven by IDF-weighted
  question overlap. No model, no files, always available.
* ``file`` — outputs of an external scorer, loaded from a protocol file
  with one JSON object per line:

      {"question_id": str, "doc_id": str,
       "p_start": [...], "p_end": [...],
       "alpha": [...], "beta": [...],
       "span": [l, m], "s3": float, "s3_qmasked": float}

  All arrays align with the engine's token indices. Records are
  re-validated on load: distributions must sum to 1 within 1e-6 and the
  span must equal the engine's own argmax over p_start/p_end.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .corpus import CorpusStats

PROB_TOL = 1e-6


class ScorerFileError(ValueError):
    """A scorer protocol file is malformed, inconsistent, or incomplete."""


@dataclass
class ScorerOutput:
    """Per-document scorer result.

    ``span`` is (l, m) inclusive; ``s2`` is exactly
    p_start[l] * p_end[m]. ``s3_qmasked`` aggregates the rerank score
    only over span tokens connected to the question.
    """

    p_start: list[float]
    p_end: list[float]
    alpha: list[float]
    beta: list[float]
    span: tuple[int, int]
    s2: float
    s3: float
    s3_qmasked: float

    def validate(self) -> None:
        n = len(self.p_start)
        for name in ("p_end", "alpha", "beta"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length != {n}")
        for name in ("p_start", "p_end", "alpha", "beta"):
            vec = getattr(self, name)
            if any(v < 0 for v in vec):
                raise ValueError(f"{name} has negative entries")
            if abs(sum(vec) - 1.0) > PROB_TOL:
                raise ValueError(f"{name} sums to {sum(vec)!r}, not 1")
        l, m = self.span
        if not (0 <= l <= m < n):
            raise ValueError(f"span ({l}, {m}) outside [0, {n})")
        if self.s2 != self.p_start[l] * self.p_end[m]:
            raise ValueError("s2 is not p_start[l] * p_end[m]")


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "lexical"  # "lexical" or "file"
    file_path: str | None = None
    max_span_len: int = 10
    allow_single_token: bool = True

    def __post_init__(self):
        if self.kind not in ("lexical", "file"):
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if (self.file_path is not None) != (self.kind == "file"):
            raise ValueError("file_path is required exactly when kind='file'")
        if self.max_span_len < 1:
            raise ValueError("max_span_len must be >= 1")


def select_span(
    p_start,
    p_end,
    max_span_len: int = 10,
    allow_single_token: bool = True,
) -> tuple[int, int, float]:
    """Argmax of p_start[l] * p_end[m] over spans of bounded length.

    Spans satisfy l <= m (or l < m when single tokens are disallowed) and
    m - l + 1 <= max_span_len. Ties go to the smaller l, then smaller m.
    """
    n = len(p_start)
    if len(p_end) != n:
        raise ValueError("p_start and p_end lengths differ")
    if n < 1:
        raise ValueError("empty distributions")
    if max_span_len < 1:
        raise ValueError("max_span_len must be >= 1")
    best = None
    best_score = -1.0
    for l in range(n):
        first = l if allow_single_token else l + 1
        last = min(n - 1, l + max_span_len - 1)
        for m in range(first, last + 1):
            score = p_start[l] * p_end[m]
            if score > best_score:
                best = (l, m)
                best_score = score
    if best is None:
        raise ValueError("no valid span")
    return best[0], best[1], best_score


def _softmax(values):
    top = max(values)
    exps = [math.exp(v - top) for v in values]
    total = sum(exps)
    return [e / total for e in exps]


def lexical_score(
    question,
    doc,
    gq,
    stats: CorpusStats,
    config: ScorerConfig = ScorerConfig(),
) -> ScorerOutput:
    """Deterministic scorer from IDF-weighted question overlap.

    Each document token gets affinity idf(t), damped by 0.1 when the
    token does not appear in the question. Start/end distributions are
    the softmax of the affinities; alpha and beta are the affinities
    normalized to sum 1.
    """
    doc = list(doc)
    if len(gq) != len(doc):
        raise ValueError(f"gq length {len(gq)} != document length {len(doc)}")
    q_set = set(question)
    affinity = [
        stats.idf_of(t) * (1.0 if t in q_set else 0.1) for t in doc
    ]
    total = sum(affinity)
    n = len(doc)
    if total <= 0.0:
        probs = [1.0 / n] * n
        weights = [1.0 / n] * n
    else:
        probs = _softmax(affinity)
        weights = [a / total for a in affinity]
    l, m, s2 = select_span(probs, probs, config.max_span_len, config.allow_single_token)
    peak = max(affinity)
    if peak > 0.0:
        span_sum = sum(weights[k] * affinity[k] for k in range(l, m + 1)) / peak
        masked_sum = (
            sum(weights[k] * affinity[k] for k in range(l, m + 1) if gq[k] == 1)
            / peak
        )
    else:
        span_sum = masked_sum = 0.0
    out = ScorerOutput(
        p_start=probs,
        p_end=list(probs),
        alpha=weights,
        beta=list(weights),
        span=(l, m),
        s2=s2,
        s3=min(max(span_sum, 0.0), 1.0),
        s3_qmasked=min(max(masked_sum, 0.0), 1.0),
    )
    out.validate()
    return out


def _parse_float_list(value, name, record_id):
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ScorerFileError(f"{record_id}: {name} must be a list of numbers")
    return [float(v) for v in value]


def load_scorer_file(
    path,
    instances,
    max_span_len: int = 10,
    allow_single_token: bool = True,
):
    """Load and validate a scorer protocol file.

    Every (question, document) pair of ``instances`` must be covered
    exactly once, with arrays matching the document's token count. The
    span is recomputed from p_start/p_end and must equal the record's.
    Returns a dict keyed by (question_id, doc_id).
    """
    expected = {}
    for instance in instances:
        for doc in instance.documents:
            expected[(instance.question_id, doc.doc_id)] = len(doc.tokens)

    table: dict[tuple[str, str], ScorerOutput] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScorerFileError(f"line {line_no}: invalid JSON ({exc})") from exc
            qid = obj.get("question_id")
            did = obj.get("doc_id")
            rid = f"line {line_no} ({qid!r}, {did!r})"
            if (qid, did) not in expected:
                raise ScorerFileError(f"{rid}: unknown question/document pair")
            if (qid, did) in table:
                raise ScorerFileError(f"{rid}: duplicate record")
            n = expected[(qid, did)]
            p_start = _parse_float_list(obj.get("p_start"), "p_start", rid)
            p_end = _parse_float_list(obj.get("p_end"), "p_end", rid)
            alpha = _parse_float_list(obj.get("alpha"), "alpha", rid)
            beta = _parse_float_list(obj.get("beta"), "beta", rid)
            for name, vec in (
                ("p_start", p_start),
                ("p_end", p_end),
                ("alpha", alpha),
                ("beta", beta),
            ):
                if len(vec) != n:
                    raise ScorerFileError(
                        f"{rid}: {name} has {len(vec)} entries, document has {n} tokens"
                    )
            span = obj.get("span")
            if (
                not isinstance(span, list)
                or len(span) != 2
                or not all(isinstance(v, int) for v in span)
            ):
                raise ScorerFileError(f"{rid}: span must be [l, m]")
            l, m, s2 = select_span(p_start, p_end, max_span_len, allow_single_token)
            if [l, m] != span:
                raise ScorerFileError(
                    f"{rid}: span {span} != recomputed argmax [{l}, {m}]"
                )
            for field in ("s3", "s3_qmasked"):
                if not isinstance(obj.get(field), (int, float)):
                    raise ScorerFileError(f"{rid}: missing numeric {field}")
            out = ScorerOutput(
                p_start=p_start,
                p_end=p_end,
                alpha=alpha,
                beta=beta,
                span=(l, m),
                s2=s2,
                s3=float(obj["s3"]),
                s3_qmasked=float(obj["s3_qmasked"]),
            )
            try:
                out.validate()
            except ValueError as exc:
                raise ScorerFileError(f"{rid}: {exc}") from exc
            table[(qid, did)] = out

    missing = sorted(set(expected) - set(table))
    if missing:
        listed = ", ".join(f"({q!r}, {d!r})" for q, d in missing)
        raise ScorerFileError(f"scorer file misses {len(missing)} pairs: {listed}")
    return table


class LexicalScorer:
    """In-process fallback scorer; pure function of its inputs."""

    kind = "lexical"

    def __init__(self, stats: CorpusStats, config: ScorerConfig = ScorerConfig()):
        self.stats = stats
        self.config = config

    def score_instance(self, instance, graphs) -> list[ScorerOutput]:
        return [
            lexical_score(
                instance.q_tokens, doc.tokens, graphs.gq[i], self.stats, self.config
            )
            for i, doc in enumerate(instance.documents)
        ]


class FileScorer:
    """Scorer backed by a validated protocol file."""

    kind = "file"

    def __init__(self, table):
        self._table = table

    @classmethod
    def load(cls, path, instances, max_span_len=10, allow_single_token=True):
        return cls(load_scorer_file(path, instances, max_span_len, allow_single_token))

    def score_instance(self, instance, graphs) -> list[ScorerOutput]:
        outputs = []
        for doc in instance.documents:
            key = (instance.question_id, doc.doc_id)
            if key not in self._table:
                raise KeyError(f"no scorer record for {key}")
            outputs.append(self._table[key])
        return outputs


def make_scorer(config: ScorerConfig, stats: CorpusStats, instances):
    if config.kind == "lexical":
        return LexicalScorer(stats, config)
    return FileScorer.load(
        config.file_path, instances, config.max_span_len, config.allow_single_token
    )
