"""End-to-end scoring: retrieve, read, rerank, fuse, evaluate.

The final score per document is the weighted sum

    s_final[i] = w1 * s1_hat[i] + w2 * s2[i] + w3 * s3_hat[i]

and the predicted answer is the chosen span of the argmax document.
Loss functions mirror the training objectives (retrieval regression,
span cross-entropy, rerank soft/hard supervision) but serve purely as
diagnostics here; nothing is optimized.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from .corpus import (
    CorpusStats,
    QuestionInstance,
    find_answer_span,
    label_golden,
    normalize_answer,
)
from .graph import LinkGraphs, build_graphs
from .rerank import RerankScores, fuse_rerank
from .retrieval import RetrievalScores, fuse_retrieval, tfidf_cosine

DEFAULT_GRID_VALUES = (0.2, 0.5, 1.0)


@dataclass(frozen=True)
class PipelineConfig:
    """Fusion weights and graph pruning thresholds for one run."""

    wq: float = 0.5
    wd: float = 0.5
    w1: float = 0.5
    w2: float = 0.5
    w3: float = 0.5
    t1: int = 10
    t2: int = 10


@dataclass
class ScoreBundle:
    """All per-document scores for one question plus the prediction."""

    retrieval: RetrievalScores
    rerank: RerankScores
    s2: list[float]
    s_final: list[float]
    predicted_doc: int
    predicted_span: tuple[int, int]
    predicted_answer: str
    weights: tuple[float, float, float]


@dataclass
class LossReport:
    """Diagnostic loss values; l2 is None without a golden span."""

    l1: float
    l2: float | None
    l3: float
    total: float


@dataclass
class PreparedInstance:
    """Weight-independent scoring state, reused across fusion weights."""

    instance: QuestionInstance
    graphs: LinkGraphs
    outputs: list
    retrieval: RetrievalScores
    s2: list[float]
    rerank: RerankScores


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def softmax(values):
    top = max(values)
    exps = [math.exp(v - top) for v in values]
    total = sum(exps)
    return [e / total for e in exps]


def rank_documents(scores) -> list[int]:
    """Indices sorted by score descending, ties to the lower index."""
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def span_text(instance: QuestionInstance, doc_index: int, span) -> str:
    l, m = span
    return " ".join(instance.documents[doc_index].tokens[l : m + 1])


def ensure_golden_labels(instance: QuestionInstance) -> QuestionInstance:
    """Fill golden labels: auto-label unlabeled instances, and derive the
    golden span inside a dataset-provided golden document."""
    if not instance.gold_answers:
        return instance
    if instance.golden_doc_index is None:
        return label_golden(instance)
    if instance.golden_span is not None:
        return instance
    doc = instance.documents[instance.golden_doc_index]
    best = None
    for gold in instance.gold_answers:
        span = find_answer_span(doc.tokens, gold)
        if span is not None and (best is None or span < best):
            best = span
    if best is None:
        return instance
    return replace(
        instance, golden_span=(instance.golden_doc_index, best[0], best[1])
    )


def prepare_instance(
    instance: QuestionInstance,
    store,
    stats: CorpusStats,
    scorer,
    config: PipelineConfig = PipelineConfig(),
) -> PreparedInstance:
    """Build graphs, run the scorer, and fuse everything but the final
    weighted sum."""
    graphs = build_graphs(instance, store, stats, config.t1, config.t2)
    outputs = scorer.score_instance(instance, graphs)
    s1 = [tfidf_cosine(instance.q_tokens, d.tokens, stats) for d in instance.documents]
    retrieval = fuse_retrieval(
        s1, graphs, [out.alpha for out in outputs], config.wq, config.wd
    )
    rerank = fuse_rerank(outputs, graphs, config.wq, config.wd)
    return PreparedInstance(
        instance=instance,
        graphs=graphs,
        outputs=outputs,
        retrieval=retrieval,
        s2=[out.s2 for out in outputs],
        rerank=rerank,
    )


def prepare_all(instances, store, stats, scorer, config, threads: int = 1):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(
                pool.map(
                    lambda inst: prepare_instance(inst, store, stats, scorer, config),
                    instances,
                )
            )
    return [prepare_instance(inst, store, stats, scorer, config) for inst in instances]


def fuse_final(prepared: PreparedInstance, w1, w2, w3) -> ScoreBundle:
    s_final = [
        w1 * h + w2 * r + w3 * k
        for h, r, k in zip(prepared.retrieval.s1_hat, prepared.s2, prepared.rerank.s3_hat)
    ]
    predicted = min(range(len(s_final)), key=lambda i: (-s_final[i], i))
    span = prepared.outputs[predicted].span
    return ScoreBundle(
        retrieval=prepared.retrieval,
        rerank=prepared.rerank,
        s2=prepared.s2,
        s_final=s_final,
        predicted_doc=predicted,
        predicted_span=span,
        predicted_answer=span_text(prepared.instance, predicted, span),
        weights=(w1, w2, w3),
    )


def answer(
    instance: QuestionInstance,
    graphs: LinkGraphs,
    outputs,
    stats: CorpusStats,
    config: PipelineConfig = PipelineConfig(),
) -> ScoreBundle:
    """Score one instance end to end with the configured weights."""
    s1 = [tfidf_cosine(instance.q_tokens, d.tokens, stats) for d in instance.documents]
    retrieval = fuse_retrieval(
        s1, graphs, [out.alpha for out in outputs], config.wq, config.wd
    )
    prepared = PreparedInstance(
        instance=instance,
        graphs=graphs,
        outputs=outputs,
        retrieval=retrieval,
        s2=[out.s2 for out in outputs],
        rerank=fuse_rerank(outputs, graphs, config.wq, config.wd),
    )
    return fuse_final(prepared, config.w1, config.w2, config.w3)


# --- answer metrics ------------------------------------------------------


def em_f1(prediction: str, golds) -> tuple[int, float]:
    """SQuAD-style exact match and max token F1 against the golds."""
    if not golds:
        raise ValueError("em_f1 needs at least one gold answer")
    pred_norm = normalize_answer(prediction)
    pred_tokens = pred_norm.split()
    em = 0
    best_f1 = 0.0
    for gold in golds:
        gold_norm = normalize_answer(gold)
        if pred_norm == gold_norm:
            em = 1
        gold_tokens = gold_norm.split()
        if not pred_tokens or not gold_tokens:
            f1 = 1.0 if pred_tokens == gold_tokens else 0.0
        else:
            common = Counter(pred_tokens) & Counter(gold_tokens)
            overlap = sum(common.values())
            if overlap == 0:
                f1 = 0.0
            else:
                precision = overlap / len(pred_tokens)
                recall = overlap / len(gold_tokens)
                f1 = 2 * precision * recall / (precision + recall)
        best_f1 = max(best_f1, f1)
    return em, best_f1


def p_at_k(instances, rankings, k: int) -> float:
    """Fraction of labeled instances whose golden document ranks in the
    top k of the paired ranking."""
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = 0
    labeled = 0
    for instance, ranking in zip(instances, rankings):
        if instance.golden_doc_index is None:
            continue
        labeled += 1
        if instance.golden_doc_index in ranking[:k]:
            hits += 1
    if labeled == 0:
        raise ValueError("no labeled instances")
    return hits / labeled


# --- diagnostic losses ---------------------------------------------------


def losses(bundle: ScoreBundle, instance: QuestionInstance, outputs) -> LossReport:
    """Per-question loss terms.

    l1 regresses sigmoid(s1_hat) onto per-document answer-containment
    labels; l2 is the span cross-entropy on the golden span (None when
    the instance has no golden span); l3 combines the soft (F1
    regression) and hard (EM cross-entropy) rerank terms.
    """
    if not instance.gold_answers:
        raise ValueError(f"instance {instance.question_id!r} has no gold answers")

    contains = [
        1.0
        if any(find_answer_span(doc.tokens, g) is not None for g in instance.gold_answers)
        else 0.0
        for doc in instance.documents
    ]
    l1 = sum(
        (sigmoid(s) - label) ** 2
        for s, label in zip(bundle.retrieval.s1_hat, contains)
    )

    l2 = None
    if instance.golden_span is not None:
        di, l_star, m_star = instance.golden_span
        out = outputs[di]
        ps, pe = out.p_start[l_star], out.p_end[m_star]
        l2 = (
            (-math.log(ps) if ps > 0 else math.inf)
            + (-math.log(pe) if pe > 0 else math.inf)
        )

    answers = [
        span_text(instance, i, out.span) for i, out in enumerate(outputs)
    ]
    ems_f1s = [em_f1(a, instance.gold_answers) for a in answers]
    soft = sum(
        (sigmoid(s) - f1) ** 2
        for s, (_, f1) in zip(bundle.rerank.s3_hat, ems_f1s)
    )
    em_total = sum(em for em, _ in ems_f1s)
    hard = 0.0
    if em_total > 0:
        probs = softmax(bundle.rerank.s3_hat)
        hard = -sum(
            (em / em_total) * math.log(p)
            for (em, _), p in zip(ems_f1s, probs)
            if em
        )
    l3 = soft + hard
    total = l1 + (l2 if l2 is not None else 0.0) + l3
    return LossReport(l1=l1, l2=l2, l3=l3, total=total)


def aggregate_losses(reports) -> LossReport:
    """Average each term over the questions where it is defined, then sum."""
    reports = list(reports)
    if not reports:
        raise ValueError("no loss reports to aggregate")
    l1 = sum(r.l1 for r in reports) / len(reports)
    l3 = sum(r.l3 for r in reports) / len(reports)
    defined = [r.l2 for r in reports if r.l2 is not None]
    l2 = sum(defined) / len(defined) if defined else None
    total = l1 + (l2 if l2 is not None else 0.0) + l3
    return LossReport(l1=l1, l2=l2, l3=l3, total=total)


# --- experiment modes ----------------------------------------------------


def inject_golden(instance: QuestionInstance, ranking, n: int) -> list[int]:
    """Force the golden document into the top n of a ranking.

    When the golden document already ranks in the top n the ranking is
    returned unchanged; otherwise it swaps into position n so the result
    stays a permutation.
    """
    if instance.golden_doc_index is None:
        raise ValueError(f"instance {instance.question_id!r} has no golden document")
    if n < 1 or n > len(ranking):
        raise ValueError(f"n={n} outside ranking of length {len(ranking)}")
    ranking = list(ranking)
    golden = instance.golden_doc_index
    if golden in ranking[:n]:
        return ranking
    old = ranking.index(golden)
    ranking[old] = ranking[n - 1]
    ranking[n - 1] = golden
    return ranking


def all_answer_bound(instance: QuestionInstance, outputs) -> tuple[int, float]:
    """Best EM and F1 over every candidate answer (perfect-reranker bound)."""
    em_max = 0
    f1_max = 0.0
    for i, out in enumerate(outputs):
        em, f1 = em_f1(span_text(instance, i, out.span), instance.gold_answers)
        em_max = max(em_max, em)
        f1_max = max(f1_max, f1)
    return em_max, f1_max


# --- grid search ---------------------------------------------------------


def weight_grid(values=DEFAULT_GRID_VALUES):
    """All weight triples over the given values, lexicographically sorted."""
    vals = sorted(set(values))
    return [(a, b, c) for a in vals for b in vals for c in vals]


def grid_search(prepared, grid=None) -> tuple[float, float, float]:
    """Weight triple maximizing mean F1 over prepared instances.

    Ties resolve to the lexicographically smallest triple. Instances
    without gold answers are ignored.
    """
    triples = sorted(grid) if grid is not None else weight_grid()
    if not triples:
        raise ValueError("empty weight grid")
    scored = []
    for prep in prepared:
        if not prep.instance.gold_answers:
            continue
        f1s = [
            em_f1(span_text(prep.instance, i, out.span), prep.instance.gold_answers)[1]
            for i, out in enumerate(prep.outputs)
        ]
        scored.append((prep, f1s))
    best = triples[0]
    best_f1 = -1.0
    for w1, w2, w3 in triples:
        total = 0.0
        for prep, f1s in scored:
            s_final = [
                w1 * h + w2 * r + w3 * k
                for h, r, k in zip(
                    prep.retrieval.s1_hat, prep.s2, prep.rerank.s3_hat
                )
            ]
            pick = min(range(len(s_final)), key=lambda i: (-s_final[i], i))
            total += f1s[pick]
        mean_f1 = total / len(scored) if scored else 0.0
        if mean_f1 > best_f1:
            best = (w1, w2, w3)
            best_f1 = mean_f1
    return best


# --- results -------------------------------------------------------------


def result_record(instance: QuestionInstance, bundle: ScoreBundle) -> dict:
    """JSON-safe per-question record for the results file."""
    em = f1 = None
    if instance.gold_answers:
        em, f1 = em_f1(bundle.predicted_answer, instance.gold_answers)
    return {
        "question_id": instance.question_id,
        "predicted_answer": bundle.predicted_answer,
        "predicted_doc": bundle.predicted_doc,
        "predicted_span": list(bundle.predicted_span),
        "em": em,
        "f1": f1,
        "gold_answers": list(instance.gold_answers),
        "golden_doc_index": instance.golden_doc_index,
        "docs": [
            {
                "doc_id": doc.doc_id,
                "s1": bundle.retrieval.s1[i],
                "s1_hat": bundle.retrieval.s1_hat[i],
                "s2": bundle.s2[i],
                "s3": bundle.rerank.s3[i],
                "s3_hat": bundle.rerank.s3_hat[i],
                "s_final": bundle.s_final[i],
            }
            for i, doc in enumerate(instance.documents)
        ],
    }


def _record_p_at_k(records, score_key: str, ks):
    labeled = [r for r in records if r["golden_doc_index"] is not None]
    if not labeled:
        return None
    table = {}
    for k in ks:
        hits = 0
        for rec in labeled:
            scores = [d[score_key] for d in rec["docs"]]
            if rec["golden_doc_index"] in rank_documents(scores)[:k]:
                hits += 1
        table[str(k)] = hits / len(labeled)
    return table


def summarize(records, loss_report: LossReport | None, weights, ks=(1, 3, 5, 10)) -> dict:
    """Corpus-level summary: mean EM/F1, P@k under three rankings, losses."""
    scored = [r for r in records if r["em"] is not None]
    summary = {
        "questions": len(records),
        "scored_questions": len(scored),
        "labeled_questions": sum(
            1 for r in records if r["golden_doc_index"] is not None
        ),
        "mean_em": (
            sum(r["em"] for r in scored) / len(scored) if scored else None
        ),
        "mean_f1": (
            sum(r["f1"] for r in scored) / len(scored) if scored else None
        ),
        "p_at_k": {
            "baseline": _record_p_at_k(records, "s1", ks),
            "knowledge": _record_p_at_k(records, "s1_hat", ks),
            "final": _record_p_at_k(records, "s_final", ks),
        },
        "weights": list(weights),
        "losses": None,
    }
    if loss_report is not None:
        summary["losses"] = {
            "l1": loss_report.l1,
            "l2": loss_report.l2,
            "l3": loss_report.l3,
            "total": loss_report.total,
        }
    return summary


def evaluate_corpus(
    instances,
    store,
    stats: CorpusStats,
    scorer,
    config: PipelineConfig = PipelineConfig(),
    threads: int = 1,
):
    """Run the full pipeline over a corpus.

    Returns (records, summary). Instances are golden-labeled first; loss
    terms aggregate over the instances where they are defined.
    """
    instances = [ensure_golden_labels(inst) for inst in instances]
    prepared = prepare_all(instances, store, stats, scorer, config, threads)
    records = []
    reports = []
    for prep in prepared:
        bundle = fuse_final(prep, config.w1, config.w2, config.w3)
        records.append(result_record(prep.instance, bundle))
        if prep.instance.gold_answers:
            reports.append(losses(bundle, prep.instance, prep.outputs))
    agg = aggregate_losses(reports) if reports else None
    summary = summarize(records, agg, (config.w1, config.w2, config.w3))
    return records, summary
