"""Knowledge-aided rerank fusion."""

import random

import pytest

from linkqa.graph import LinkGraphs
from linkqa.rerank import fuse_rerank
from linkqa.scorer import ScorerOutput


def output(p, span, s3, s3_qmasked, beta=None):
    """ScorerOutput with p_start = p_end = p."""
    l, m = span
    return ScorerOutput(
        p_start=list(p),
        p_end=list(p),
        alpha=list(beta or p),
        beta=list(beta or p),
        span=span,
        s2=p[l] * p[m],
        s3=s3,
        s3_qmasked=s3_qmasked,
    )


def graphs_for(gq, gd):
    return LinkGraphs(
        question_id="q0",
        doc_ids=tuple(f"d{i}" for i in range(len(gq))),
        gq=gq,
        gd=gd,
    )


class TestFuseRerank:
    def test_hand_worked_example(self):
        outputs = [
            output([0.5, 0.5], (0, 1), s3=0.2, s3_qmasked=0.2),
            output([1.0, 0.0], (0, 0), s3=0.8, s3_qmasked=0.0),
        ]
        graphs = graphs_for(
            gq=[[1, 0], [0, 0]],
            gd=[[None, 1], [None, None]],
        )
        scores = fuse_rerank(outputs, graphs, wq=0.5, wd=0.5)
        assert scores.sd3[0] == pytest.approx(0.4, abs=1e-9)
        assert scores.s3_hat[0] == pytest.approx(0.5, abs=1e-9)

    def test_all_null_gd_zeroes_d_term(self):
        outputs = [output([0.5, 0.5], (0, 1), s3=0.3, s3_qmasked=0.1)]
        graphs = graphs_for(gq=[[1, 1]], gd=[[None, None]])
        scores = fuse_rerank(outputs, graphs)
        assert scores.sd3 == [0.0]
        assert scores.s3_hat[0] == pytest.approx(0.3 + 0.5 * 0.1)

    def test_zero_masked_score_passes_through(self):
        outputs = [output([0.5, 0.5], (0, 1), s3=0.3, s3_qmasked=0.0)]
        graphs = graphs_for(gq=[[0, 0]], gd=[[None, None]])
        scores = fuse_rerank(outputs, graphs)
        assert scores.sq3 == [0.0]
        assert scores.s3_hat == [0.3]

    def test_zero_weights_identity(self):
        outputs = [
            output([0.5, 0.5], (0, 1), s3=0.7, s3_qmasked=0.7),
            output([1.0], (0, 0), s3=0.2, s3_qmasked=0.2),
        ]
        graphs = graphs_for(gq=[[1, 1], [1]], gd=[[1, 1], [0]])
        scores = fuse_rerank(outputs, graphs, wq=0.0, wd=0.0)
        assert scores.s3_hat == scores.s3 == [0.7, 0.2]

    def test_d_term_uses_base_scores_of_others(self):
        # doc 0 and doc 1 link to each other; each must see the other's
        # base s3, not the fused value
        outputs = [
            output([1.0], (0, 0), s3=0.4, s3_qmasked=0.4),
            output([1.0], (0, 0), s3=0.6, s3_qmasked=0.6),
        ]
        graphs = graphs_for(gq=[[1], [1]], gd=[[1], [0]])
        scores = fuse_rerank(outputs, graphs, wq=0.0, wd=1.0)
        assert scores.s3_hat[0] == pytest.approx(0.4 + 1.0 * 0.6)
        assert scores.s3_hat[1] == pytest.approx(0.6 + 1.0 * 0.4)

    def test_only_span_tokens_contribute(self):
        rng = random.Random(8)
        for _ in range(200):
            n = rng.randint(2, 8)
            p = [1.0 / n] * n
            l = rng.randrange(n)
            m = rng.randrange(l, n)
            beta = [rng.random() for _ in range(n)]
            total = sum(beta)
            beta = [b / total for b in beta]
            gd_row = [rng.choice([None, 1]) for _ in range(n)]
            gq_row = [rng.choice([0, 1]) for _ in range(n)]
            base = [
                output(p, (l, m), s3=0.5, s3_qmasked=0.2, beta=beta),
                output([1.0 / n] * n, (0, 0), s3=0.9, s3_qmasked=0.0),
            ]
            graphs = graphs_for(gq=[gq_row, [0] * n], gd=[gd_row, [None] * n])
            before = fuse_rerank(base, graphs)

            # corrupt beta, gq, and gd everywhere outside the span
            mutated_gd = list(gd_row)
            mutated_gq = list(gq_row)
            mutated_beta = list(beta)
            for k in range(n):
                if k < l or k > m:
                    mutated_gd[k] = None if gd_row[k] is not None else 1
                    mutated_gq[k] = 1 - gq_row[k]
                    mutated_beta[k] = rng.random()
            mutated = [
                output(p, (l, m), s3=0.5, s3_qmasked=0.2, beta=mutated_beta),
                base[1],
            ]
            graphs2 = graphs_for(gq=[mutated_gq, [0] * n], gd=[mutated_gd, [None] * n])
            after = fuse_rerank(mutated, graphs2)
            assert before.s3_hat[0] == after.s3_hat[0]

    def test_monotone_in_referenced_score(self):
        outputs_low = [
            output([1.0], (0, 0), s3=0.5, s3_qmasked=0.0),
            output([1.0], (0, 0), s3=0.1, s3_qmasked=0.0),
        ]
        outputs_high = [
            output([1.0], (0, 0), s3=0.5, s3_qmasked=0.0),
            output([1.0], (0, 0), s3=0.9, s3_qmasked=0.0),
        ]
        graphs = graphs_for(gq=[[0], [0]], gd=[[1], [None]])
        low = fuse_rerank(outputs_low, graphs)
        high = fuse_rerank(outputs_high, graphs)
        assert high.s3_hat[0] > low.s3_hat[0]

    def test_corrupt_span_names_document(self):
        bad = ScorerOutput(
            p_start=[1.0],
            p_end=[1.0],
            alpha=[1.0],
            beta=[1.0],
            span=(0, 3),
            s2=1.0,
            s3=0.5,
            s3_qmasked=0.0,
        )
        graphs = graphs_for(gq=[[0]], gd=[[None]])
        with pytest.raises(ValueError, match="document 0"):
            fuse_rerank([bad], graphs)

    def test_output_count_mismatch_rejected(self):
        outputs = [output([1.0], (0, 0), s3=0.5, s3_qmasked=0.0)]
        graphs = graphs_for(gq=[[0], [0]], gd=[[None], [None]])
        with pytest.raises(ValueError):
            fuse_rerank(outputs, graphs)

    def test_negative_weights_rejected(self):
        outputs = [output([1.0], (0, 0), s3=0.5, s3_qmasked=0.0)]
        graphs = graphs_for(gq=[[0]], gd=[[None]])
        with pytest.raises(ValueError):
            fuse_rerank(outputs, graphs, wd=-1.0)
