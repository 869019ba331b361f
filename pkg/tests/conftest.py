"""Shared fixtures, builders, and independent oracles for the test suite.

The oracle functions reimplement contracts directly from their
definitions (separate code paths from the library) so the tests compare
two independent derivations rather than a module against itself.
"""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from linkqa import compute_idf, ingest, load_triples
from linkqa.corpus import Document, QuestionInstance
from linkqa.kb import Triple, TripleStore

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
TOY_CORPUS = DATA_DIR / "toy_corpus.jsonl"
TOY_TRIPLES = DATA_DIR / "toy_triples.tsv"
TOY_BLOCKLIST = DATA_DIR / "toy_blocklist.txt"


# --- builders -------------------------------------------------------------


def make_doc(tokens, doc_id="d0", phrase_spans=None):
    spans = tuple(tuple(s) for s in phrase_spans) if phrase_spans else None
    return Document(doc_id=doc_id, tokens=tuple(tokens), phrase_spans=spans)


def make_instance(q_tokens, doc_token_lists, golds=(), qid="q0", **kwargs):
    docs = tuple(
        make_doc(tokens, doc_id=f"{qid}-d{i}")
        for i, tokens in enumerate(doc_token_lists)
    )
    return QuestionInstance(
        question_id=qid,
        q_tokens=tuple(q_tokens),
        documents=docs,
        gold_answers=tuple(golds),
        **kwargs,
    )


def store_from(rows):
    """TripleStore from (subject, relation, object) string tuples."""
    return TripleStore.build(
        [Triple(subject=s, relation=r, object=o) for s, r, o in rows]
    )


def random_graph_case(rng: random.Random):
    """Random small instance plus store: <=5 docs, <=20 tokens per doc,
    <=15 triples over one- and two-token phrases."""
    words = [f"w{i}" for i in range(12)]

    def phrase():
        if rng.random() < 0.4:
            return f"{rng.choice(words)} {rng.choice(words)}"
        return rng.choice(words)

    docs = tuple(
        make_doc(
            [rng.choice(words) for _ in range(rng.randint(1, 20))],
            doc_id=f"d{di}",
        )
        for di in range(rng.randint(1, 5))
    )
    instance = QuestionInstance(
        question_id="rand",
        q_tokens=tuple(rng.choice(words) for _ in range(rng.randint(1, 6))),
        documents=docs,
    )
    relations = ("/r/IsA", "/r/RelatedTo", "/r/PartOf")
    triples = [
        Triple(subject=phrase(), relation=rng.choice(relations), object=phrase())
        for _ in range(rng.randint(0, 15))
    ]
    return instance, TripleStore.build(triples), triples


# --- independent oracles ---------------------------------------------------


def oracle_match(tokens, vocab, max_len=4):
    """Greedy left-to-right longest-window phrase matching, rebuilt from
    the stated rule."""
    limit = min(max_len, max((len(p.split()) for p in vocab), default=0))
    spans = []
    i = 0
    while i < len(tokens):
        for width in range(min(limit, len(tokens) - i), 0, -1):
            form = " ".join(tokens[i : i + width])
            if form in vocab:
                spans.append((i, i + width - 1, form))
                i += width
                break
        else:
            i += 1
    return spans


def oracle_connected(triples, a, b):
    return any(
        (t.subject == a and t.object == b) or (t.subject == b and t.object == a)
        for t in triples
    )


def oracle_gq(instance, triples, vocab, t1):
    """Question-document lists from the definition: mark tokens of
    document phrases connected to a question phrase, after removing
    question phrases connected to more than t1 distinct documents."""
    q_forms = {form for _, _, form in oracle_match(list(instance.q_tokens), vocab)}
    doc_spans = [oracle_match(list(d.tokens), vocab) for d in instance.documents]
    kept = set()
    for qf in q_forms:
        count = sum(
            1
            for spans in doc_spans
            if any(oracle_connected(triples, qf, form) for _, _, form in spans)
        )
        if count <= t1:
            kept.add(qf)
    result = []
    for doc, spans in zip(instance.documents, doc_spans):
        row = [0] * len(doc.tokens)
        for start, end, form in spans:
            if any(oracle_connected(triples, form, qf) for qf in kept):
                for k in range(start, end + 1):
                    row[k] = 1
        result.append(row)
    return result


def oracle_gd(instance, triples, vocab, idf_of, t2):
    """Document-document lists by exhaustive enumeration of every
    (token, other-document) connection count, then IDF pruning."""
    doc_spans = [oracle_match(list(d.tokens), vocab) for d in instance.documents]
    result = []
    for i, doc in enumerate(instance.documents):
        row: list[int | None] = [None] * len(doc.tokens)
        for start, end, form in doc_spans[i]:
            best_j = None
            best_count = 0
            for j in range(len(instance.documents)):
                if j == i:
                    continue
                positions = set()
                for s, e, other in doc_spans[j]:
                    if oracle_connected(triples, form, other):
                        positions.update(range(s, e + 1))
                if len(positions) > best_count:
                    best_j, best_count = j, len(positions)
            if best_j is not None:
                for k in range(start, end + 1):
                    row[k] = best_j
        linked = [k for k, v in enumerate(row) if v is not None]
        if len(linked) > t2:
            ranked = sorted(linked, key=lambda k: (-idf_of(doc.tokens[k]), k))
            for k in ranked[t2:]:
                row[k] = None
        result.append(row)
    return result


def brute_force_span(p_start, p_end, max_span_len, allow_single_token):
    """Exhaustive argmax over every valid (l, m) pair with stated ties."""
    best = None
    for l in range(len(p_start)):
        for m in range(l, len(p_end)):
            if m - l + 1 > max_span_len:
                continue
            if not allow_single_token and l == m:
                continue
            score = p_start[l] * p_end[m]
            if best is None or score > best[2]:
                best = (l, m, score)
    return best


# --- fixtures ---------------------------------------------------------------


@pytest.fixture(scope="session")
def toy_instances():
    return ingest(TOY_CORPUS).instances


@pytest.fixture(scope="session")
def toy_store():
    return load_triples(TOY_TRIPLES, TOY_BLOCKLIST)


@pytest.fixture(scope="session")
def toy_stats(toy_instances):
    return compute_idf(toy_instances)


# --- acceptance summary -----------------------------------------------------

_ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.module.__name__ == "test_acceptance":
        label = item.function.__doc__ or item.name
        _ACCEPTANCE_RESULTS.append((label.strip().splitlines()[0], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, passed in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {label}")
