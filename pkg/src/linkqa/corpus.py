"""Corpus ingestion: questions, candidate documents, gold answers.

The corpus file is UTF-8 JSON-lines, one question per line:

    {"question_id": str, "question": str,
     "documents": [{"doc_id": str, "text": str,
                    "noun_phrases": [[start, end], ...]   # optional
                   }, ...],
     "answers": [str, ...],
     "golden_doc_index": int                              # optional
    }

Token indices in ``noun_phrases`` refer to this module's tokenization of
the document text.
"""

from __future__ import annotations

import json
import math
import re
import string
from dataclasses import dataclass, replace

_PUNCT = set(string.punctuation)
_ARTICLE_RE = re.compile(r"\b(a|an|the)\b")

# IDF assigned to tokens never seen in any ingested document (the
# smoothing floor, equal to the IDF of a token present in every document).
UNSEEN_IDF = 1.0


class CorpusFormatError(ValueError):
    """A corpus record violates the line-delimited JSON schema."""


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip edge punctuation.

    Tokens that are empty after stripping (pure punctuation) are dropped.
    Interior punctuation is kept, so "u.s." becomes "u.s".
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(string.punctuation)
        if tok:
            tokens.append(tok)
    return tokens


def normalize_answer(text: str) -> str:
    """SQuAD-style normalization: lowercase, drop punctuation and
    articles, collapse whitespace."""
    text = "".join(ch for ch in text.lower() if ch not in _PUNCT)
    text = _ARTICLE_RE.sub(" ", text)
    return " ".join(text.split())


def _normalize_token(token: str) -> str:
    """Single-token analog of normalize_answer ('' = ignorable)."""
    stripped = "".join(ch for ch in token if ch not in _PUNCT)
    return "" if stripped in ("a", "an", "the") else stripped


@dataclass(frozen=True)
class Document:
    """One candidate document: id, lowercased tokens, and optional
    pre-annotated noun-phrase token spans (inclusive start/end)."""

    doc_id: str
    tokens: tuple[str, ...]
    phrase_spans: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"document {self.doc_id!r} has no tokens")
        for start, end in self.phrase_spans or ():
            if not (0 <= start <= end < len(self.tokens)):
                raise ValueError(
                    f"document {self.doc_id!r}: phrase span ({start}, {end}) "
                    f"outside [0, {len(self.tokens)})"
                )


@dataclass(frozen=True)
class QuestionInstance:
    """A question together with its ordered candidate documents.

    ``documents`` keeps the candidate ranking order of the source dataset.
    ``golden_span`` is (doc_index, start, end) with inclusive token ends.
    """

    question_id: str
    q_tokens: tuple[str, ...]
    documents: tuple[Document, ...]
    gold_answers: tuple[str, ...] = ()
    golden_doc_index: int | None = None
    golden_span: tuple[int, int, int] | None = None

    def __post_init__(self):
        if not self.documents:
            raise ValueError(f"instance {self.question_id!r} has no documents")
        if self.golden_doc_index is not None and not (
            0 <= self.golden_doc_index < len(self.documents)
        ):
            raise ValueError(
                f"instance {self.question_id!r}: golden_doc_index "
                f"{self.golden_doc_index} out of range"
            )
        if self.golden_span is not None:
            di, start, end = self.golden_span
            if not (0 <= di < len(self.documents)):
                raise ValueError(
                    f"instance {self.question_id!r}: golden_span document "
                    f"index {di} out of range"
                )
            n = len(self.documents[di].tokens)
            if not (0 <= start <= end < n):
                raise ValueError(
                    f"instance {self.question_id!r}: golden_span ({start}, "
                    f"{end}) outside document of length {n}"
                )

    @property
    def total_tokens(self) -> int:
        return len(self.q_tokens) + sum(len(d.tokens) for d in self.documents)


@dataclass(frozen=True)
class CorpusStats:
    """Inverse document frequencies over every ingested document."""

    idf: dict[str, float]
    doc_count: int

    def idf_of(self, token: str) -> float:
        return self.idf.get(token, UNSEEN_IDF)


@dataclass
class IngestResult:
    instances: list[QuestionInstance]
    dropped: int = 0  # instances over the token cap


def _parse_document(obj, line_no: int) -> Document:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {line_no}: document entry is not an object")
    doc_id = obj.get("doc_id")
    text = obj.get("text")
    if not isinstance(doc_id, str) or not isinstance(text, str):
        raise CorpusFormatError(
            f"line {line_no}: document needs string 'doc_id' and 'text'"
        )
    tokens = tokenize(text)
    if not tokens:
        raise CorpusFormatError(
            f"line {line_no}: document {doc_id!r} tokenizes to nothing"
        )
    spans = None
    if "noun_phrases" in obj:
        raw = obj["noun_phrases"]
        if not isinstance(raw, list):
            raise CorpusFormatError(f"line {line_no}: noun_phrases must be a list")
        spans = []
        for pair in raw:
            if (
                not isinstance(pair, (list, tuple))
                or len(pair) != 2
                or not all(isinstance(x, int) for x in pair)
            ):
                raise CorpusFormatError(
                    f"line {line_no}: noun_phrases entries must be [start, end]"
                )
            start, end = pair
            if not (0 <= start <= end < len(tokens)):
                raise CorpusFormatError(
                    f"line {line_no}: noun phrase span ({start}, {end}) outside "
                    f"document {doc_id!r} of {len(tokens)} tokens"
                )
            spans.append((start, end))
        spans = tuple(spans)
    return Document(doc_id=doc_id, tokens=tuple(tokens), phrase_spans=spans)


def _parse_record(obj, line_no: int) -> QuestionInstance:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"line {line_no}: record is not a JSON object")
    qid = obj.get("question_id")
    question = obj.get("question")
    if not isinstance(qid, str) or not isinstance(question, str):
        raise CorpusFormatError(
            f"line {line_no}: record needs string 'question_id' and 'question'"
        )
    raw_docs = obj.get("documents")
    if not isinstance(raw_docs, list) or not raw_docs:
        raise CorpusFormatError(f"line {line_no}: 'documents' must be a non-empty list")
    docs = tuple(_parse_document(d, line_no) for d in raw_docs)
    answers = obj.get("answers", [])
    if not isinstance(answers, list) or not all(isinstance(a, str) for a in answers):
        raise CorpusFormatError(f"line {line_no}: 'answers' must be a list of strings")
    golden = obj.get("golden_doc_index")
    if golden is not None and not isinstance(golden, int):
        raise CorpusFormatError(f"line {line_no}: 'golden_doc_index' must be an int")
    if golden is not None and not (0 <= golden < len(docs)):
        raise CorpusFormatError(
            f"line {line_no}: golden_doc_index {golden} out of range"
        )
    return QuestionInstance(
        question_id=qid,
        q_tokens=tuple(tokenize(question)),
        documents=docs,
        gold_answers=tuple(answers),
        golden_doc_index=golden,
    )


def ingest(path, max_tokens: int = 8000) -> IngestResult:
    """Read a corpus file, dropping instances over the total-token cap.

    The cap counts question tokens plus every candidate document's tokens.
    Malformed records raise CorpusFormatError with the offending line
    number; an empty file yields an empty result.
    """
    if max_tokens <= 0:
        raise ValueError("max_tokens must be positive")
    instances = []
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {line_no}: invalid JSON ({exc})") from exc
            instance = _parse_record(obj, line_no)
            if instance.total_tokens > max_tokens:
                dropped += 1
                continue
            instances.append(instance)
    return IngestResult(instances=instances, dropped=dropped)


def find_answer_span(tokens, answer: str) -> tuple[int, int] | None:
    """First token span whose normalized text equals the normalized answer.

    Tokens normalizing to '' (articles, pure punctuation) may sit inside a
    span but cannot start or end it. Returns (start, end) inclusive, or
    None when the answer does not occur.
    """
    target = normalize_answer(answer).split()
    if not target:
        return None
    norm = [_normalize_token(t) for t in tokens]
    n = len(norm)
    for start in range(n):
        if norm[start] != target[0]:
            continue
        matched = 1
        end = start
        pos = start + 1
        while matched < len(target) and pos < n:
            if norm[pos] == "":
                pos += 1
            elif norm[pos] == target[matched]:
                matched += 1
                end = pos
                pos += 1
            else:
                break
        if matched == len(target):
            return start, end
    return None


def label_golden(instance: QuestionInstance) -> QuestionInstance:
    """Label the first document (in candidate order) containing an exact
    match of any gold answer, along with the earliest matching span.

    Returns a new instance; both label fields stay unset when nothing
    matches.
    """
    if not instance.gold_answers:
        raise ValueError(f"instance {instance.question_id!r} has no gold answers")
    for di, doc in enumerate(instance.documents):
        best = None
        for gold in instance.gold_answers:
            span = find_answer_span(doc.tokens, gold)
            if span is not None and (best is None or span < best):
                best = span
        if best is not None:
            return replace(
                instance,
                golden_doc_index=di,
                golden_span=(di, best[0], best[1]),
            )
    return replace(instance, golden_doc_index=None, golden_span=None)


def compute_idf(instances) -> CorpusStats:
    """Smoothed IDF over all candidate documents:

        idf(t) = ln((1 + N) / (1 + df(t))) + 1

    where N is the document count and df(t) the number of documents
    containing t. Values are >= 1 and never zero-divide.
    """
    df: dict[str, int] = {}
    doc_count = 0
    for instance in instances:
        for doc in instance.documents:
            doc_count += 1
            for token in set(doc.tokens):
                df[token] = df.get(token, 0) + 1
    if doc_count == 0:
        raise ValueError("compute_idf needs at least one document")
    idf = {
        token: math.log((1 + doc_count) / (1 + count)) + 1.0
        for token, count in df.items()
    }
    return CorpusStats(idf=idf, doc_count=doc_count)
