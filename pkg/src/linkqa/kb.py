"""Knowledge-base triples and phrase-level connectivity queries.

Triples load from UTF-8 TSV ("subject\\trelation\\tobject"); the relation
blocklist is one relation id per line with '#' comments. Relations on the
blocklist never enter the store, so they cannot influence any graph built
downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Longest token window the greedy phrase matcher tries. KB entities are
# short; longer windows only add cost.
MAX_PHRASE_TOKENS = 4


class TripleFormatError(ValueError):
    """A triples-file line does not have three non-empty fields."""


def normalize_phrase(text: str) -> str:
    """Lowercase and collapse internal whitespace to single spaces."""
    return " ".join(text.lower().split())


@dataclass(frozen=True)
class Triple:
    subject: str
    relation: str
    object: str


@dataclass(frozen=True)
class TripleStore:
    """Immutable set of triples with symmetric connectivity lookups.

    Connectivity folds relations and reversed relations into one
    predicate: two phrases are connected when a triple links them in
    either direction.
    """

    triples: frozenset[Triple]
    blocklist: frozenset[str]
    vocab: frozenset[str]
    max_phrase_tokens: int
    _adjacency: dict[str, frozenset[str]] = field(repr=False, default_factory=dict)

    @classmethod
    def build(cls, triples, blocklist=()) -> "TripleStore":
        blockset = frozenset(blocklist)
        kept = frozenset(t for t in triples if t.relation not in blockset)
        vocab = set()
        adjacency: dict[str, set[str]] = {}
        for t in kept:
            vocab.add(t.subject)
            vocab.add(t.object)
            adjacency.setdefault(t.subject, set()).add(t.object)
            adjacency.setdefault(t.object, set()).add(t.subject)
        max_len = max((len(p.split()) for p in vocab), default=0)
        return cls(
            triples=kept,
            blocklist=blockset,
            vocab=frozenset(vocab),
            max_phrase_tokens=max_len,
            _adjacency={p: frozenset(n) for p, n in adjacency.items()},
        )

    def connected(self, p1: str, p2: str) -> bool:
        """True iff some triple links p1 and p2 in either direction."""
        return p2 in self._adjacency.get(p1, ())

    def neighbors(self, phrase: str) -> frozenset[str]:
        return self._adjacency.get(phrase, frozenset())


def _read_blocklist(path) -> frozenset[str]:
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)


def load_triples(triples_path, blocklist_path=None) -> TripleStore:
    """Load a TSV triples file, dropping blocklisted relations.

    Duplicate triples collapse; subject/object phrases are normalized.
    A line without exactly three non-empty fields raises
    TripleFormatError naming the line.
    """
    blocklist = _read_blocklist(blocklist_path) if blocklist_path else frozenset()
    triples = []
    with open(triples_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise TripleFormatError(
                    f"line {line_no}: expected 3 tab-separated fields, "
                    f"got {len(fields)}"
                )
            subject = normalize_phrase(fields[0])
            relation = fields[1].strip()
            obj = normalize_phrase(fields[2])
            if not subject or not relation or not obj:
                raise TripleFormatError(f"line {line_no}: empty field")
            triples.append(Triple(subject=subject, relation=relation, object=obj))
    return TripleStore.build(triples, blocklist)


def match_phrases(tokens, store: TripleStore, pre_annotated=None):
    """Find KB-vocabulary phrases in a token sequence.

    With ``pre_annotated`` spans, pass through those whose joined surface
    form is in the store vocabulary. Otherwise match greedily left to
    right, longest window first (at most MAX_PHRASE_TOKENS tokens).
    Returns sorted, non-overlapping (start, end, phrase) tuples.
    """
    tokens = list(tokens)
    if pre_annotated is not None:
        candidates = []
        for start, end in pre_annotated:
            if not (0 <= start <= end < len(tokens)):
                raise ValueError(f"phrase span ({start}, {end}) out of range")
            form = " ".join(tokens[start : end + 1])
            if form in store.vocab:
                candidates.append((start, end, form))
        candidates.sort()
        matches = []
        last_end = -1
        for start, end, form in candidates:
            if start > last_end:
                matches.append((start, end, form))
                last_end = end
        return matches

    window = min(MAX_PHRASE_TOKENS, store.max_phrase_tokens)
    matches = []
    i = 0
    n = len(tokens)
    while i < n:
        hit = None
        for length in range(min(window, n - i), 0, -1):
            form = " ".join(tokens[i : i + length])
            if form in store.vocab:
                hit = (i, i + length - 1, form)
                break
        if hit is None:
            i += 1
        else:
            matches.append(hit)
            i = hit[1] + 1
    return matches
