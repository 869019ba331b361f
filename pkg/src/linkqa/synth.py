"""Synthetic corpora with plantable knowledge links.

The rescue corpus stresses the knowledge-aided retrieval path: every
question has one golden document sharing no vocabulary with the question
(TF-IDF scores it dead last) plus distractors that do overlap. Planted
triples connect every golden-document token to an anchor phrase inside
the strongest distractor, so the d-link term inherits that distractor's
retrieval score and pulls the golden document back up the ranking.
Baseline P@3 is 0 by construction; the fused ranking should recover most
golden documents.
"""

from __future__ import annotations

import json
import random


def rescue_corpus(n_questions: int = 200, seed: int = 7):
    """Build (corpus_records, triple_rows) for the rescue experiment."""
    rng = random.Random(seed)
    records = []
    triple_rows = []
    for qi in range(n_questions):
        q_tokens = [f"qa{qi}", f"qb{qi}", f"qc{qi}", f"qd{qi}", f"concept{qi}"]
        answer = f"answer{qi}"
        golden_tokens = [f"mark{qi}a", f"mark{qi}b", answer, f"tail{qi}"]
        strong_tokens = q_tokens[:4] + [f"anchor{qi}"]

        n_weak = rng.randint(4, 7)
        docs = [("strong", strong_tokens)]
        for wi in range(n_weak):
            fillers = [f"w{qi}x{wi}f{j}" for j in range(rng.randint(3, 6))]
            docs.append(("weak", [q_tokens[wi % 4]] + fillers))
        golden_pos = rng.randint(1, len(docs))
        docs.insert(golden_pos, ("golden", golden_tokens))

        records.append(
            {
                "question_id": f"synth{qi}",
                "question": " ".join(q_tokens),
                "documents": [
                    {"doc_id": f"synth{qi}-d{di}", "text": " ".join(tokens)}
                    for di, (_, tokens) in enumerate(docs)
                ],
                "answers": [answer],
            }
        )
        # Every golden token joins a KB phrase linked to the strong
        # distractor's anchor; one phrase spans two tokens.
        anchor = f"anchor{qi}"
        triple_rows.append((f"mark{qi}a mark{qi}b", "/r/RelatedTo", anchor))
        triple_rows.append((answer, "/r/RelatedTo", anchor))
        triple_rows.append((f"tail{qi}", "/r/RelatedTo", anchor))
        # Question-side edge: marks the golden tokens in the gq lists.
        triple_rows.append((f"mark{qi}a mark{qi}b", "/r/About", f"concept{qi}"))
    return records, triple_rows


def write_corpus(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def write_triples(rows, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for subject, relation, obj in rows:
            fh.write(f"{subject}\t{relation}\t{obj}\n")
