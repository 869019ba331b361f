"""Run reports: per-question metrics CSV plus matplotlib figures.

Everything here is derived from the results records; figures land next
to the delimited output in the run's output directory. Rendering is
deterministic (fixed figure geometry, no timestamps in metadata) so
repeated runs produce identical files.
"""

from __future__ import annotations

import csv
import random
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .pipeline import rank_documents  # noqa: E402

_SCATTER_CAP = 2000


def golden_rank(record, score_key: str):
    """1-based rank of the golden document under the given score, or None."""
    golden = record["golden_doc_index"]
    if golden is None:
        return None
    scores = [d[score_key] for d in record["docs"]]
    return rank_documents(scores).index(golden) + 1


def write_metrics_csv(records, path) -> None:
    """Per-question metrics, one row per question."""
    fields = [
        "question_id",
        "em",
        "f1",
        "predicted_answer",
        "predicted_doc",
        "golden_doc_index",
        "golden_rank_baseline",
        "golden_rank_knowledge",
        "golden_rank_final",
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for rec in records:
            writer.writerow(
                {
                    "question_id": rec["question_id"],
                    "em": rec["em"],
                    "f1": rec["f1"],
                    "predicted_answer": rec["predicted_answer"],
                    "predicted_doc": rec["predicted_doc"],
                    "golden_doc_index": rec["golden_doc_index"],
                    "golden_rank_baseline": golden_rank(rec, "s1"),
                    "golden_rank_knowledge": golden_rank(rec, "s1_hat"),
                    "golden_rank_final": golden_rank(rec, "s_final"),
                }
            )


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def _plot_p_at_k(summary, path) -> bool:
    table = summary.get("p_at_k") or {}
    series = [(name, table.get(name)) for name in ("baseline", "knowledge", "final")]
    series = [(name, vals) for name, vals in series if vals]
    if not series:
        return False
    ks = sorted(series[0][1], key=int)
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(6, 4))
    for si, (name, vals) in enumerate(series):
        xs = [i + si * width for i in range(len(ks))]
        ax.bar(xs, [vals[k] for k in ks], width=width, label=name)
    ax.set_xticks([i + width * (len(series) - 1) / 2 for i in range(len(ks))])
    ax.set_xticklabels([f"P@{k}" for k in ks])
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction of golden docs retrieved")
    ax.set_title("Golden-document recall by ranking")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    return True


def _plot_retrieval_shift(records, path, seed: int) -> bool:
    points = []
    for rec in records:
        for di, doc in enumerate(rec["docs"]):
            points.append((doc["s1"], doc["s1_hat"], di == rec["golden_doc_index"]))
    if not points:
        return False
    if len(points) > _SCATTER_CAP:
        points = random.Random(seed).sample(points, _SCATTER_CAP)
    other = [(x, y) for x, y, g in points if not g]
    golden = [(x, y) for x, y, g in points if g]
    fig, ax = plt.subplots(figsize=(5, 5))
    if other:
        ax.scatter(*zip(*other), s=12, alpha=0.4, label="other docs")
    if golden:
        ax.scatter(*zip(*golden), s=20, color="crimson", label="golden docs")
    top = max(max(x for x, _ in other + golden), max(y for _, y in other + golden), 1e-9)
    ax.plot([0, top], [0, top], linestyle="--", linewidth=1, color="gray")
    ax.set_xlabel("baseline retrieval score")
    ax.set_ylabel("knowledge-aided retrieval score")
    ax.set_title("Retrieval score shift from link graphs")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    return True


def _plot_f1_hist(records, path) -> bool:
    f1s = [rec["f1"] for rec in records if rec["f1"] is not None]
    if not f1s:
        return False
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(f1s, bins=20, range=(0, 1), edgecolor="black")
    ax.set_xlabel("answer F1")
    ax.set_ylabel("questions")
    ax.set_title("Answer F1 distribution")
    fig.tight_layout()
    _save(fig, path)
    return True


def write_report(records, summary, out_dir, seed: int = 0) -> list[Path]:
    """Write metrics.csv and the figures; returns the created paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    csv_path = out_dir / "metrics.csv"
    write_metrics_csv(records, csv_path)
    written.append(csv_path)
    fig_dir = out_dir / "figures"
    fig_dir.mkdir(exist_ok=True)
    for name, renderer in [
        ("p_at_k.png", lambda p: _plot_p_at_k(summary, p)),
        ("retrieval_shift.png", lambda p: _plot_retrieval_shift(records, p, seed)),
        ("f1_hist.png", lambda p: _plot_f1_hist(records, p)),
    ]:
        path = fig_dir / name
        if renderer(path):
            written.append(path)
    return written
