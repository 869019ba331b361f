"""Command-line front door wiring the modules into reproducible runs.

Subcommands: ingest, build-graphs, export-tokens, run, eval,
grid-search, inject-golden-eval. Options resolve in three layers —
built-in defaults, then a line-oriented key=value config file
(``--config``), then explicit flags — and the effective configuration
is echoed into the output directory so every run is reproducible from
its artifacts alone. All outputs are deterministic: identical inputs
and config produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from .corpus import CorpusFormatError, compute_idf, ingest
from .graph import build_graphs, write_graphs
from .kb import TripleFormatError, TripleStore, load_triples
from .pipeline import (
    DEFAULT_GRID_VALUES,
    PipelineConfig,
    all_answer_bound,
    em_f1,
    ensure_golden_labels,
    evaluate_corpus,
    fuse_final,
    grid_search,
    inject_golden,
    p_at_k,
    prepare_all,
    rank_documents,
    summarize,
    weight_grid,
)
from .report import write_report
from .scorer import ScorerConfig, ScorerFileError, make_scorer


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved options shared by the subcommands."""

    corpus: str | None = None
    triples: str | None = None
    blocklist: str | None = None
    t1: int = 10
    t2: int = 10
    wq: float = 0.5
    wd: float = 0.5
    w1: float = 0.5
    w2: float = 0.5
    w3: float = 0.5
    grid: tuple[float, ...] = DEFAULT_GRID_VALUES
    scorer: str = "lexical"
    scorer_file: str | None = None
    max_tokens: int = 8000
    max_span_len: int = 10
    allow_single_token: bool = True
    out: str | None = None
    seed: int = 0
    threads: int = 1

    def validate(self) -> None:
        if self.t1 < 1 or self.t2 < 1:
            raise ConfigError("t1 and t2 must be >= 1")
        if min(self.wq, self.wd, self.w1, self.w2, self.w3) < 0:
            raise ConfigError("fusion weights must be non-negative")
        if not self.grid:
            raise ConfigError("weight grid must be non-empty")
        if self.max_tokens < 1:
            raise ConfigError("max_tokens must be >= 1")
        if self.max_span_len < 1:
            raise ConfigError("max_span_len must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.scorer not in ("lexical", "file"):
            raise ConfigError(f"unknown scorer kind {self.scorer!r}")
        if self.scorer == "file" and not self.scorer_file:
            raise ConfigError("scorer=file requires scorer_file")
        if self.scorer == "lexical" and self.scorer_file:
            raise ConfigError("scorer_file is only valid with scorer=file")
        for name in ("corpus", "triples", "blocklist", "scorer_file"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name} path does not exist: {path}")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid value in {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("grid must list at least one value")
    return values


_FIELD_PARSERS = {
    "corpus": str,
    "triples": str,
    "blocklist": str,
    "t1": int,
    "t2": int,
    "wq": float,
    "wd": float,
    "w1": float,
    "w2": float,
    "w3": float,
    "grid": _parse_grid,
    "scorer": str,
    "scorer_file": str,
    "max_tokens": int,
    "max_span_len": int,
    "allow_single_token": _parse_bool,
    "out": str,
    "seed": int,
    "threads": int,
}


def read_config_file(path) -> dict[str, str]:
    """Parse a line-oriented key=value file ('#' starts a comment line)."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {line_no}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _FIELD_PARSERS:
                raise ConfigError(f"{path}: line {line_no}: unknown key {key!r}")
            values[key] = value.strip()
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Resolve defaults < config file < flags into a validated RunConfig."""
    from_file = read_config_file(args.config) if args.config else {}
    resolved = {}
    for field_ in fields(RunConfig):
        flag_value = getattr(args, field_.name, None)
        if flag_value is not None:
            resolved[field_.name] = flag_value
        elif field_.name in from_file:
            try:
                resolved[field_.name] = _FIELD_PARSERS[field_.name](
                    from_file[field_.name]
                )
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise ConfigError(f"config key {field_.name}: {exc}") from exc
    config = RunConfig(**resolved)
    config.validate()
    return config


def config_lines(config: RunConfig) -> str:
    """Effective config as a reloadable key=value document."""
    lines = []
    for field_ in fields(RunConfig):
        value = getattr(config, field_.name)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        lines.append(f"{field_.name}={value}")
    return "\n".join(lines) + "\n"


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        if getattr(config, name) is None:
            flag = "--" + name.replace("_", "-")
            raise ConfigError(f"{flag} is required (flag or config file)")


def _echo_config(config: RunConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.txt").write_text(config_lines(config), encoding="utf-8")


def _load_store(config: RunConfig) -> TripleStore:
    if config.triples is None:
        return TripleStore.build([])
    return load_triples(config.triples, config.blocklist)


def _load_instances(config: RunConfig):
    result = ingest(config.corpus, config.max_tokens)
    return result.instances, result.dropped


def _pipeline_config(config: RunConfig) -> PipelineConfig:
    return PipelineConfig(
        wq=config.wq,
        wd=config.wd,
        w1=config.w1,
        w2=config.w2,
        w3=config.w3,
        t1=config.t1,
        t2=config.t2,
    )


def _make_scorer(config: RunConfig, stats, instances):
    scorer_config = ScorerConfig(
        kind=config.scorer,
        file_path=config.scorer_file,
        max_span_len=config.max_span_len,
        allow_single_token=config.allow_single_token,
    )
    return make_scorer(scorer_config, stats, instances)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _write_json_lines(records, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def _write_json(payload, path: Path) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


# --- subcommand handlers --------------------------------------------------


def _cmd_ingest(args) -> int:
    config = build_config(args)
    _require(config, "corpus")
    instances, dropped = _load_instances(config)
    labeled = [ensure_golden_labels(inst) for inst in instances]
    _emit(
        {
            "questions": len(instances),
            "dropped_oversized": dropped,
            "documents": sum(len(inst.documents) for inst in instances),
            "total_tokens": sum(inst.total_tokens for inst in instances),
            "answerable": sum(1 for inst in instances if inst.gold_answers),
            "labeled_golden": sum(
                1 for inst in labeled if inst.golden_doc_index is not None
            ),
        }
    )
    return 0


def _cmd_build_graphs(args) -> int:
    config = build_config(args)
    _require(config, "corpus", "triples", "out")
    instances, _ = _load_instances(config)
    store = _load_store(config)
    stats = compute_idf(instances)
    count = write_graphs(
        (
            build_graphs(inst, store, stats, config.t1, config.t2)
            for inst in instances
        ),
        config.out,
    )
    _emit({"questions": count, "out": config.out})
    return 0


def _cmd_export_tokens(args) -> int:
    config = build_config(args)
    _require(config, "corpus", "out")
    instances, _ = _load_instances(config)
    records = (
        {
            "question_id": inst.question_id,
            "question": list(inst.q_tokens),
            "documents": [
                {"doc_id": doc.doc_id, "tokens": list(doc.tokens)}
                for doc in inst.documents
            ],
        }
        for inst in instances
    )
    path = Path(config.out)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    _write_json_lines(records, path)
    _emit({"questions": len(instances), "out": config.out})
    return 0


def _cmd_run(args) -> int:
    config = build_config(args)
    _require(config, "corpus", "out")
    instances, dropped = _load_instances(config)
    store = _load_store(config)
    stats = compute_idf(instances)
    scorer = _make_scorer(config, stats, instances)
    records, summary = evaluate_corpus(
        instances,
        store,
        stats,
        scorer,
        _pipeline_config(config),
        threads=config.threads,
    )
    summary["dropped_oversized"] = dropped
    out_dir = Path(config.out)
    _echo_config(config, out_dir)
    _write_json_lines(records, out_dir / "results.jsonl")
    _write_json(summary, out_dir / "summary.json")
    write_report(records, summary, out_dir, seed=config.seed)
    _emit(summary)
    return 0


def _cmd_eval(args) -> int:
    config = build_config(args)
    if not Path(args.results).is_file():
        raise ConfigError(f"results path does not exist: {args.results}")
    records = []
    with open(args.results, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(
                    f"{args.results}: line {line_no}: bad JSON: {exc}"
                ) from exc
            record.setdefault("docs", [])
            record.setdefault("golden_doc_index", None)
            record.setdefault("predicted_answer", "")
            record.setdefault("predicted_doc", None)
            golds = record.get("gold_answers") or []
            if golds:
                record["em"], record["f1"] = em_f1(
                    record.get("predicted_answer", ""), golds
                )
            else:
                record["em"] = record["f1"] = None
            records.append(record)
    summary = summarize(records, None, (config.w1, config.w2, config.w3))
    if config.out is not None:
        out_dir = Path(config.out)
        _echo_config(config, out_dir)
        _write_json(summary, out_dir / "summary.json")
        write_report(records, summary, out_dir, seed=config.seed)
    _emit(summary)
    return 0


def _prepare_corpus(config: RunConfig, need_scorer: bool = True):
    instances, _ = _load_instances(config)
    instances = [ensure_golden_labels(inst) for inst in instances]
    store = _load_store(config)
    stats = compute_idf(instances)
    scorer = _make_scorer(config, stats, instances) if need_scorer else None
    prepared = prepare_all(
        instances, store, stats, scorer, _pipeline_config(config), config.threads
    )
    return instances, prepared


def _mean_f1(prepared, triple) -> float | None:
    scored = [p for p in prepared if p.instance.gold_answers]
    if not scored:
        return None
    total = 0.0
    for prep in scored:
        bundle = fuse_final(prep, *triple)
        total += em_f1(bundle.predicted_answer, prep.instance.gold_answers)[1]
    return total / len(scored)


def _cmd_grid_search(args) -> int:
    config = build_config(args)
    _require(config, "corpus")
    _, prepared = _prepare_corpus(config)
    grid = weight_grid(config.grid)
    best = grid_search(prepared, grid)
    payload = {
        "weights": list(best),
        "mean_f1": _mean_f1(prepared, best),
        "grid": [
            {"weights": list(triple), "mean_f1": _mean_f1(prepared, triple)}
            for triple in grid
        ],
    }
    if config.out is not None:
        out_dir = Path(config.out)
        _echo_config(config, out_dir)
        _write_json(payload, out_dir / "grid_search.json")
    _emit(payload)
    return 0


def _cmd_inject_golden_eval(args) -> int:
    config = build_config(args)
    _require(config, "corpus")
    n = args.inject_n
    if n < 1:
        raise ConfigError("--inject-n must be >= 1")
    instances, prepared = _prepare_corpus(config)
    rankings = []
    injected = []
    bound_rows = []
    for prep in prepared:
        bundle = fuse_final(prep, config.w1, config.w2, config.w3)
        ranking = rank_documents(bundle.s_final)
        rankings.append(ranking)
        if prep.instance.golden_doc_index is not None and n <= len(ranking):
            injected.append(inject_golden(prep.instance, ranking, n))
        else:
            injected.append(ranking)
        if prep.instance.gold_answers:
            em_max, f1_max = all_answer_bound(prep.instance, prep.outputs)
            _, pipeline_f1 = em_f1(
                bundle.predicted_answer, prep.instance.gold_answers
            )
            bound_rows.append((em_max, f1_max, pipeline_f1))
    labeled = [i for i in instances if i.golden_doc_index is not None]
    payload = {
        "n": n,
        "labeled_questions": len(labeled),
        "p_at_n_before": p_at_k(instances, rankings, n) if labeled else None,
        "p_at_n_after": p_at_k(instances, injected, n) if labeled else None,
        "all_answer_em": (
            sum(r[0] for r in bound_rows) / len(bound_rows) if bound_rows else None
        ),
        "all_answer_f1": (
            sum(r[1] for r in bound_rows) / len(bound_rows) if bound_rows else None
        ),
        "pipeline_f1": (
            sum(r[2] for r in bound_rows) / len(bound_rows) if bound_rows else None
        ),
        "bound_violations": sum(1 for em, f1, pf1 in bound_rows if f1 < pf1),
    }
    if config.out is not None:
        out_dir = Path(config.out)
        _echo_config(config, out_dir)
        _write_json(payload, out_dir / "inject_golden.json")
    _emit(payload)
    return 0


# --- parser ---------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--corpus", help="corpus JSONL path")
    parser.add_argument("--triples", help="KB triples TSV path")
    parser.add_argument("--blocklist", help="relation blocklist path")
    parser.add_argument("--t1", type=int, help="question-phrase document cap")
    parser.add_argument("--t2", type=int, help="per-document linked-token cap")
    parser.add_argument("--wq", type=float, help="q-link term weight")
    parser.add_argument("--wd", type=float, help="d-link term weight")
    parser.add_argument("--w1", type=float, help="retrieval score weight")
    parser.add_argument("--w2", type=float, help="reader score weight")
    parser.add_argument("--w3", type=float, help="rerank score weight")
    parser.add_argument(
        "--grid", type=_parse_grid, help="comma-separated grid values per axis"
    )
    parser.add_argument("--scorer", choices=["lexical", "file"], help="scorer kind")
    parser.add_argument("--scorer-file", help="scorer protocol JSONL path")
    parser.add_argument("--max-tokens", type=int, help="instance token cap")
    parser.add_argument("--max-span-len", type=int, help="answer span length cap")
    parser.add_argument(
        "--allow-single-token",
        type=_parse_bool,
        metavar="{true,false}",
        help="permit single-token answer spans",
    )
    parser.add_argument("--out", help="output file or directory")
    parser.add_argument("--seed", type=int, help="seed for sampled diagnostics")
    parser.add_argument("--threads", type=int, help="question-level parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linkqa",
        description="Knowledge-aided question answering over candidate documents.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = [
        ("ingest", _cmd_ingest, "validate and summarize a corpus file"),
        ("build-graphs", _cmd_build_graphs, "write the link-graph export"),
        ("export-tokens", _cmd_export_tokens, "write the tokenized corpus"),
        ("run", _cmd_run, "run the full pipeline and write results"),
        ("eval", _cmd_eval, "recompute metrics from a results file"),
        ("grid-search", _cmd_grid_search, "search fusion weights on a dev corpus"),
        (
            "inject-golden-eval",
            _cmd_inject_golden_eval,
            "golden-injection and all-answer diagnostic bounds",
        ),
    ]
    for name, handler, help_text in commands:
        command = sub.add_parser(name, help=help_text)
        _add_common(command)
        if name == "eval":
            command.add_argument("--results", required=True, help="results JSONL path")
        if name == "inject-golden-eval":
            command.add_argument(
                "--inject-n", type=int, default=1, help="rank to inject the golden doc at"
            )
        command.set_defaults(handler=handler)
    return parser


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except (
        ConfigError,
        CorpusFormatError,
        TripleFormatError,
        ScorerFileError,
        OSError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
