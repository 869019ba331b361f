"""Knowledge-aided open-domain question answering over candidate documents.

The package retrieves with TF-IDF cosine scores, reads answer spans
from an external or built-in scorer, reranks, and fuses all three
stages with link graphs built from knowledge-base triples.
"""

from .corpus import (
    CorpusFormatError,
    CorpusStats,
    Document,
    IngestResult,
    QuestionInstance,
    compute_idf,
    find_answer_span,
    ingest,
    label_golden,
    normalize_answer,
    tokenize,
)
from .graph import LinkGraphs, build_gd, build_gq, build_graphs, write_graphs
from .kb import (
    Triple,
    TripleFormatError,
    TripleStore,
    load_triples,
    match_phrases,
    normalize_phrase,
)
from .pipeline import (
    LossReport,
    PipelineConfig,
    ScoreBundle,
    all_answer_bound,
    answer,
    em_f1,
    evaluate_corpus,
    grid_search,
    inject_golden,
    losses,
    p_at_k,
    rank_documents,
)
from .rerank import RerankScores, fuse_rerank
from .retrieval import RetrievalScores, fuse_retrieval, tfidf_cosine
from .scorer import (
    ScorerConfig,
    ScorerFileError,
    ScorerOutput,
    lexical_score,
    load_scorer_file,
    make_scorer,
    select_span,
)

__version__ = "0.1.0"

__all__ = [
    "CorpusFormatError",
    "CorpusStats",
    "Document",
    "IngestResult",
    "LinkGraphs",
    "LossReport",
    "PipelineConfig",
    "QuestionInstance",
    "RerankScores",
    "RetrievalScores",
    "ScoreBundle",
    "ScorerConfig",
    "ScorerFileError",
    "ScorerOutput",
    "Triple",
    "TripleFormatError",
    "TripleStore",
    "all_answer_bound",
    "answer",
    "build_gd",
    "build_gq",
    "build_graphs",
    "compute_idf",
    "em_f1",
    "evaluate_corpus",
    "find_answer_span",
    "fuse_rerank",
    "fuse_retrieval",
    "grid_search",
    "ingest",
    "inject_golden",
    "label_golden",
    "lexical_score",
    "load_scorer_file",
    "load_triples",
    "losses",
    "make_scorer",
    "match_phrases",
    "normalize_answer",
    "normalize_phrase",
    "p_at_k",
    "rank_documents",
    "select_span",
    "tfidf_cosine",
    "tokenize",
    "write_graphs",
]
