"""Streaming hashtag recommendation over a sliding window of labeled posts."""

from .classifiers import (
    ClassifierConfig,
    Recommendation,
    classify,
    hybrid_classify,
    knn_classify,
    nb_classify,
    recommend,
    similar_posts,
)
from .estimator import HashtagRecommender, TextPreprocessor
from .evaluation import EvalConfig, EvalReport, run_benchmark, run_evaluation, write_report
from .exceptions import (
    ConfigError,
    EmptyWindowError,
    ParseError,
    SnapshotExpiredError,
    StreamtagError,
    UnlabeledPostError,
)
from .preprocessing import (
    Post,
    PreprocessConfig,
    ProcessedPost,
    parse_corpus_line,
    porter_stem,
    preprocess,
    read_corpus,
    tokenize,
)
from .synthetic import GeneratorSpec, generate, generate_posts
from .weighting import TermWeightConfig, idf, tcor, word_weight
from .window import HashtagStats, ModelWindow, WindowSnapshot, WordStats

__all__ = [
    "ClassifierConfig",
    "Recommendation",
    "classify",
    "hybrid_classify",
    "knn_classify",
    "nb_classify",
    "recommend",
    "similar_posts",
    "HashtagRecommender",
    "TextPreprocessor",
    "EvalConfig",
    "EvalReport",
    "run_benchmark",
    "run_evaluation",
    "write_report",
    "ConfigError",
    "EmptyWindowError",
    "ParseError",
    "SnapshotExpiredError",
    "StreamtagError",
    "UnlabeledPostError",
    "Post",
    "PreprocessConfig",
    "ProcessedPost",
    "parse_corpus_line",
    "porter_stem",
    "preprocess",
    "read_corpus",
    "tokenize",
    "GeneratorSpec",
    "generate",
    "generate_posts",
    "TermWeightConfig",
    "idf",
    "tcor",
    "word_weight",
    "HashtagStats",
    "ModelWindow",
    "WindowSnapshot",
    "WordStats",
]

__version__ = "0.1.0"
