"""Multi-class dialect identification pipeline.

Preprocess tweet corpora, train or collect multiple classifier backends,
combine them with a hard-voting ensemble, and score with macro-F1. Backends
exchange predictions through a TSV file protocol, so the native TF-IDF
softmax baseline and external transformer adapters plug into the same
ensembler and evaluator.
"""

__version__ = "0.1.0"

from .corpus import Corpus, LabeledExample, SplitSpec, load_corpus, save_corpus, split_corpus
from .ensemble import VotePolicy, agreement_report, hard_vote, soft_vote
from .errors import (
    AlignmentError,
    DialectIdError,
    EncodingError,
    ParseError,
    StageError,
    ValidationError,
)
from .evaluation import (
    ConfusionMatrix,
    MetricsReport,
    compare_models,
    confusion_matrix,
    macro_f1,
    metrics_report,
    weighted_f1,
)
from .predfile import BackendManifest, PredictionSet, read_predictions, write_predictions
from .preprocess import CleaningConfig, clean_corpus, clean_text

__all__ = [
    "AlignmentError",
    "BackendManifest",
    "CleaningConfig",
    "ConfusionMatrix",
    "Corpus",
    "DialectIdError",
    "EncodingError",
    "LabeledExample",
    "MetricsReport",
    "ParseError",
    "PredictionSet",
    "SplitSpec",
    "StageError",
    "ValidationError",
    "VotePolicy",
    "agreement_report",
    "clean_corpus",
    "clean_text",
    "compare_models",
    "confusion_matrix",
    "hard_vote",
    "load_corpus",
    "macro_f1",
    "metrics_report",
    "read_predictions",
    "save_corpus",
    "soft_vote",
    "split_corpus",
    "weighted_f1",
    "write_predictions",
]
