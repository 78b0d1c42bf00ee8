"""gramprof: grammatical profiling with a from-scratch span-classification transformer.

Enumerates every token span of a sentence, classifies each span as a
grammatical item (or as empty), and optionally predicts a six-level
difficulty per sentence. Includes training, evaluation, cross-validation,
a document index with faceted search, an HTTP service, and a CLI.
"""

from .corpus import (
    CEFR_LEVELS,
    EMPTY_TAG,
    UNK_TAG,
    CorpusError,
    Level,
    LevelSet,
    Sentence,
    SpanAnnotation,
    TagInventory,
    Token,
    Vocab,
    build_tag_inventory,
    build_vocab,
    load_corpus,
    namespace_tags,
    save_corpus,
    tokenize,
)
from .encoder import Encoder, EncoderConfig, EncoderOutput
from .index import DocumentIndex, DocumentIndexError, DocumentRecord, index_document
from .metrics import MetricsReport, labeled_prf, macro_prf, mean_reports, unlabeled_prf
from .profiler import Prediction, Profiler, ProfilerError, split_sentences
from .span_model import DecodedSpan, GrammarProfilerModel, SpanIndex, enumerate_spans
from .trainer import (
    Checkpoint,
    TrainConfig,
    TrainingError,
    cross_validate,
    evaluate,
    grid_search_alpha,
    load_checkpoint,
    save_checkpoint,
    train,
    train_multilingual,
)

__version__ = "0.1.0"

__all__ = [
    "CEFR_LEVELS",
    "EMPTY_TAG",
    "UNK_TAG",
    "Checkpoint",
    "CorpusError",
    "DecodedSpan",
    "DocumentIndex",
    "DocumentIndexError",
    "DocumentRecord",
    "Encoder",
    "EncoderConfig",
    "EncoderOutput",
    "GrammarProfilerModel",
    "Level",
    "LevelSet",
    "MetricsReport",
    "Prediction",
    "Profiler",
    "ProfilerError",
    "Sentence",
    "SpanAnnotation",
    "SpanIndex",
    "TagInventory",
    "Token",
    "TrainConfig",
    "TrainingError",
    "Vocab",
    "build_tag_inventory",
    "build_vocab",
    "cross_validate",
    "enumerate_spans",
    "evaluate",
    "grid_search_alpha",
    "index_document",
    "labeled_prf",
    "load_checkpoint",
    "load_corpus",
    "macro_prf",
    "mean_reports",
    "namespace_tags",
    "save_checkpoint",
    "save_corpus",
    "split_sentences",
    "tokenize",
    "train",
    "train_multilingual",
    "unlabeled_prf",
]
