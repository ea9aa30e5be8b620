"""Multidimensional MT quality evaluation toolkit.

Span-level error annotation (parse/validate/serialize), penalty scoring,
Kendall-tau meta-evaluation, sentence BLEU/chrF, feature-based multi-score
quality regression, corpus splitting, and an HTTP annotation service.
"""

from .corpus import (
    CorpusStats,
    InsufficientUnits,
    Split,
    corpus_stats,
    load_annotated_jsonl,
    load_parallel,
    sample_and_split,
    save_annotated_jsonl,
    save_jsonl,
)
from .experiments import ExperimentTables, run_experiment_suite
from .features import FeatureExtractor, FeatureVector, MissingReference, extract_features
from .metrics import BleuConfig, ChrfConfig, EmptyReference, chrf, sentence_bleu
from .mqm_format import (
    InvalidAnnotation,
    MalformedBlock,
    MalformedEntry,
    parse_document,
    parse_entry,
    serialize_document,
)
from .rank_correlation import (
    CorrelationResult,
    DegenerateInput,
    agreement_report,
    correlation_matrix,
    kendall_tau,
    tau_significance,
)
from .regressor import (
    EvalReport,
    MqmRegressor,
    RegressorConfig,
    TrainedModel,
    evaluate,
    predict,
    train,
)
from .scoring import ScoreReport, count_errors, score_dataset, score_unit
from .taxonomy import (
    Corpus,
    Dimension,
    ErrorAnnotation,
    ErrorCounts,
    MqmScore,
    Severity,
    SpanSide,
    SubErrorType,
    TranslationUnit,
    UnitAnnotation,
    Violation,
    validate_annotation,
)

__version__ = "0.1.0"
