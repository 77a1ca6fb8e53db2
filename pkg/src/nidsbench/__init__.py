"""Flow-record classification with reduced feature sets.

Correlation-ranked feature picking and PCA projection are fitted on
UNSW-NB15 style records and compared in front of five classifiers.
"""

from .errors import NidsBenchError
from .ingest import (
    CLASSES,
    UNSW_NB15_SCHEMA,
    DesignMatrix,
    EncoderSpec,
    FeatureTable,
    apply_encoder,
    fit_encoder,
    load_csv,
)
from .linalg import eigh_symmetric
from .metrics import (
    ConfusionMatrix,
    EvalReport,
    aggregate_prf,
    compose_timing,
    confusion,
    f1_score,
    per_class_accuracy,
)
from .reduction import (
    CorrelationStats,
    ExtractionModel,
    SelectionModel,
    apply_selection,
    correlation_matrix,
    pca_fit,
    pca_transform,
    select_features,
)

__version__ = "0.1.0"

__all__ = [
    "CLASSES",
    "UNSW_NB15_SCHEMA",
    "ConfusionMatrix",
    "CorrelationStats",
    "DesignMatrix",
    "EncoderSpec",
    "EvalReport",
    "ExtractionModel",
    "FeatureTable",
    "NidsBenchError",
    "SelectionModel",
    "aggregate_prf",
    "apply_encoder",
    "apply_selection",
    "compose_timing",
    "confusion",
    "correlation_matrix",
    "eigh_symmetric",
    "f1_score",
    "fit_encoder",
    "load_csv",
    "pca_fit",
    "pca_transform",
    "per_class_accuracy",
    "select_features",
]
