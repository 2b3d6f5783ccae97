"""From-scratch binary classifiers and evaluation metrics."""
from .metrics import MetricsReport, auc_score, metrics, roc_curve
from .model import (
    ALGORITHMS,
    DEFAULT_GRIDS,
    EXCLUDED_ALGORITHMS,
    ClassifierSpec,
    SearchResult,
    TrainedModel,
    dumps,
    evaluate,
    grid_search,
    load,
    loads,
    predict,
    predict_score,
    save,
    train,
)

__all__ = [
    "ALGORITHMS",
    "DEFAULT_GRIDS",
    "EXCLUDED_ALGORITHMS",
    "ClassifierSpec",
    "MetricsReport",
    "SearchResult",
    "TrainedModel",
    "auc_score",
    "dumps",
    "evaluate",
    "grid_search",
    "load",
    "loads",
    "metrics",
    "predict",
    "predict_score",
    "roc_curve",
    "save",
    "train",
]
