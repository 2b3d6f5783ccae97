"""Accuracy, f1 and ROC AUC for binary labels (positive class = 1)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from ..errors import DataError, DimensionError

THRESHOLD = 0.5


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: Optional[float]
    confusion: np.ndarray  # [[TN, FP], [FN, TP]]
    threshold: float = THRESHOLD

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "confusion": self.confusion.tolist(),
            "threshold": self.threshold,
        }


def _check(labels, scores):
    y = np.asarray(labels)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape or y.ndim != 1:
        raise DimensionError(f"labels {y.shape} and scores {s.shape} must be equal-length vectors")
    if not np.all((y == 0) | (y == 1)):
        raise DataError("labels must be 0 or 1")
    if not np.all(np.isfinite(s)):
        raise DataError("scores must be finite")
    return y.astype(int), s


def auc_score(labels, scores) -> Optional[float]:
    """Area under the ROC curve via the rank-sum statistic; None for one class.

    Tied scores get average ranks, which equals trapezoidal integration of
    the ROC curve over all thresholds.
    """
    y, s = _check(labels, scores)
    pos = int(y.sum())
    neg = y.size - pos
    if pos == 0 or neg == 0:
        return None
    ranks = rankdata(s)
    return float((ranks[y == 1].sum() - pos * (pos + 1) / 2) / (pos * neg))


def roc_curve(labels, scores):
    """(fpr, tpr) vertices over all distinct thresholds, from (0,0) to (1,1)."""
    y, s = _check(labels, scores)
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s)), y.size - 1]
    tp = np.cumsum(y)[last]
    fp = (last + 1) - tp
    return np.r_[0, fp / max(fp[-1], 1)], np.r_[0, tp / max(tp[-1], 1)]


def metrics(labels, scores, threshold: float = THRESHOLD) -> MetricsReport:
    y, s = _check(labels, scores)
    pred = (s >= threshold).astype(int)
    tp = int(np.sum((pred == 1) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    total = y.size
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricsReport(
        accuracy=(tp + tn) / total if total else 0.0,
        precision=precision,
        recall=recall,
        f1=f1,
        auc=auc_score(y, s),
        confusion=np.array([[tn, fp], [fn, tp]]),
        threshold=threshold,
    )
