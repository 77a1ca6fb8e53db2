"""Confusion-matrix metrics and the training/inference timing decomposition."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import LengthMismatch, UnknownLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with true classes along rows and predicted classes along columns."""

    counts: np.ndarray
    classes: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion(y_true, y_pred, classes: Sequence) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{len(y_true)} true labels vs {len(y_pred)} predictions")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    try:
        ti = np.fromiter((index[v] for v in y_true.tolist()), dtype=np.int64, count=len(y_true))
        pi = np.fromiter((index[v] for v in y_pred.tolist()), dtype=np.int64, count=len(y_pred))
    except KeyError as exc:
        raise UnknownLabel(f"label {exc.args[0]!r} not in {classes}") from None
    c = len(classes)
    counts = np.bincount(ti * c + pi, minlength=c * c).reshape(c, c)
    return ConfusionMatrix(counts, classes)


def f1_score(precision, recall):
    """Harmonic mean of precision and recall (0 when both are 0)."""
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def per_class_precision_recall(cm: ConfusionMatrix):
    counts = cm.counts.astype(np.float64)
    diag = np.diag(counts)
    colsum = counts.sum(axis=0)
    rowsum = counts.sum(axis=1)
    precision = np.divide(diag, colsum, out=np.zeros_like(diag), where=colsum > 0)
    recall = np.divide(diag, rowsum, out=np.zeros_like(diag), where=rowsum > 0)
    return precision, recall


def aggregate_prf(cm: ConfusionMatrix, averaging="weighted"):
    """Averaged precision and recall, and F1 from those two, as percentages.

    ``weighted`` averages per-class values by true-class support; ``macro``
    takes the plain mean over classes that occur in either labels or
    predictions.  Classes never predicted contribute precision 0.
    """
    if cm.total < 1:
        raise ValueError("confusion matrix is empty")
    precision, recall = per_class_precision_recall(cm)
    support = cm.counts.sum(axis=1).astype(np.float64)
    if averaging == "weighted":
        weights = support / support.sum()
    elif averaging == "macro":
        present = (support + cm.counts.sum(axis=0)) > 0
        weights = present / present.sum()
    else:
        raise ValueError(f"unknown averaging {averaging!r}")
    p = 100.0 * float(np.dot(weights, precision))
    r = 100.0 * float(np.dot(weights, recall))
    return p, r, f1_score(p, r)


def per_class_accuracy(cm: ConfusionMatrix) -> np.ndarray:
    """Recall of each true class in percent; NaN for classes without samples."""
    counts = cm.counts.astype(np.float64)
    rowsum = counts.sum(axis=1)
    out = np.full(len(rowsum), np.nan)
    np.divide(100.0 * np.diag(counts), rowsum, out=out, where=rowsum > 0)
    return out


def overall_accuracy(cm: ConfusionMatrix) -> float:
    return 100.0 * np.trace(cm.counts) / cm.total


@dataclass(frozen=True)
class Timing:
    fit_model: float
    fit_reducer: float
    predict_model: float
    transform_reducer: float
    training_time: float
    inference_time_per_sample: float  # microseconds

    def to_dict(self):
        return asdict(self)


def compose_timing(fit_reducer, fit_model, transform_reducer, predict_model, n_test) -> Timing:
    """Training time is model fit plus reducer fit; inference is per test sample, in microseconds.

    Preprocessing is not part of either figure.
    """
    parts = (fit_reducer, fit_model, transform_reducer, predict_model)
    if any(not math.isfinite(t) or t < 0 for t in parts):
        raise ValueError(f"durations must be finite and non-negative, got {parts}")
    if n_test < 1:
        raise ValueError("n_test must be at least 1")
    return Timing(
        fit_model=float(fit_model),
        fit_reducer=float(fit_reducer),
        predict_model=float(predict_model),
        transform_reducer=float(transform_reducer),
        training_time=float(fit_model) + float(fit_reducer),
        inference_time_per_sample=(float(predict_model) + float(transform_reducer)) / n_test * 1e6,
    )


@dataclass(frozen=True)
class EvalReport:
    """Metrics and timings of one (task, reducer, classifier) run."""

    task: str
    method: str
    k: int | None
    classifier: str
    classes: tuple
    confusion: np.ndarray
    precision: float
    recall: float
    f1: float
    per_class_accuracy: np.ndarray
    timing: Timing
    n_test: int
    averaging: str = "weighted"
    fingerprint: str = ""
    config: dict = field(default_factory=dict)

    def metric_fields(self) -> dict[str, Any]:
        """The timing-independent part, for determinism comparisons."""
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "per_class_accuracy": [None if math.isnan(v) else v for v in self.per_class_accuracy],
            "confusion": self.confusion.tolist(),
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "task": self.task,
            "method": self.method,
            "k": self.k,
            "classifier": self.classifier,
            "classes": list(self.classes),
            "averaging": self.averaging,
            "n_test": self.n_test,
            **self.metric_fields(),
            "timing": self.timing.to_dict(),
            "fingerprint": self.fingerprint,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EvalReport":
        return cls(
            task=d["task"],
            method=d["method"],
            k=d["k"],
            classifier=d["classifier"],
            classes=tuple(d["classes"]),
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            precision=float(d["precision"]),
            recall=float(d["recall"]),
            f1=float(d["f1"]),
            per_class_accuracy=np.array([np.nan if v is None else v for v in d["per_class_accuracy"]], dtype=float),
            timing=Timing(**d["timing"]),
            n_test=int(d["n_test"]),
            averaging=d.get("averaging", "weighted"),
            fingerprint=d.get("fingerprint", ""),
            config=d.get("config", {}),
        )


def evaluate(y_true, y_pred, classes, timing: Timing, averaging="weighted", **meta) -> EvalReport:
    cm = confusion(y_true, y_pred, classes)
    p, r, f1 = aggregate_prf(cm, averaging)
    return EvalReport(
        classes=cm.classes,
        confusion=cm.counts,
        precision=p,
        recall=r,
        f1=f1,
        per_class_accuracy=per_class_accuracy(cm),
        timing=timing,
        n_test=cm.total,
        averaging=averaging,
        **meta,
    )
