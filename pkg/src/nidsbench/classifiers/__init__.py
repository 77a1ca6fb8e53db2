"""Five classifiers behind one ``fit``/``predict`` contract.

``fit`` and ``predict`` take either a :class:`~nidsbench.ingest.DesignMatrix`
(features along rows) or a samples-major ``N x K`` array, and return the
wall-clock duration of the training or prediction call alongside the result.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

from ..errors import DimensionMismatch, NonFiniteFeature, SingleClassInput
from ..ingest import DesignMatrix
from .forest import RandomForest
from .mlp import MLP
from .naive_bayes import BernoulliNB
from .neighbors import KNeighbors
from .tree import DecisionTree

KINDS = ("decision_tree", "random_forest", "k_neighbors", "mlp", "bernoulli_nb")

DEFAULTS: dict[str, dict[str, Any]] = {
    "decision_tree": {"max_depth": None},
    "random_forest": {"n_estimators": 100, "max_depth": 5, "max_features": "sqrt", "bootstrap": True},
    "k_neighbors": {"n_neighbors": 5},
    "mlp": {
        "hidden_units": 200,
        "max_epochs": 100,
        "learning_rate": 1e-3,
        "beta1": 0.9,
        "beta2": 0.999,
        "epsilon": 1e-8,
        "batch_size": 200,
    },
    "bernoulli_nb": {"alpha": 1.0, "binarize": 0.0},
}

_COUNTS = ("max_depth", "n_estimators", "n_neighbors", "hidden_units", "max_epochs", "batch_size")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}; expected one of {KINDS}")
        unknown = set(self.hyperparams) - set(DEFAULTS[self.kind])
        if unknown:
            raise ValueError(f"unknown hyperparameters for {self.kind}: {sorted(unknown)}")
        merged = {**DEFAULTS[self.kind], **self.hyperparams}
        for key in _COUNTS:
            value = merged.get(key)
            if value is not None and (int(value) != value or value < 1):
                raise ValueError(f"{key} must be a positive integer, got {value!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "hyperparams", MappingProxyType(merged))
        object.__setattr__(self, "seed", int(self.seed))

    def to_dict(self):
        return {"kind": self.kind, "hyperparams": dict(self.hyperparams), "seed": self.seed}


def build_estimator(spec: ClassifierSpec):
    hp = dict(spec.hyperparams)
    if spec.kind == "decision_tree":
        return DecisionTree(max_depth=hp["max_depth"])
    if spec.kind == "random_forest":
        return RandomForest(seed=spec.seed, **hp)
    if spec.kind == "k_neighbors":
        return KNeighbors(**hp)
    if spec.kind == "mlp":
        return MLP(seed=spec.seed, **hp)
    return BernoulliNB(**hp)


def _estimator_params(spec):
    hp = dict(spec.hyperparams)
    if spec.kind in ("random_forest", "mlp"):
        hp["seed"] = spec.seed
    return hp


_ESTIMATOR_TYPES = {
    "decision_tree": DecisionTree,
    "random_forest": RandomForest,
    "k_neighbors": KNeighbors,
    "mlp": MLP,
    "bernoulli_nb": BernoulliNB,
}


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    estimator: Any
    classes: np.ndarray
    input_dim: int

    def get_state(self):
        return self.estimator.get_state()

    @classmethod
    def from_state(cls, spec, classes, input_dim, state):
        est_type = _ESTIMATOR_TYPES[spec.kind]
        if spec.kind == "decision_tree":
            estimator = est_type.from_state(state, **_estimator_params(spec))
        else:
            estimator = est_type.from_state(state, n_classes=len(classes), **_estimator_params(spec))
        return cls(spec, estimator, np.asarray(classes), int(input_dim))


def _samples(u):
    if isinstance(u, DesignMatrix):
        return u.samples()
    x = np.asarray(u, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("expected a 2-D samples x features array")
    return x


def fit(spec: ClassifierSpec, u, y) -> tuple[TrainedModel, float]:
    """Train a classifier; returns the model and the fit duration in seconds."""
    x = _samples(u)
    y = np.asarray(y)
    if len(y) != len(x):
        raise DimensionMismatch(f"{len(x)} samples but {len(y)} labels")
    if len(y) < 2:
        raise SingleClassInput("need at least two samples")
    if not np.all(np.isfinite(x)):
        raise NonFiniteFeature("training features contain NaN or infinity")
    classes, codes = np.unique(y, return_inverse=True)
    if len(classes) < 2:
        raise SingleClassInput(f"only one label present: {classes[0]!r}")
    x = np.ascontiguousarray(x) if spec.kind in ("k_neighbors", "mlp", "bernoulli_nb") else np.asfortranarray(x)
    estimator = build_estimator(spec)
    start = time.perf_counter()
    estimator.fit(x, codes, len(classes))
    duration = time.perf_counter() - start
    return TrainedModel(spec, estimator, classes, x.shape[1]), duration


def predict(model: TrainedModel, u) -> tuple[np.ndarray, float]:
    """Predict labels for every sample; returns labels and the duration in seconds."""
    x = _samples(u)
    if x.shape[1] != model.input_dim:
        raise DimensionMismatch(f"model expects {model.input_dim} features, got {x.shape[1]}")
    x = np.ascontiguousarray(x)
    start = time.perf_counter()
    codes = model.estimator.predict(x)
    duration = time.perf_counter() - start
    return model.classes[codes], duration


__all__ = [
    "KINDS",
    "DEFAULTS",
    "ClassifierSpec",
    "TrainedModel",
    "fit",
    "predict",
    "build_estimator",
    "DecisionTree",
    "RandomForest",
    "KNeighbors",
    "MLP",
    "BernoulliNB",
]
