"""Feature reduction: correlation-ranked selection and PCA extraction.

Both reducers are fitted on a training :class:`~nidsbench.ingest.DesignMatrix`
and map any matrix with the same ``D`` features to ``K`` features.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySelection, RankDeficiencyWarning
from .ingest import DesignMatrix
from .linalg import eigh_symmetric

RANK_TOL = 1e-12


def _as_matrix(x, names=None):
    if isinstance(x, DesignMatrix):
        return x
    x = np.asarray(x, dtype=np.float64)
    if names is None:
        names = [f"f{i}" for i in range(x.shape[0])]
    return DesignMatrix(x, tuple(names))


def _row_means(values):
    """Row means with one residual-correction pass."""
    mean = values.mean(axis=1)
    mean += (values - mean[:, None]).mean(axis=1)
    return mean


@dataclass(frozen=True)
class CorrelationStats:
    matrix: np.ndarray
    averages: np.ndarray
    feature_names: tuple[str, ...]
    degenerate: tuple[str, ...] = ()

    def ranking(self) -> list[int]:
        """Feature indices by descending average correlation, then name."""
        return sorted(range(len(self.feature_names)), key=lambda i: (-self.averages[i], self.feature_names[i]))


def correlation_matrix(x, absolute=False) -> CorrelationStats:
    """Pairwise correlation coefficients between features and their row averages.

    ``x`` is a ``D x N`` design matrix (or array).  Means are refined with a
    residual-correction pass and the centered cross-products are corrected
    the same way, which keeps the sums accurate at N in the hundreds of
    thousands.  A feature with zero variance correlates 0.0 with every other
    feature (and 1.0 with itself) and is listed in ``degenerate``.

    The average of row ``i`` includes the diagonal entry.  With
    ``absolute=True`` the averages are taken over ``|c_ij|`` instead.
    """
    dm = _as_matrix(x)
    values = dm.values
    d, n = values.shape
    if n < 2:
        raise ValueError("correlation needs at least two samples")

    centered = values - _row_means(values)[:, None]
    resid = centered.sum(axis=1)
    cross = centered @ centered.T
    cross -= np.outer(resid, resid) / n
    cross = np.triu(cross) + np.triu(cross, 1).T

    # a spread too small to leave any variance after rounding counts as constant
    constant = (values.max(axis=1) == values.min(axis=1)) | (np.diag(cross) <= 0.0)
    std = np.sqrt(np.where(constant, 1.0, np.diag(cross)))
    corr = cross / np.outer(std, std)  # outer product keeps the result exactly symmetric
    corr[constant, :] = 0.0
    corr[:, constant] = 0.0
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    corr.setflags(write=False)

    avg = (np.abs(corr) if absolute else corr).mean(axis=1)
    avg.setflags(write=False)
    degenerate = tuple(name for name, c in zip(dm.feature_names, constant) if c)
    return CorrelationStats(corr, avg, dm.feature_names, degenerate)


@dataclass(frozen=True)
class SelectionModel:
    """Ordered subset of the training features."""

    indices: tuple[int, ...]
    names: tuple[str, ...]
    source_names: tuple[str, ...]
    threshold: float | None = None

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def input_dim(self) -> int:
        return len(self.source_names)


def select_features(stats: CorrelationStats, threshold=None, top_k=None) -> SelectionModel:
    """Pick features by average correlation.

    Exactly one of ``threshold`` (keep features whose average exceeds it) or
    ``top_k`` (keep the ``top_k`` largest averages, ties by name) must be set.
    Selected features are ordered by descending average, then name.
    """
    if (threshold is None) == (top_k is None):
        raise ValueError("give exactly one of threshold or top_k")
    d = len(stats.feature_names)
    ranking = stats.ranking()
    if threshold is not None:
        threshold = float(threshold)
        if not np.isfinite(threshold):
            raise ValueError("threshold must be finite")
        chosen = [i for i in ranking if stats.averages[i] > threshold]
        if not chosen:
            raise EmptySelection(f"no feature has average correlation above {threshold}")
    else:
        top_k = int(top_k)
        if not 1 <= top_k <= d:
            raise ValueError(f"top_k must be in [1, {d}], got {top_k}")
        chosen = ranking[:top_k]
    return SelectionModel(
        indices=tuple(chosen),
        names=tuple(stats.feature_names[i] for i in chosen),
        source_names=stats.feature_names,
        threshold=threshold,
    )


def apply_selection(model: SelectionModel, x: DesignMatrix) -> DesignMatrix:
    """Gather the selected rows; no arithmetic is performed."""
    if not isinstance(x, DesignMatrix):
        x = np.asarray(x, dtype=np.float64)
        x = _as_matrix(x, model.source_names if x.shape[0] == model.input_dim else None)
    if x.n_features != model.input_dim:
        raise DimensionMismatch(f"model expects {model.input_dim} features, got {x.n_features}")
    return x.with_values(x.values[list(model.indices)], model.names)


@dataclass(frozen=True)
class ExtractionModel:
    """PCA projection: ``D x K`` orthonormal components plus the training mean."""

    projection: np.ndarray
    mean: np.ndarray
    eigenvalues: np.ndarray
    source_names: tuple[str, ...] = ()

    @property
    def k(self) -> int:
        return self.projection.shape[1]

    @property
    def input_dim(self) -> int:
        return self.projection.shape[0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f"pc_{i + 1}" for i in range(self.k))


def covariance(x) -> tuple[np.ndarray, np.ndarray]:
    """Training mean and the ``1/N``-normalized covariance of a ``D x N`` matrix."""
    values = _as_matrix(x).values
    n = values.shape[1]
    mean = _row_means(values)
    centered = values - mean[:, None]
    r = centered @ centered.T / n
    return mean, np.triu(r) + np.triu(r, 1).T


def pca_fit(x, k: int) -> ExtractionModel:
    """Fit a rank-``k`` PCA projection on training data.

    Warns with :class:`RankDeficiencyWarning` when the k-th eigenvalue is not
    above 1e-12; the model is still returned.
    """
    dm = _as_matrix(x)
    d, n = dm.values.shape
    if n < 2:
        raise ValueError("PCA needs at least two samples")
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    mean, r = covariance(dm)
    eigvals, eigvecs = eigh_symmetric(r)
    if eigvals[k - 1] <= RANK_TOL:
        warnings.warn(
            f"eigenvalue {k} of the covariance is {eigvals[k - 1]:.3e}; data has rank < {k}",
            RankDeficiencyWarning,
            stacklevel=2,
        )
    w = np.ascontiguousarray(eigvecs[:, :k])
    return ExtractionModel(w, mean, eigvals[:k].copy(), dm.feature_names)


def pca_transform(model: ExtractionModel, x) -> DesignMatrix:
    x = _as_matrix(x)
    if x.n_features != model.input_dim:
        raise DimensionMismatch(f"model expects {model.input_dim} features, got {x.n_features}")
    u = model.projection.T @ (x.values - model.mean[:, None])
    return x.with_values(u, model.names)


def transform(model, x) -> DesignMatrix:
    """Apply either reducer kind."""
    if isinstance(model, SelectionModel):
        return apply_selection(model, x)
    if isinstance(model, ExtractionModel):
        return pca_transform(model, x)
    raise TypeError(f"not a reducer: {type(model).__name__}")
