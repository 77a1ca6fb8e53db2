"""Brute-force k-nearest-neighbor voting."""

import numpy as np

_CHUNK_ELEMENTS = 1 << 23


def squared_distances(queries, train):
    """Exact squared Euclidean distances, accumulated one feature at a time.

    Avoids the ``|a|^2 - 2ab + |b|^2`` expansion so that identical points
    are at distance exactly 0 and ties compare exactly.
    """
    out = np.zeros((len(queries), len(train)))
    buf = np.empty_like(out)
    for f in range(train.shape[1]):
        np.subtract(train[:, f][None, :], queries[:, f][:, None], out=buf)
        np.multiply(buf, buf, out=buf)
        out += buf
    return out


def nearest(dist, k):
    """Indices of the k smallest entries per row; equal distances go to the lower index."""
    m, n = dist.shape
    k = min(k, n)
    kth = np.partition(dist, k - 1, axis=1)[:, k - 1]
    mask = dist <= kth[:, None]
    counts = mask.sum(axis=1)
    out = np.empty((m, k), dtype=np.int64)
    exact = counts == k
    if exact.any():
        # row-major nonzero keeps ascending index order within each row
        cols = np.nonzero(mask[exact])[1].reshape(-1, k)
        sub = dist[exact][np.arange(cols.shape[0])[:, None], cols]
        order = np.argsort(sub, axis=1, kind="stable")
        out[exact] = np.take_along_axis(cols, order, axis=1)
    for r in np.flatnonzero(~exact):
        cand = np.flatnonzero(mask[r])
        out[r] = cand[np.argsort(dist[r, cand], kind="stable")[:k]]
    return out


class KNeighbors:
    def __init__(self, n_neighbors=5):
        self.n_neighbors = n_neighbors

    def fit(self, x, y, n_classes):
        self.x_ = np.array(x, dtype=np.float64)
        self.y_ = np.asarray(y, dtype=np.int64).copy()
        self.n_classes_ = n_classes
        return self

    def kneighbors(self, x):
        x = np.asarray(x, dtype=np.float64)
        chunk = max(1, _CHUNK_ELEMENTS // max(1, len(self.x_)))
        parts = []
        for start in range(0, len(x), chunk):
            dist = squared_distances(x[start:start + chunk], self.x_)
            parts.append(nearest(dist, self.n_neighbors))
        if not parts:
            return np.empty((0, min(self.n_neighbors, len(self.x_))), dtype=np.int64)
        return np.concatenate(parts)

    def predict(self, x):
        labels = self.y_[self.kneighbors(x)]
        votes = np.zeros((len(labels), self.n_classes_), dtype=np.int64)
        for j in range(labels.shape[1]):
            votes[np.arange(len(labels)), labels[:, j]] += 1
        return np.argmax(votes, axis=1)

    def get_state(self):
        return {"x": self.x_, "y": self.y_}

    @classmethod
    def from_state(cls, state, n_classes, **params):
        model = cls(**params)
        model.x_, model.y_, model.n_classes_ = state["x"], state["y"], n_classes
        return model
