"""Bagged depth-limited trees with per-split feature sampling."""

import math

import numpy as np

from .tree import DecisionTree


class RandomForest:
    def __init__(self, n_estimators=100, max_depth=5, max_features="sqrt", bootstrap=True, seed=0):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed

    def _n_split_features(self, n_features):
        if self.max_features == "sqrt":
            return max(1, int(math.sqrt(n_features)))
        if self.max_features is None:
            return n_features
        return max(1, min(int(self.max_features), n_features))

    def fit(self, x, y, n_classes):
        x = np.asarray(x, dtype=np.float64)
        n = len(y)
        m = self._n_split_features(x.shape[1])
        self.n_classes_ = n_classes
        self.trees_ = []
        # one independent stream per tree, so tree i does not depend on the others
        for stream in np.random.SeedSequence(self.seed).spawn(self.n_estimators):
            rng = np.random.default_rng(stream)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(max_depth=self.max_depth, max_features=m, rng=rng)
            self.trees_.append(tree.fit(x, y, n_classes, sample_idx=idx))
        return self

    def predict(self, x):
        votes = np.zeros((len(x), self.n_classes_), dtype=np.int64)
        rows = np.arange(len(x))
        for tree in self.trees_:
            votes[rows, tree.predict(x)] += 1
        return np.argmax(votes, axis=1)  # first maximum: lowest class id wins ties

    def get_state(self):
        sizes = np.array([t.node_count for t in self.trees_], dtype=np.int64)
        state = {"tree_sizes": sizes}
        for key in ("feature", "threshold", "left", "right", "value"):
            state[key] = np.concatenate([t.get_state()[key] for t in self.trees_])
        return state

    @classmethod
    def from_state(cls, state, n_classes, **params):
        forest = cls(**params)
        forest.n_classes_ = n_classes
        bounds = np.concatenate([[0], np.cumsum(state["tree_sizes"])])
        forest.trees_ = [
            DecisionTree.from_state({k: state[k][a:b] for k in ("feature", "threshold", "left", "right", "value")})
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        return forest
