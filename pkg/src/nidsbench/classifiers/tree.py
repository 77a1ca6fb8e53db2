"""CART decision tree with Gini impurity."""

import numpy as np


def gini(counts):
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return 1.0 - float(np.sum(p * p))


def best_split(x, y, n_classes, idx, features):
    """Best Gini split of the samples ``idx`` over the candidate ``features``.

    Returns ``(feature, threshold, impurity_decrease)`` or ``None`` when no
    feature separates the samples.  Thresholds sit at midpoints between
    consecutive distinct values; ties go to the lowest feature index, then
    the lowest threshold.
    """
    n = len(idx)
    ys = y[idx]
    total = np.bincount(ys, minlength=n_classes).astype(np.float64)
    parent_term = float(np.dot(total, total)) / n
    onehot = np.zeros((n, n_classes))
    best = None
    best_score = -np.inf
    for f in features:
        xs = x[idx, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        valid = np.flatnonzero(xs[:-1] < xs[1:])
        if valid.size == 0:
            continue
        onehot[:] = 0.0
        onehot[np.arange(n), ys[order]] = 1.0
        left = np.cumsum(onehot, axis=0)[valid]
        right = total - left
        n_left = (valid + 1).astype(np.float64)
        n_right = n - n_left
        # sum of squared class counts over child size, larger is purer
        score = np.einsum("ij,ij->i", left, left) / n_left + np.einsum("ij,ij->i", right, right) / n_right
        i = int(np.argmax(score))
        if score[i] > best_score:
            best_score = float(score[i])
            lo, hi = xs[valid[i]], xs[valid[i] + 1]
            thr = lo / 2.0 + hi / 2.0
            if thr >= hi or thr < lo:
                thr = lo
            best = (int(f), float(thr))
    if best is None:
        return None
    return best[0], best[1], (best_score - parent_term) / n


class DecisionTree:
    """Binary tree stored as flat node arrays; leaves have ``feature == -1``."""

    def __init__(self, max_depth=None, max_features=None, min_samples_split=2, rng=None):
        self.max_depth = max_depth
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.rng = rng

    def fit(self, x, y, n_classes, sample_idx=None):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n_features = x.shape[1]
        idx = np.arange(len(y)) if sample_idx is None else np.asarray(sample_idx)
        m = n_features if self.max_features is None else min(int(self.max_features), n_features)

        feature, threshold, left, right, value = [], [], [], [], []

        def new_node(node_idx):
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            value.append(np.bincount(y[node_idx], minlength=n_classes))
            return len(feature) - 1

        stack = [(new_node(idx), idx, 0)]
        while stack:
            node, node_idx, depth = stack.pop()
            counts = value[node]
            if (
                len(node_idx) < self.min_samples_split
                or np.count_nonzero(counts) <= 1
                or (self.max_depth is not None and depth >= self.max_depth)
            ):
                continue
            if m < n_features:
                candidates = np.sort(self.rng.choice(n_features, size=m, replace=False))
            else:
                candidates = range(n_features)
            split = best_split(x, y, n_classes, node_idx, candidates)
            if split is None:
                continue
            f, thr, _ = split
            go_left = x[node_idx, f] <= thr
            li, ri = node_idx[go_left], node_idx[~go_left]
            feature[node], threshold[node] = f, thr
            left_id = new_node(li)
            right_id = new_node(ri)
            left[node], right[node] = left_id, right_id
            # right first so the left subtree is expanded (and numbered) first
            stack.append((right_id, ri, depth + 1))
            stack.append((left_id, li, depth + 1))

        self.feature_ = np.array(feature, dtype=np.int64)
        self.threshold_ = np.array(threshold, dtype=np.float64)
        self.left_ = np.array(left, dtype=np.int64)
        self.right_ = np.array(right, dtype=np.int64)
        self.value_ = np.array(value, dtype=np.int64).reshape(len(feature), n_classes)
        return self

    @property
    def node_count(self):
        return len(self.feature_)

    def depth(self):
        depths = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature_[node] >= 0:
                depths[self.left_[node]] = depths[self.right_[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, x):
        """Leaf index reached by every sample."""
        x = np.asarray(x, dtype=np.float64)
        node = np.zeros(len(x), dtype=np.int64)
        while True:
            f = self.feature_[node]
            inner = np.flatnonzero(f >= 0)
            if inner.size == 0:
                return node
            cur = node[inner]
            go_left = x[inner, f[inner]] <= self.threshold_[cur]
            node[inner] = np.where(go_left, self.left_[cur], self.right_[cur])

    def predict(self, x):
        return np.argmax(self.value_[self.apply(x)], axis=1)

    def get_state(self):
        return {
            "feature": self.feature_,
            "threshold": self.threshold_,
            "left": self.left_,
            "right": self.right_,
            "value": self.value_,
        }

    @classmethod
    def from_state(cls, state, **params):
        tree = cls(**params)
        tree.feature_ = state["feature"]
        tree.threshold_ = state["threshold"]
        tree.left_ = state["left"]
        tree.right_ = state["right"]
        tree.value_ = state["value"]
        return tree
