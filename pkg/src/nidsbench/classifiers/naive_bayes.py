"""Bernoulli naive Bayes on features binarized at a fixed threshold."""

import numpy as np


class BernoulliNB:
    def __init__(self, alpha=1.0, binarize=0.0):
        self.alpha = alpha
        self.binarize = binarize

    def fit(self, x, y, n_classes):
        xb = (np.asarray(x) > self.binarize).astype(np.float64)
        y = np.asarray(y, dtype=np.int64)
        class_count = np.bincount(y, minlength=n_classes).astype(np.float64)
        onehot = np.zeros((len(y), n_classes))
        onehot[np.arange(len(y)), y] = 1.0
        feature_count = onehot.T @ xb
        with np.errstate(divide="ignore"):
            self.class_log_prior_ = np.log(class_count / len(y))
        smoothed = (feature_count + self.alpha) / (class_count[:, None] + 2.0 * self.alpha)
        self.feature_log_prob_ = np.log(smoothed)
        self.feature_log_neg_prob_ = np.log1p(-smoothed)
        return self

    def joint_log_likelihood(self, x):
        xb = (np.asarray(x) > self.binarize).astype(np.float64)
        return (
            xb @ (self.feature_log_prob_ - self.feature_log_neg_prob_).T
            + self.feature_log_neg_prob_.sum(axis=1)
            + self.class_log_prior_
        )

    def predict(self, x):
        return np.argmax(self.joint_log_likelihood(x), axis=1)

    def get_state(self):
        return {
            "class_log_prior": self.class_log_prior_,
            "feature_log_prob": self.feature_log_prob_,
            "feature_log_neg_prob": self.feature_log_neg_prob_,
        }

    @classmethod
    def from_state(cls, state, n_classes=None, **params):
        model = cls(**params)
        model.class_log_prior_ = state["class_log_prior"]
        model.feature_log_prob_ = state["feature_log_prob"]
        model.feature_log_neg_prob_ = state["feature_log_neg_prob"]
        return model
