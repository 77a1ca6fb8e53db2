"""Independent reference computations used to check the package.

Everything here is written for clarity, with plain loops where practical,
and shares no code with ``nidsbench``.
"""

import math
from collections import Counter


def correlation_brute(rows):
    """Correlation coefficients of feature rows (list of lists), straight from the definition.

    A zero-variance feature gets 0 against every other feature and 1 on the diagonal.
    """
    d = len(rows)
    n = len(rows[0])
    means = [math.fsum(r) / n for r in rows]
    out = [[0.0] * d for _ in range(d)]
    for i in range(d):
        for j in range(d):
            num = math.fsum((rows[i][t] - means[i]) * (rows[j][t] - means[j]) for t in range(n))
            si = math.sqrt(math.fsum((rows[i][t] - means[i]) ** 2 for t in range(n)))
            sj = math.sqrt(math.fsum((rows[j][t] - means[j]) ** 2 for t in range(n)))
            if i == j:
                out[i][j] = 1.0
            elif si == 0.0 or sj == 0.0:
                out[i][j] = 0.0
            else:
                out[i][j] = num / (si * sj)
    return out


def row_averages(matrix):
    return [math.fsum(r) / len(r) for r in matrix]


def power_iteration(a, iters=5000, seed_vec=None):
    """Largest-magnitude-shifted top eigenpair of a symmetric matrix (list of lists)."""
    n = len(a)
    shift = sum(abs(x) for row in a for x in row)  # makes a + shift*I positive definite
    b = [[a[i][j] + (shift if i == j else 0.0) for j in range(n)] for i in range(n)]
    v = list(seed_vec) if seed_vec else [1.0 / math.sqrt(n) + 0.01 * i for i in range(n)]
    for _ in range(iters):
        w = [math.fsum(b[i][j] * v[j] for j in range(n)) for i in range(n)]
        norm = math.sqrt(math.fsum(x * x for x in w))
        v = [x / norm for x in w]
    av = [math.fsum(a[i][j] * v[j] for j in range(n)) for i in range(n)]
    lam = math.fsum(v[i] * av[i] for i in range(n))
    return lam, v


def naive_projection(w, x, mean):
    """W^T (x - mean) with explicit loops; w is D x K, x is D x N."""
    d, k, n = len(w), len(w[0]), len(x[0])
    out = [[0.0] * n for _ in range(k)]
    for c in range(k):
        for s in range(n):
            acc = 0.0
            for f in range(d):
                acc += w[f][c] * (x[f][s] - mean[f])
            out[c][s] = acc
    return out


def gini_counts(labels):
    n = len(labels)
    if n == 0:
        return 0.0
    return 1.0 - sum((c / n) ** 2 for c in Counter(labels).values())


def exhaustive_split(x, y):
    """Best (feature, threshold, impurity decrease) over all midpoint thresholds.

    ``x`` is a list of samples (lists).  Ties keep the first candidate found,
    scanning features in order and thresholds ascending.
    """
    n = len(y)
    parent = gini_counts(y)
    best = None
    for f in range(len(x[0])):
        values = sorted(set(row[f] for row in x))
        for lo, hi in zip(values, values[1:]):
            thr = lo / 2.0 + hi / 2.0
            left = [y[i] for i in range(n) if x[i][f] <= thr]
            right = [y[i] for i in range(n) if x[i][f] > thr]
            child = (len(left) * gini_counts(left) + len(right) * gini_counts(right)) / n
            gain = parent - child
            if best is None or gain > best[2] + 1e-12:
                best = (f, thr, gain)
    return best


def confusion_counts(y_true, y_pred, classes):
    out = [[0] * len(classes) for _ in classes]
    for i, a in enumerate(classes):
        for j, b in enumerate(classes):
            for t, p in zip(y_true, y_pred):
                if t == a and p == b:
                    out[i][j] += 1
    return out


def bernoulli_nb_predict(x_train, y_train, x_test, alpha=1.0, cut=0.0):
    """Posterior argmax evaluated by summing log-probabilities feature by feature."""
    classes = sorted(set(y_train))
    n = len(y_train)
    d = len(x_train[0])
    preds = []
    stats = {}
    for c in classes:
        rows = [x_train[i] for i in range(n) if y_train[i] == c]
        ones = [sum(1 for r in rows if r[j] > cut) for j in range(d)]
        stats[c] = (len(rows), ones)
    for row in x_test:
        best, best_score = None, -math.inf
        for c in classes:
            nc, ones = stats[c]
            score = math.log(nc / n)
            for j in range(d):
                p = (ones[j] + alpha) / (nc + 2 * alpha)
                score += math.log(p) if row[j] > cut else math.log(1 - p)
            if score > best_score:
                best, best_score = c, score
        preds.append(best)
    return preds


def majority_rate(y):
    return max(Counter(y).values()) / len(y)
