"""One-hidden-layer ReLU network with a softmax output, trained with Adam."""

import numpy as np


def init_params(n_in, n_hidden, n_out, rng):
    """Uniform init with bound sqrt(6 / (fan_in + fan_out)) for weights and biases."""
    params = []
    for fan_in, fan_out in ((n_in, n_hidden), (n_hidden, n_out)):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        params.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        params.append(rng.uniform(-bound, bound, size=fan_out))
    return params


def forward(params, x):
    w1, b1, w2, b2 = params
    hidden = np.maximum(x @ w1 + b1, 0.0)
    logits = hidden @ w2 + b2
    logits -= logits.max(axis=1, keepdims=True)
    prob = np.exp(logits)
    prob /= prob.sum(axis=1, keepdims=True)
    return hidden, prob


def loss_and_grads(params, x, targets):
    """Mean cross-entropy and its gradients; ``targets`` is one-hot."""
    w1, b1, w2, b2 = params
    hidden, prob = forward(params, x)
    n = len(x)
    loss = -np.sum(targets * np.log(np.clip(prob, 1e-300, None))) / n
    d_logits = (prob - targets) / n
    d_hidden = (d_logits @ w2.T) * (hidden > 0)
    grads = [x.T @ d_hidden, d_hidden.sum(axis=0), hidden.T @ d_logits, d_logits.sum(axis=0)]
    return loss, grads


class MLP:
    def __init__(
        self,
        hidden_units=200,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        epsilon=1e-8,
        batch_size=200,
        max_epochs=100,
        seed=0,
    ):
        self.hidden_units = hidden_units
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.seed = seed

    def fit(self, x, y, n_classes):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        n = len(x)
        rng = np.random.default_rng(self.seed)
        params = init_params(x.shape[1], self.hidden_units, n_classes, rng)
        m = [np.zeros_like(p) for p in params]
        v = [np.zeros_like(p) for p in params]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y] = 1.0
        batch = min(self.batch_size, n)
        step = 0
        self.loss_curve_ = []
        for _ in range(self.max_epochs):
            order = rng.permutation(n)
            total = 0.0
            for start in range(0, n, batch):
                rows = order[start:start + batch]
                loss, grads = loss_and_grads(params, x[rows], onehot[rows])
                total += loss * len(rows)
                step += 1
                lr = self.learning_rate * np.sqrt(1.0 - self.beta2**step) / (1.0 - self.beta1**step)
                for p, g, mi, vi in zip(params, grads, m, v):
                    mi *= self.beta1
                    mi += (1.0 - self.beta1) * g
                    vi *= self.beta2
                    vi += (1.0 - self.beta2) * g * g
                    p -= lr * mi / (np.sqrt(vi) + self.epsilon)
            self.loss_curve_.append(total / n)
        self.params_ = params
        return self

    def predict_proba(self, x):
        return forward(self.params_, np.asarray(x, dtype=np.float64))[1]

    def predict(self, x):
        return np.argmax(self.predict_proba(x), axis=1)

    def get_state(self):
        w1, b1, w2, b2 = self.params_
        return {"w1": w1, "b1": b1, "w2": w2, "b2": b2}

    @classmethod
    def from_state(cls, state, n_classes=None, **params):
        model = cls(**params)
        model.params_ = [state["w1"], state["b1"], state["w2"], state["b2"]]
        return model
