"""Fully connected ReLU network with a softmax output, trained by mini-batch SGD."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset, LabelOutOfRange, ShapeMismatch


@dataclass(frozen=True)
class MlpConfig:
    hidden: tuple = (32, 16)
    learning_rate: float = 0.1
    epochs: int = 200
    batch_size: int = 32
    seed: int = 0
    n_classes: int | None = None


@dataclass(eq=False)
class MlpModel:
    weights: list
    biases: list
    n_classes: int
    seed: int = 0
    loss_history: list = field(default_factory=list)

    @property
    def layer_sizes(self) -> tuple:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def n_features(self) -> int:
        return self.weights[0].shape[0]

    @property
    def depth(self) -> int:
        """Number of hidden layers."""
        return len(self.weights) - 1

    @classmethod
    def zeros(cls, sizes) -> "MlpModel":
        ws = [np.zeros((a, b)) for a, b in zip(sizes[:-1], sizes[1:])]
        bs = [np.zeros(b) for b in sizes[1:]]
        return cls(ws, bs, sizes[-1])

    def predict_proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ShapeMismatch(f"model expects {self.n_features} features, got {X.shape[1]}")
        return _forward(self.weights, self.biases, X)[-1]

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _forward(weights, biases, X):
    acts = [X]
    h = X
    for i, (w, b) in enumerate(zip(weights, biases)):
        z = h @ w + b
        h = softmax(z) if i == len(weights) - 1 else np.maximum(z, 0.0)
        acts.append(h)
    return acts


def cross_entropy(p: np.ndarray, y: np.ndarray) -> float:
    return float(-np.mean(np.log(np.clip(p[np.arange(len(y)), y], 1e-300, None))))


def loss_and_gradients(model: MlpModel, X, y):
    """Mean cross-entropy and its gradients w.r.t. weights, biases and inputs."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int)
    acts = _forward(model.weights, model.biases, X)
    n = len(y)
    loss = cross_entropy(acts[-1], y)
    delta = acts[-1].copy()
    delta[np.arange(n), y] -= 1.0
    delta /= n
    gw, gb = [None] * len(model.weights), [None] * len(model.weights)
    for i in range(len(model.weights) - 1, -1, -1):
        gw[i] = acts[i].T @ delta
        gb[i] = delta.sum(axis=0)
        delta = delta @ model.weights[i].T
        if i > 0:
            delta = delta * (acts[i] > 0)
    return loss, gw, gb, delta


def _check_xy(X, y, n_classes=None):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).ravel()
    if len(y) == 0 or X.size == 0:
        raise EmptyDataset("training set is empty")
    if X.shape[0] != len(y):
        raise ShapeMismatch(f"{X.shape[0]} rows but {len(y)} labels")
    if np.any(y != np.round(y)) or y.min() < 0:
        raise LabelOutOfRange("labels must be nonnegative integers")
    y = y.astype(int)
    k = n_classes if n_classes is not None else int(y.max()) + 1
    if y.max() >= k:
        raise LabelOutOfRange(f"label {y.max()} outside [0, {k})")
    return X, y, k


def train_mlp(X, y, cfg: MlpConfig = MlpConfig()) -> MlpModel:
    X, y, k = _check_xy(X, y, cfg.n_classes)
    rng = np.random.default_rng(cfg.seed)
    sizes = (X.shape[1],) + tuple(cfg.hidden) + (k,)
    weights = [rng.standard_normal((a, b)) * np.sqrt(2.0 / a) for a, b in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(b) for b in sizes[1:]]
    model = MlpModel(weights, biases, k, cfg.seed)
    model.loss_history.append(cross_entropy(model.predict_proba(X), y))
    n = len(y)
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, gw, gb, _ = loss_and_gradients(model, X[idx], y[idx])
            for w, g in zip(model.weights, gw):
                w -= cfg.learning_rate * g
            for b, g in zip(model.biases, gb):
                b -= cfg.learning_rate * g
        model.loss_history.append(cross_entropy(model.predict_proba(X), y))
    return model


def predict_mlp(model: MlpModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeMismatch("predict_mlp takes a single feature vector")
    return model.predict_proba(x[None, :])[0]
