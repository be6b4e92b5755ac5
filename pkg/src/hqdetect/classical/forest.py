"""Random forest of Gini CART trees grown on bootstrap samples."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch
from .mlp import _check_xy


@dataclass(frozen=True)
class RfConfig:
    tree_count: int = 100
    max_depth: int = 12
    seed: int = 0
    n_classes: int | None = None
    max_features: int | None = None  # default ceil(sqrt(d))
    min_samples_split: int = 2


@dataclass(eq=False)
class DecisionTree:
    """Flat array tree; ``feature[i] == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=int)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            inner = f >= 0
            if not inner.any():
                return node
            go_left = X[rows, np.where(inner, f, 0)] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)

    def leaf_labels(self, X: np.ndarray) -> np.ndarray:
        # argmax returns the lowest index on ties
        return np.argmax(self.counts[self.apply(X)], axis=1)


@dataclass(eq=False)
class RandomForestModel:
    trees: list
    n_classes: int
    n_features: int
    max_depth: int
    seed: int = 0

    @property
    def tree_count(self) -> int:
        return len(self.trees)

    def votes(self, X) -> np.ndarray:
        """Fraction of trees voting for each class, shape ``(n, n_classes)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ShapeMismatch(f"forest expects {self.n_features} features, got {X.shape[1]}")
        v = np.zeros((len(X), self.n_classes))
        rows = np.arange(len(X))
        for t in self.trees:
            v[rows, t.leaf_labels(X)] += 1.0
        return v / len(self.trees)

    predict_proba = votes

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.votes(X), axis=1)


def _best_split(Xn: np.ndarray, yn: np.ndarray, k: int, features, max_features: int):
    """Lowest weighted Gini over candidate features; returns (feature, threshold) or None."""
    n = len(yn)
    onehot = np.eye(k)[yn]
    best = (math.inf, None, None)
    evaluated = 0
    for f in features:
        if evaluated >= max_features:
            break
        v = Xn[:, f]
        order = np.argsort(v, kind="stable")
        vs = v[order]
        valid = np.nonzero(vs[:-1] < vs[1:])[0]
        if valid.size == 0:
            continue
        evaluated += 1
        cum = np.cumsum(onehot[order], axis=0)[valid]
        nl = (valid + 1).astype(float)
        nr = n - nl
        right = onehot.sum(axis=0) - cum
        gl = 1.0 - np.sum((cum / nl[:, None]) ** 2, axis=1)
        gr = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        score = (nl * gl + nr * gr) / n
        i = int(np.argmin(score))
        if score[i] < best[0]:
            lo, hi = vs[valid[i]], vs[valid[i] + 1]
            thr = lo + (hi - lo) / 2
            if not lo <= thr < hi:
                thr = lo
            best = (score[i], int(f), float(thr))
    return None if best[1] is None else best[1:]


def build_tree(X: np.ndarray, y: np.ndarray, k: int, max_depth: int, max_features: int,
               rng: np.random.Generator, min_samples_split: int = 2) -> DecisionTree:
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[idx], minlength=k).astype(float))
        return len(feature) - 1

    stack = [(new_node(np.arange(len(y))), np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        c = counts[node]
        if depth >= max_depth or len(idx) < min_samples_split or np.count_nonzero(c) <= 1:
            continue
        split = _best_split(X[idx], y[idx], k, rng.permutation(X.shape[1]), max_features)
        if split is None:
            continue
        f, thr = split
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node], right[node] = new_node(li), new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return DecisionTree(np.array(feature, dtype=int), np.array(threshold, dtype=float),
                        np.array(left, dtype=int), np.array(right, dtype=int),
                        np.array(counts, dtype=float).reshape(-1, k))


def train_rf(X, y, cfg: RfConfig = RfConfig()) -> RandomForestModel:
    X, y, k = _check_xy(X, y, cfg.n_classes)
    if cfg.tree_count < 1:
        raise ValueError("tree_count must be at least 1")
    n, d = X.shape
    m = cfg.max_features or math.ceil(math.sqrt(d))
    trees = []
    for t in range(cfg.tree_count):
        # per-tree stream so trees can be grown in any order
        rng = np.random.default_rng([cfg.seed, t])
        boot = rng.integers(0, n, n)
        trees.append(build_tree(X[boot], y[boot], k, cfg.max_depth, m, rng, cfg.min_samples_split))
    return RandomForestModel(trees, k, d, cfg.max_depth, cfg.seed)


def predict_rf(model: RandomForestModel, x):
    """Majority vote (ties go to the lowest class index) and the vote distribution."""
    dist = model.votes(np.asarray(x, dtype=float)[None, :])[0]
    return int(np.argmax(dist)), dist
