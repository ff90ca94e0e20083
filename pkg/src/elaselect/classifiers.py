"""Majority Judgment, CART and KNN classifiers over normalized feature vectors.

Every tie (argmin, vote, split, distance) resolves toward the smaller
index or label so that predictions are fully deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

CLASSIFIERS = ("mj", "dt", "knn")


def _check_xy(X, y):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] != y.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} labels")
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if not np.all(np.isfinite(X)):
        raise ValueError("training features must be finite")
    return X, y


def _as_queries(Z, k: int) -> tuple[np.ndarray, bool]:
    Z = np.asarray(Z, dtype=float)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[1] != k:
        raise ValueError(f"expected {k} features per query, got {Z.shape[1]}")
    return Z, single


# ---------------------------------------------------------------------------
# Majority Judgment


@dataclass(frozen=True, eq=False)
class MJModel:
    """Per-class feature medians ``medians[i, j]`` for feature i and class j."""

    feature_names: tuple
    classes: np.ndarray
    medians: np.ndarray

    def distances(self, zeta) -> np.ndarray:
        """``d[i, j] = |zeta_i - M(i, j)|`` for one query."""
        z = np.asarray(zeta, dtype=float).reshape(-1)
        if z.size != self.medians.shape[0]:
            raise ValueError(f"expected {self.medians.shape[0]} features, got {z.size}")
        return np.abs(z[:, None] - self.medians)

    def median_distances(self, Z) -> np.ndarray:
        Z, _ = _as_queries(Z, self.medians.shape[0])
        return np.median(np.abs(Z[:, :, None] - self.medians[None]), axis=1)

    def predict(self, Z):
        Z, single = _as_queries(Z, self.medians.shape[0])
        D = self.median_distances(Z)
        out = self.classes[np.argmin(D, axis=1)]
        return int(out[0]) if single else out

    def dump(self) -> str:
        lines = ["feature " + " ".join(f"{int(c):>6d}" for c in self.classes)]
        for name, row in zip(self.feature_names, self.medians):
            lines.append(f"{name:<9s}" + " ".join(f"{v:6.3f}" for v in row))
        return "\n".join(lines) + "\n"


def mj_train(X, y, feature_names: Sequence[str] | None = None) -> MJModel:
    X, y = _check_xy(X, y)
    classes = np.unique(y)
    M = np.empty((X.shape[1], classes.size))
    for j, c in enumerate(classes):
        M[:, j] = np.median(X[y == c], axis=0)
    names = tuple(feature_names) if feature_names is not None else tuple(
        f"f{i}" for i in range(X.shape[1]))
    if len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match X")
    M.setflags(write=False)
    return MJModel(names, classes, M)


# ---------------------------------------------------------------------------
# CART


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Array-encoded binary tree. ``feature[k] < 0`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    label: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for k in range(self.n_nodes):
            if self.feature[k] >= 0:
                depth[self.left[k]] = depth[self.right[k]] = depth[k] + 1
        return int(depth.max())

    def predict(self, Z):
        Z, single = _as_queries(Z, self.n_features)
        node = np.zeros(Z.shape[0], dtype=np.int64)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            k = node[idx]
            go_left = Z[idx, self.feature[k]] <= self.threshold[k]
            node[idx] = np.where(go_left, self.left[k], self.right[k])
            active = self.feature[node] >= 0
        out = self.label[node]
        return int(out[0]) if single else out

    def dump(self, feature_names: Sequence[str] | None = None) -> str:
        names = feature_names or [f"f{i}" for i in range(self.n_features)]
        lines = []

        def walk(k, indent):
            pad = "  " * indent
            if self.feature[k] < 0:
                lines.append(f"{pad}-> {int(self.label[k])}")
                return
            lines.append(f"{pad}{names[self.feature[k]]} <= {float(self.threshold[k])!r}")
            walk(self.left[k], indent + 1)
            lines.append(f"{pad}{names[self.feature[k]]} > {float(self.threshold[k])!r}")
            walk(self.right[k], indent + 1)

        walk(0, 0)
        return "\n".join(lines) + "\n"


def _majority(codes: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(codes, minlength=n_classes)))


def _best_split(X: np.ndarray, codes: np.ndarray, n_classes: int):
    """Best (feature, threshold) by weighted Gini; None if no threshold exists.

    Scores are built from integer class counts only, so any strictly
    monotone transform of a column leaves the choice of split unchanged.
    """
    n = X.shape[0]
    best = None
    best_score = -np.inf
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), codes] = 1
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cuts = np.flatnonzero(xs[1:] > xs[:-1])
        if cuts.size == 0:
            continue
        cum = np.cumsum(onehot[order], axis=0)
        left = cum[cuts]
        right = cum[-1] - left
        nl = (cuts + 1).astype(float)
        nr = n - nl
        # minimizing weighted Gini == maximizing sum(c_L^2)/n_L + sum(c_R^2)/n_R
        score = (left * left).sum(axis=1) / nl + (right * right).sum(axis=1) / nr
        i = int(np.argmax(score))
        if score[i] > best_score:
            best_score = score[i]
            a, b = xs[cuts[i]], xs[cuts[i] + 1]
            t = a + (b - a) / 2.0
            if not a <= t < b:
                t = a
            best = (f, float(t))
    return best


def dt_train(X, y) -> TreeModel:
    """Unpruned CART grown until every leaf is pure or unsplittable."""
    X, y = _check_xy(X, y)
    classes, codes = np.unique(y, return_inverse=True)
    C = classes.size
    feature, threshold, left, right, label = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        label.append(-1)
        return len(feature) - 1

    stack = [(new_node(), np.arange(X.shape[0]))]
    while stack:
        k, rows = stack.pop()
        c = codes[rows]
        label[k] = int(classes[_majority(c, C)])
        if np.all(c == c[0]):
            continue
        split = _best_split(X[rows], c, C)
        if split is None:
            continue
        f, t = split
        mask = X[rows, f] <= t
        feature[k], threshold[k] = f, t
        left[k], right[k] = new_node(), new_node()
        stack.append((right[k], rows[~mask]))
        stack.append((left[k], rows[mask]))

    arr = lambda v, dt: np.array(v, dtype=dt)
    return TreeModel(arr(feature, np.int64), arr(threshold, float), arr(left, np.int64),
                     arr(right, np.int64), arr(label, np.int64), X.shape[1])


# ---------------------------------------------------------------------------
# KNN


@dataclass(frozen=True, eq=False)
class KnnModel:
    X: np.ndarray
    y: np.ndarray
    K: int = 5

    def neighbours(self, z) -> np.ndarray:
        """Row indices of the K nearest training rows, ties to lower index."""
        z = np.asarray(z, dtype=float).reshape(-1)
        d2 = ((self.X - z) ** 2).sum(axis=1)
        return np.argsort(d2, kind="stable")[: self.K]

    def predict(self, Z, chunk: int = 256):
        Z, single = _as_queries(Z, self.X.shape[1])
        classes, codes = np.unique(self.y, return_inverse=True)
        out = np.empty(Z.shape[0], dtype=np.int64)
        for s in range(0, Z.shape[0], chunk):
            B = Z[s:s + chunk]
            d2 = ((B[:, None, :] - self.X[None]) ** 2).sum(axis=2)
            nn = np.argsort(d2, axis=1, kind="stable")[:, : self.K]
            votes = np.zeros((B.shape[0], classes.size), dtype=np.int64)
            np.add.at(votes, (np.repeat(np.arange(B.shape[0]), self.K), codes[nn].ravel()), 1)
            out[s:s + chunk] = classes[np.argmax(votes, axis=1)]
        return int(out[0]) if single else out


def knn_train(X, y, K: int = 5) -> KnnModel:
    X, y = _check_xy(X, y)
    if not 1 <= K <= X.shape[0]:
        raise ValueError(f"K must be in [1, {X.shape[0]}], got {K}")
    X = X.copy()
    X.setflags(write=False)
    y = y.copy()
    y.setflags(write=False)
    return KnnModel(X, y, K)


# ---------------------------------------------------------------------------


def train(name: str, X, y, feature_names: Sequence[str] | None = None, K: int = 5):
    """Train the classifier called ``name`` (one of :data:`CLASSIFIERS`)."""
    if name == "mj":
        return mj_train(X, y, feature_names)
    if name == "dt":
        return dt_train(X, y)
    if name == "knn":
        return knn_train(X, y, K)
    raise ValueError(f"unknown classifier {name!r}; choose from {', '.join(CLASSIFIERS)}")
