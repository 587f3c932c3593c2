"""Least-squares regression trees with exhaustive variance-reduction splits.

Split search is exhaustive over midpoints of consecutive distinct values per
feature. Ties are broken toward the smallest feature index, then the smallest
threshold, so fitting is deterministic and invariant to training-row order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Leaf:
    prediction: float
    sample_count: int


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class RegressionTree:
    root: Node
    n_features: int

    def predict_one(self, x: np.ndarray) -> float:
        node = self.root
        while isinstance(node, Split):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.prediction

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"feature dimension mismatch: tree expects {self.n_features}, got {X.shape[1]}"
            )
        out = np.empty(len(X), dtype=float)
        self._predict_into(self.root, X, np.arange(len(X)), out)
        return out

    def _predict_into(self, node: Node, X: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
        if isinstance(node, Leaf):
            out[idx] = node.prediction
            return
        go_left = X[idx, node.feature] <= node.threshold
        self._predict_into(node.left, X, idx[go_left], out)
        self._predict_into(node.right, X, idx[~go_left], out)

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        stack: list[Node] = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                out.append(node)
            else:
                stack.extend((node.left, node.right))
        return out

    def depth(self) -> int:
        def walk(node: Node) -> int:
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))

        return walk(self.root)


def _best_split_for_feature(
    x: np.ndarray, y: np.ndarray, min_leaf_size: int
) -> tuple[float, float] | None:
    """(gain, threshold) of the best admissible split on one feature, or None.

    Gain is the reduction in total squared error. Rows are ordered by (x, y)
    so prefix sums do not depend on the caller's row order.
    """
    n = len(y)
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]

    # Candidate boundaries: positions where the sorted feature value changes.
    change = np.nonzero(np.diff(xs))[0]            # split after index i -> left size i+1
    if change.size == 0:
        return None
    left_sizes = change + 1
    admissible = (left_sizes >= min_leaf_size) & (n - left_sizes >= min_leaf_size)
    if not np.any(admissible):
        return None
    left_sizes = left_sizes[admissible]
    boundaries = change[admissible]

    csum = np.cumsum(ys)
    csum2 = np.cumsum(ys * ys)
    total_sum = csum[-1]
    total_sq = csum2[-1]

    ls = csum[boundaries]
    ls2 = csum2[boundaries]
    nl = left_sizes.astype(float)
    nr = float(n) - nl
    sse_left = ls2 - ls * ls / nl
    sse_right = (total_sq - ls2) - (total_sum - ls) ** 2 / nr
    parent_sse = total_sq - total_sum * total_sum / n
    gains = parent_sse - (sse_left + sse_right)

    best = int(np.argmax(gains))                   # first occurrence wins -> smallest threshold
    if gains[best] <= 0.0:
        return None
    b = boundaries[best]
    threshold = float((xs[b] + xs[b + 1]) / 2.0)
    return float(gains[best]), threshold


def _mean_sorted(y: np.ndarray) -> float:
    # Summation over a sorted copy keeps leaf values bitwise identical under
    # training-row permutation.
    return float(np.mean(np.sort(y)))


def _build(
    X: np.ndarray,
    y: np.ndarray,
    min_leaf_size: int,
    max_depth: int | None,
    depth: int,
) -> Node:
    n = len(y)
    prediction = _mean_sorted(y)
    if (
        n < 2 * min_leaf_size
        or (max_depth is not None and depth >= max_depth)
        or np.all(y == y[0])
    ):
        return Leaf(prediction=prediction, sample_count=n)

    best: tuple[float, int, float] | None = None   # (gain, feature, threshold)
    for j in range(X.shape[1]):
        found = _best_split_for_feature(X[:, j], y, min_leaf_size)
        if found is None:
            continue
        gain, threshold = found
        if best is None or gain > best[0]:
            best = (gain, j, threshold)
    if best is None:
        return Leaf(prediction=prediction, sample_count=n)

    _, feature, threshold = best
    go_left = X[:, feature] <= threshold
    left = _build(X[go_left], y[go_left], min_leaf_size, max_depth, depth + 1)
    right = _build(X[~go_left], y[~go_left], min_leaf_size, max_depth, depth + 1)
    return Split(feature=feature, threshold=threshold, left=left, right=right)


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    min_leaf_size: int = 1,
    max_depth: int | None = None,
    seed: int = 0,
) -> RegressionTree:
    """Fit a regression tree by greedy variance reduction.

    A split is admissible only if both children hold >= min_leaf_size samples;
    leaves predict the mean of their targets. `seed` is accepted for interface
    parity with stochastic fitters; this fit is fully deterministic.
    """
    del seed
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if len(X) != len(y):
        raise ValueError("X and y length mismatch")
    if len(y) == 0:
        raise ValueError("empty training set")
    if min_leaf_size < 1:
        raise ValueError("min_leaf_size must be >= 1")
    root = _build(X, y, min_leaf_size, max_depth, depth=0)
    return RegressionTree(root=root, n_features=X.shape[1])
