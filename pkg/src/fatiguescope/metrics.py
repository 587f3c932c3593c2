"""Regression error metrics and deterministic k-fold cross-validation."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

PredictFn = Callable[[np.ndarray], np.ndarray]
FitFn = Callable[[np.ndarray, np.ndarray], PredictFn]
MetricFn = Callable[[np.ndarray, np.ndarray], float]


def _as_pair(predicted: Sequence[float], actual: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted, dtype=float)
    a = np.asarray(actual, dtype=float)
    if p.shape != a.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {a.shape}")
    if p.size == 0:
        raise ValueError("empty input")
    return p, a


def rmse(predicted: Sequence[float], actual: Sequence[float]) -> float:
    """Root mean squared error."""
    p, a = _as_pair(predicted, actual)
    return float(np.sqrt(np.mean((p - a) ** 2)))


def smape(forecasts: Sequence[float], actuals: Sequence[float]) -> float:
    """Symmetric mean absolute percentage error, as a percentage in [0,100].

    smape = (100/n) * sum |F_t - A_t| / (|F_t| + |A_t|). A term where both
    F_t and A_t are zero is 0/0 in that formula and contributes 0 here.
    """
    f, a = _as_pair(forecasts, actuals)
    denom = np.abs(f) + np.abs(a)
    terms = np.zeros_like(denom)
    nonzero = denom > 0
    terms[nonzero] = np.abs(f - a)[nonzero] / denom[nonzero]
    return float(100.0 * np.mean(terms))


def kfold_split(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Shuffled fold assignment: k validation index arrays differing in size by <= 1."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"k={k} exceeds sample count {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    return [fold for fold in np.array_split(perm, k)]


def kfold_cv(
    X: np.ndarray,
    y: np.ndarray,
    k: int,
    fit: FitFn,
    metric: MetricFn,
    seed: int,
) -> tuple[float, list[float]]:
    """Mean validation metric over k deterministic shuffled folds.

    `fit(X_train, y_train)` must return a prediction callable. Every sample
    appears in exactly one validation fold.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if len(X) != len(y):
        raise ValueError("X and y length mismatch")
    folds = kfold_split(len(y), k, seed)
    scores: list[float] = []
    for val_idx in folds:
        mask = np.ones(len(y), dtype=bool)
        mask[val_idx] = False
        predict = fit(X[mask], y[mask])
        scores.append(float(metric(predict(X[val_idx]), y[val_idx])))
    return float(np.mean(scores)), scores
