"""Boosted regression-tree ensembles for fatigue-rate prediction.

Two aggregation methods are supported: least-squares gradient boosting
(sequential trees fit to residuals, scaled by a shrinkage rate) and bootstrap
aggregation of independently fitted trees. Both produce the same model shape:
prediction = baseline + learn_rate * sum of tree outputs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .trees import Leaf, Node, RegressionTree, Split, fit_tree

MODEL_SCHEMA = "fatiguescope-model/1"


class BoostMethod(Enum):
    LSBOOST = "lsboost"
    BAG = "bag"


@dataclass(frozen=True)
class BoostConfig:
    """Ensemble hyper-parameters. Defaults are the tuned operating point."""

    method: BoostMethod = BoostMethod.LSBOOST
    cycles: int = 496
    learn_rate: float = 0.03
    min_leaf_size: int = 7
    max_depth: int | None = 5
    seed: int = 0

    def validate(self) -> None:
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if not (0.0 < self.learn_rate <= 1.0):
            raise ValueError("learn_rate must be in (0,1]")
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")


@dataclass(frozen=True)
class EnsembleModel:
    baseline: float
    trees: tuple[RegressionTree, ...]
    learn_rate: float
    config: BoostConfig
    feature_dimension: int

    def predict_raw(self, X: np.ndarray) -> np.ndarray:
        """Unclamped ensemble output: baseline + learn_rate * sum of trees."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.feature_dimension:
            raise ValueError(
                f"feature dimension mismatch: model expects {self.feature_dimension}, "
                f"got {X.shape[1]}"
            )
        out = np.full(len(X), self.baseline, dtype=float)
        for tree in self.trees:
            out += self.learn_rate * tree.predict(X)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Fatigue rates: raw output clamped to [0,100]."""
        return np.clip(self.predict_raw(X), 0.0, 100.0)

    def staged_training_rmse(self, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Training RMSE after the baseline and after each successive tree."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(y, dtype=float)
        pred = np.full(len(y), self.baseline, dtype=float)
        curve = [float(np.sqrt(np.mean((y - pred) ** 2)))]
        for tree in self.trees:
            pred += self.learn_rate * tree.predict(X)
            curve.append(float(np.sqrt(np.mean((y - pred) ** 2))))
        return np.asarray(curve)


def _check_training_input(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if len(X) != len(y):
        raise ValueError("X and y length mismatch")
    if len(y) == 0:
        raise ValueError("empty training set")
    return X, y


def fit_lsboost(X: np.ndarray, y: np.ndarray, config: BoostConfig) -> EnsembleModel:
    """Least-squares boosting: trees fit to residuals, shrunk by learn_rate.

    Stops early only when residuals are exactly zero; training RMSE is
    non-increasing in the number of trees.
    """
    config.validate()
    X, y = _check_training_input(X, y)
    # Sorted summation: the baseline (and hence the whole fit) is invariant
    # to training-row permutation.
    baseline = float(np.mean(np.sort(y)))
    residuals = y - baseline
    trees: list[RegressionTree] = []
    for _ in range(config.cycles):
        if np.all(residuals == 0.0):
            break
        tree = fit_tree(
            X,
            residuals,
            min_leaf_size=config.min_leaf_size,
            max_depth=config.max_depth,
            seed=config.seed,
        )
        residuals = residuals - config.learn_rate * tree.predict(X)
        trees.append(tree)
    return EnsembleModel(
        baseline=baseline,
        trees=tuple(trees),
        learn_rate=config.learn_rate,
        config=config,
        feature_dimension=X.shape[1],
    )


def fit_bag(X: np.ndarray, y: np.ndarray, config: BoostConfig) -> EnsembleModel:
    """Bootstrap aggregation: cycles independent trees on seeded resamples.

    Stored with baseline 0 and learn_rate 1/cycles so the shared model shape
    yields the mean of the tree outputs.
    """
    config.validate()
    X, y = _check_training_input(X, y)
    rng = np.random.default_rng(config.seed)
    trees: list[RegressionTree] = []
    for _ in range(config.cycles):
        idx = rng.integers(0, len(y), size=len(y))
        trees.append(
            fit_tree(
                X[idx],
                y[idx],
                min_leaf_size=config.min_leaf_size,
                max_depth=config.max_depth,
                seed=config.seed,
            )
        )
    return EnsembleModel(
        baseline=0.0,
        trees=tuple(trees),
        learn_rate=1.0 / len(trees),
        config=config,
        feature_dimension=X.shape[1],
    )


def fit_ensemble(X: np.ndarray, y: np.ndarray, config: BoostConfig) -> EnsembleModel:
    if config.method is BoostMethod.LSBOOST:
        return fit_lsboost(X, y, config)
    return fit_bag(X, y, config)


# ---------------------------------------------------------------------------
# Model file format (versioned JSON)
# ---------------------------------------------------------------------------


def _node_to_obj(node: Node) -> dict[str, Any]:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "prediction": node.prediction, "count": node.sample_count}
    return {
        "kind": "split",
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def _node_from_obj(obj: dict[str, Any]) -> Node:
    if obj["kind"] == "leaf":
        return Leaf(prediction=float(obj["prediction"]), sample_count=int(obj["count"]))
    return Split(
        feature=int(obj["feature"]),
        threshold=float(obj["threshold"]),
        left=_node_from_obj(obj["left"]),
        right=_node_from_obj(obj["right"]),
    )


def model_to_obj(model: EnsembleModel) -> dict[str, Any]:
    return {
        "schema": MODEL_SCHEMA,
        "config": config_to_obj(model.config),
        "baseline": model.baseline,
        "learn_rate": model.learn_rate,
        "feature_dimension": model.feature_dimension,
        "trees": [_node_to_obj(t.root) for t in model.trees],
    }


def model_from_obj(obj: dict[str, Any]) -> EnsembleModel:
    if obj.get("schema") != MODEL_SCHEMA:
        raise ValueError(f"unsupported model schema: {obj.get('schema')!r}")
    cfg = dict(obj["config"])
    cfg["method"] = BoostMethod(cfg["method"])
    config = BoostConfig(**cfg)
    dim = int(obj["feature_dimension"])
    trees = tuple(
        RegressionTree(root=_node_from_obj(t), n_features=dim) for t in obj["trees"]
    )
    return EnsembleModel(
        baseline=float(obj["baseline"]),
        trees=trees,
        learn_rate=float(obj["learn_rate"]),
        config=config,
        feature_dimension=dim,
    )


def save_model(model: EnsembleModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_obj(model), indent=1) + "\n")


def load_model(path: str | Path) -> EnsembleModel:
    return model_from_obj(json.loads(Path(path).read_text()))


def config_to_obj(config: BoostConfig) -> dict[str, Any]:
    obj = asdict(config)
    obj["method"] = config.method.value
    return obj


def config_from_obj(obj: dict[str, Any]) -> BoostConfig:
    cfg = dict(obj)
    if "method" in cfg:
        cfg["method"] = BoostMethod(cfg["method"])
    config = BoostConfig(**cfg)
    config.validate()
    return config
