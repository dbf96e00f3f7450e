"""Least-squares gradient boosting over CART trees."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import (
    EmptyInput,
    InvalidParameter,
    LengthMismatch,
    ModelFormatError,
    NonFiniteInput,
)
from .tree import (
    TreeLimits,
    TreeNode,
    grow_presorted,
    predict_tree,
    presort,
    tree_from_list,
    tree_to_list,
)

logger = logging.getLogger(__name__)

FORMAT_TAG = "gbm-v1"


@dataclass(frozen=True)
class GbmModel:
    init_value: float
    trees: tuple[TreeNode, ...]
    learning_rate: float
    n_estimators: int
    max_depth: int
    n_features: int
    seed: int = 0
    train_mse: tuple[float, ...] = ()

    def raw_predict(self, X: np.ndarray) -> np.ndarray:
        pred = np.full(X.shape[0], self.init_value)
        for tree in self.trees:
            pred += self.learning_rate * predict_tree(tree, X)
        return pred


def fit_gbm(
    X: np.ndarray,
    y: np.ndarray,
    n_estimators: int = 100,
    learning_rate: float = 0.1,
    max_depth: int = 3,
    seed: int = 0,
    min_samples_split: int = 2,
    min_samples_leaf: int = 1,
) -> GbmModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise EmptyInput("boosting training matrix")
    if X.shape[0] != y.size:
        raise LengthMismatch(X.shape[0], y.size)
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteInput("boosting inputs")
    if n_estimators < 0:
        raise InvalidParameter("n_estimators", n_estimators, "must be >= 0")
    if not learning_rate > 0:
        raise InvalidParameter("learning_rate", learning_rate, "must be > 0")
    if max_depth < 1:
        raise InvalidParameter("max_depth", max_depth, "must be >= 1")

    limits = TreeLimits(max_depth, min_samples_split, min_samples_leaf)

    init_value = float(y.mean())
    pred = np.full(y.size, init_value)
    order = presort(X)
    trees = []
    staged = []
    for k in range(n_estimators):
        # negative gradient of squared loss
        residuals = y - pred
        tree, fitted = grow_presorted(X, residuals, order, limits)
        pred += learning_rate * fitted
        trees.append(tree)
        staged.append(float(np.mean((y - pred) ** 2)))
        logger.debug("stage %d: train mse %.6g", k + 1, staged[-1])

    return GbmModel(
        init_value=init_value,
        trees=tuple(trees),
        learning_rate=learning_rate,
        n_estimators=n_estimators,
        max_depth=max_depth,
        n_features=X.shape[1],
        seed=seed,
        train_mse=tuple(staged),
    )


def save_gbm(model: GbmModel, path: str | Path) -> Path:
    payload = {
        "format": FORMAT_TAG,
        "init_value": model.init_value,
        "learning_rate": model.learning_rate,
        "n_estimators": model.n_estimators,
        "max_depth": model.max_depth,
        "n_features": model.n_features,
        "seed": model.seed,
        "trees": [tree_to_list(t) for t in model.trees],
    }
    path = Path(path)
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return path


def load_gbm(path: str | Path) -> GbmModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(path, FORMAT_TAG) from exc
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_TAG:
        raise ModelFormatError(path, FORMAT_TAG)
    try:
        return _gbm_from_payload(payload)
    except (KeyError, TypeError, ValueError, StopIteration) as exc:
        raise ModelFormatError(path, FORMAT_TAG) from exc


def _gbm_from_payload(payload: dict) -> GbmModel:
    return GbmModel(
        init_value=float(payload["init_value"]),
        trees=tuple(tree_from_list(t) for t in payload["trees"]),
        learning_rate=float(payload["learning_rate"]),
        n_estimators=int(payload["n_estimators"]),
        max_depth=int(payload["max_depth"]),
        n_features=int(payload["n_features"]),
        seed=int(payload["seed"]),
    )
