from functools import singledispatch

import numpy as np

from ..errors import DimensionMismatch
from .gbm import GbmModel
from .ridge import RidgeModel
from .tree import Leaf, Split, max_feature_index, predict_tree


def _as_matrix(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return X[:, None] if X.ndim == 1 else X


@singledispatch
def predict(model, X: np.ndarray) -> np.ndarray:
    raise TypeError(f"cannot predict with {type(model).__name__}")


@predict.register
def _(model: GbmModel, X: np.ndarray) -> np.ndarray:
    X = _as_matrix(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(model.n_features, X.shape[1])
    return model.raw_predict(X)


@predict.register
def _(model: RidgeModel, X: np.ndarray) -> np.ndarray:
    X = _as_matrix(X)
    if X.shape[1] != model.n_features:
        raise DimensionMismatch(model.n_features, X.shape[1])
    return X @ model.weights + model.intercept


@predict.register(Leaf)
@predict.register(Split)
def _(model, X: np.ndarray) -> np.ndarray:
    X = _as_matrix(X)
    needed = max_feature_index(model) + 1
    if X.shape[1] < needed:
        raise DimensionMismatch(needed, X.shape[1])
    return predict_tree(model, X)
