from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter, LengthMismatch, NonFiniteInput, SingularSystem


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    alpha: float

    @property
    def n_features(self) -> int:
        return self.weights.size


def fit_ridge(X: np.ndarray, y: np.ndarray, alpha: float = 1.0) -> RidgeModel:
    """Closed-form ridge on centred data; the intercept is not penalised."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.size:
        raise LengthMismatch(X.shape[0], y.size)
    if alpha < 0:
        raise InvalidParameter("alpha", alpha, "must be >= 0")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise NonFiniteInput("ridge inputs")

    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    xc = X - x_mean
    yc = y - y_mean
    gram = xc.T @ xc + alpha * np.eye(X.shape[1])

    if alpha == 0 and np.linalg.matrix_rank(xc) < X.shape[1]:
        raise SingularSystem()
    try:
        weights = np.linalg.solve(gram, xc.T @ yc)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem() from exc

    return RidgeModel(weights, y_mean - float(weights @ x_mean), alpha)
