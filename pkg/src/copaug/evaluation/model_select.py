import logging
import math
from dataclasses import dataclass
from itertools import product
from numbers import Integral, Real
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from ..errors import BadK, InvalidParameter, LengthMismatch
from ..learners.gbm import fit_gbm
from ..learners.predict import predict
from .metrics import evaluate

logger = logging.getLogger(__name__)


class GbmConfig(NamedTuple):
    n_estimators: int
    learning_rate: float
    max_depth: int


@dataclass(frozen=True)
class HyperGrid:
    n_estimators: tuple[int, ...]
    learning_rate: tuple[float, ...]
    max_depth: tuple[int, ...]

    def __post_init__(self):
        for name in ("n_estimators", "learning_rate", "max_depth"):
            values = tuple(getattr(self, name))
            if not values:
                raise InvalidParameter(name, values, "grid axis must not be empty")
            kind = Real if name == "learning_rate" else Integral
            if any(isinstance(v, bool) or not isinstance(v, kind) for v in values):
                raise InvalidParameter(name, values, f"values must be {kind.__name__.lower()}s")
            object.__setattr__(self, name, values)

    def configs(self) -> list[GbmConfig]:
        return [
            GbmConfig(int(n), float(lr), int(d))
            for n, lr, d in product(self.n_estimators, self.learning_rate, self.max_depth)
        ]

    def __len__(self) -> int:
        return len(self.n_estimators) * len(self.learning_rate) * len(self.max_depth)


@dataclass(frozen=True)
class CvResult:
    config: GbmConfig
    fold_losses: tuple[float, ...]
    fold_r2: tuple[float | None, ...]

    @property
    def mean_loss(self) -> float:
        return float(np.mean(self.fold_losses))

    @property
    def mean_r2(self) -> float:
        """Mean fold R^2; any undefined fold makes the whole mean -inf."""
        if any(r is None for r in self.fold_r2):
            return -math.inf
        return float(np.mean(self.fold_r2))


@dataclass(frozen=True)
class GridSearchResult:
    best: GbmConfig
    results: tuple[CvResult, ...]


Folds = list[tuple[np.ndarray, np.ndarray]]


def kfold_indices(
    n: int, k: int, seed: int = 0, synthetic: np.ndarray | None = None
) -> Folds:
    """Shuffled k-fold partition; earlier folds take the remainder rows.

    With a ``synthetic`` mask, real rows land exactly where
    ``kfold_indices(n_real, k, seed)`` puts them and synthetic rows are dealt
    over the folds from their own stream. Fold i of an augmented table then
    validates on the same real rows as fold i of the unaugmented one.
    """
    if synthetic is None:
        synthetic = np.zeros(n, dtype=bool)
    synthetic = np.asarray(synthetic, dtype=bool)
    if synthetic.size != n:
        raise LengthMismatch(n, synthetic.size)
    real = np.flatnonzero(~synthetic)
    synth = np.flatnonzero(synthetic)
    if not 2 <= k <= real.size:
        raise BadK(k, real.size)

    real_parts = np.array_split(real[np.random.default_rng(seed).permutation(real.size)], k)
    synth_parts = np.array_split(
        synth[np.random.default_rng([seed, 1]).permutation(synth.size)], k
    )
    folds = []
    for real_valid, synth_valid in zip(real_parts, synth_parts):
        in_valid = np.zeros(n, dtype=bool)
        in_valid[real_valid] = True
        in_valid[synth_valid] = True
        folds.append((np.flatnonzero(~in_valid), np.flatnonzero(in_valid)))
    return folds


def _fit_fold(
    X: np.ndarray,
    y: np.ndarray,
    config: GbmConfig,
    train_idx: np.ndarray,
    valid_idx: np.ndarray,
    seed: int,
) -> tuple[float, float | None]:
    model = fit_gbm(X[train_idx], y[train_idx], *config, seed=seed)
    metrics = evaluate(y[valid_idx], predict(model, X[valid_idx]))
    return metrics.mse, metrics.r2


def _score_configs(
    X: np.ndarray,
    y: np.ndarray,
    configs: list[GbmConfig],
    folds: Folds,
    seed: int,
    workers: int,
) -> list[CvResult]:
    # one task per (config, fold); results come back in submission order
    scores = Parallel(n_jobs=workers)(
        delayed(_fit_fold)(X, y, config, train_idx, valid_idx, seed)
        for config in configs
        for train_idx, valid_idx in folds
    )
    k = len(folds)
    results = []
    for i, config in enumerate(configs):
        chunk = scores[i * k : (i + 1) * k]
        result = CvResult(config, tuple(s[0] for s in chunk), tuple(s[1] for s in chunk))
        logger.debug("%s: mean R2 %.4f, mean MSE %.4g", config, result.mean_r2, result.mean_loss)
        results.append(result)
    return results


def _check_xy(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != y.size:
        raise LengthMismatch(X.shape[0], y.size)
    return X, y


def _selection_key(result: CvResult) -> tuple:
    c = result.config
    return (-result.mean_r2, c.n_estimators, c.max_depth, c.learning_rate)


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    grid: HyperGrid,
    k: int = 5,
    seed: int = 0,
    workers: int = 1,
    synthetic: np.ndarray | None = None,
) -> GridSearchResult:
    """Exhaustive k-fold search; the best config has the highest mean R^2.

    Ties prefer fewer estimators, then shallower trees, then smaller rates.
    Every config is scored on the same folds.
    """
    X, y = _check_xy(X, y)
    folds = kfold_indices(y.size, k, seed, synthetic)
    configs = grid.configs()
    logger.info("grid search: %d configs x %d folds on %d rows", len(configs), k, y.size)
    results = _score_configs(X, y, configs, folds, seed, workers)
    best = min(results, key=_selection_key)
    return GridSearchResult(best.config, tuple(results))


def cross_validate_model(
    X: np.ndarray,
    y: np.ndarray,
    config: GbmConfig,
    k: int = 10,
    seed: int = 0,
    synthetic: np.ndarray | None = None,
    workers: int = 1,
) -> CvResult:
    X, y = _check_xy(X, y)
    folds = kfold_indices(y.size, k, seed, synthetic)
    (result,) = _score_configs(X, y, [GbmConfig(*config)], folds, seed, workers)
    return result
