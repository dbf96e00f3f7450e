import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyInput, LengthMismatch
from .stats_tests import percent_error_stats

PE_EPSILON = 1e-6


@dataclass(frozen=True)
class MetricSet:
    mse: float
    rmse: float
    mae: float
    # None when the truth has zero variance and the fit is not exact
    r2: float | None
    percent_errors: np.ndarray
    pe_mean: float
    pe_median: float
    pe_std: float

    @property
    def r2_score(self) -> float:
        return -math.inf if self.r2 is None else self.r2


def r2_score(y_true: np.ndarray, y_pred: np.ndarray) -> float | None:
    sse = float(np.sum((y_true - y_pred) ** 2))
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        return 1.0 if sse == 0.0 else None
    return 1.0 - sse / sst


def evaluate(
    y_true: np.ndarray, y_pred: np.ndarray, epsilon: float = PE_EPSILON
) -> MetricSet:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(y_true.size, y_pred.size)
    if y_true.size == 0:
        raise EmptyInput("evaluation targets")

    err = y_pred - y_true
    mse = float(np.mean(err**2))
    mae = float(np.mean(np.abs(err)))
    pe = 100.0 * np.abs(err) / np.maximum(np.abs(y_true), epsilon)
    stats = percent_error_stats(pe)
    return MetricSet(
        mse=mse,
        rmse=math.sqrt(mse),
        mae=mae,
        r2=r2_score(y_true, y_pred),
        percent_errors=pe,
        pe_mean=stats.mean,
        pe_median=stats.median,
        pe_std=stats.std,
    )
