"""Gaussian copula over empirical marginals, with range clipping."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtr, ndtri

from ..core.models import CONSTANT_STD, Table
from ..errors import (
    InvalidParameter,
    ModelFormatError,
    NonFiniteInput,
    NotFitted,
    SchemaMismatch,
    TooFewRows,
)
from ..evaluation.stats_tests import KsOutcome, ks_two_sample

logger = logging.getLogger(__name__)

FORMAT_TAG = "copula-v1"
MIN_FIT_ROWS = 10
EIGEN_FLOOR = 1e-10


@dataclass(frozen=True)
class Marginal:
    """Empirical CDF with plotting positions rank/(n+1).

    Tied values share the mean of their plotting positions, so ``cdf`` is a
    strictly increasing piecewise-linear map between the distinct values.
    """

    sorted_values: np.ndarray
    kind: str = "empirical"
    knots: np.ndarray = field(init=False, repr=False)
    positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.sort(np.asarray(self.sorted_values, dtype=np.float64))
        n = values.size
        knots, first, counts = np.unique(values, return_index=True, return_counts=True)
        # mean rank of each tie group: first + (count + 1) / 2, 1-based
        positions = (first + (counts + 1) / 2.0) / (n + 1)
        object.__setattr__(self, "sorted_values", values)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "positions", positions)

    @property
    def n(self) -> int:
        return self.sorted_values.size

    @property
    def constant(self) -> bool:
        return self.knots.size == 1 or np.ptp(self.knots) < CONSTANT_STD

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if self.constant:
            return np.full_like(x, 0.5)
        return np.interp(x, self.knots, self.positions)

    def inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=np.float64)
        if self.constant:
            return np.full_like(u, self.knots[0])
        # np.interp clamps outside the outermost positions to the sample min/max
        return np.interp(u, self.positions, self.knots)


@dataclass(frozen=True)
class CopulaModel:
    column_names: tuple[str, ...]
    target_name: str
    marginals: tuple[Marginal, ...]
    corr: np.ndarray
    clip_min: np.ndarray
    clip_max: np.ndarray
    seed: int

    @property
    def n_columns(self) -> int:
        return len(self.column_names)


def repair_correlation(raw: np.ndarray) -> np.ndarray:
    """Nearest-PSD fix: floor eigenvalues, then rescale to a unit diagonal.

    Matrices that are already PSD come back unchanged.
    """
    raw = (raw + raw.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(raw)
    if eigvals.min() >= 0.0:
        return raw
    logger.debug("repairing non-PSD correlation (min eigenvalue %.3g)", eigvals.min())
    fixed = (eigvecs * np.maximum(eigvals, EIGEN_FLOOR)) @ eigvecs.T
    d = np.sqrt(np.diag(fixed))
    fixed = fixed / np.outer(d, d)
    fixed = (fixed + fixed.T) / 2.0
    np.fill_diagonal(fixed, 1.0)
    return fixed


def normal_scores(marginals: tuple[Marginal, ...], values: np.ndarray) -> np.ndarray:
    return np.column_stack(
        [ndtri(m.cdf(values[:, j])) for j, m in enumerate(marginals)]
    )


def fit_copula(train: Table, seed: int = 0) -> CopulaModel:
    values = train.values
    if train.n_rows < MIN_FIT_ROWS:
        raise TooFewRows(train.n_rows, MIN_FIT_ROWS)
    if not np.isfinite(values).all():
        raise NonFiniteInput("copula training data")

    marginals = tuple(Marginal(values[:, j]) for j in range(values.shape[1]))
    z = normal_scores(marginals, values)

    p = len(marginals)
    corr = np.eye(p)
    live = [j for j, m in enumerate(marginals) if not m.constant]
    if len(live) > 1:
        sub = np.corrcoef(z[:, live], rowvar=False)
        corr[np.ix_(live, live)] = np.clip(sub, -1.0, 1.0)
        np.fill_diagonal(corr, 1.0)
    corr = repair_correlation(corr)

    logger.info("fitted copula on %d rows x %d columns", train.n_rows, p)
    return CopulaModel(
        column_names=train.column_names,
        target_name=train.target_name,
        marginals=marginals,
        corr=corr,
        clip_min=values.min(axis=0),
        clip_max=values.max(axis=0),
        seed=seed,
    )


def _correlated_normals(
    corr: np.ndarray, n: int, rng: np.random.Generator
) -> np.ndarray:
    try:
        factor = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError:
        # singular but PSD (e.g. perfectly dependent columns)
        eigvals, eigvecs = np.linalg.eigh(corr)
        factor = eigvecs * np.sqrt(np.maximum(eigvals, 0.0))
    return rng.standard_normal((n, corr.shape[0])) @ factor.T


def sample_synthetic(
    m: CopulaModel | None,
    n: int,
    rng: np.random.Generator | int | None = None,
) -> Table:
    """Draw ``n`` rows; ``rng`` defaults to a generator seeded with ``m.seed``."""
    if m is None:
        raise NotFitted("copula")
    if n < 1:
        raise InvalidParameter("n", n, "must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(m.seed if rng is None else rng)

    z = _correlated_normals(m.corr, n, rng)
    u = ndtr(z)
    x = np.column_stack(
        [marginal.inverse_cdf(u[:, j]) for j, marginal in enumerate(m.marginals)]
    )
    x = np.clip(x, m.clip_min, m.clip_max)
    return Table(m.column_names, x, m.target_name, synthetic=np.ones(n, dtype=bool))


@dataclass(frozen=True)
class ColumnKs:
    column: str
    outcome: KsOutcome
    passed: bool


@dataclass(frozen=True)
class KsReport:
    alpha: float
    columns: tuple[ColumnKs, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.columns)


def validate_synthetic(real: Table, synth: Table, alpha: float = 0.05) -> KsReport:
    if real.column_names != synth.column_names:
        raise SchemaMismatch(real.column_names, synth.column_names)
    results = []
    for name in real.column_names:
        a, b = real.column(name), synth.column(name)
        # missing cells are not observations
        outcome = ks_two_sample(a[~np.isnan(a)], b[~np.isnan(b)])
        results.append(ColumnKs(name, outcome, outcome.p_value >= alpha))
    report = KsReport(alpha, tuple(results))
    logger.info(
        "KS validation at alpha=%g: %s",
        alpha,
        ", ".join(f"{c.column}={c.outcome.p_value:.3g}" for c in report.columns),
    )
    return report


def augment(
    train: Table,
    m: CopulaModel,
    n: int,
    rng: np.random.Generator | int | None = None,
) -> Table:
    """Append ``n`` copula rows to ``train``; appended rows carry the synthetic flag."""
    if train.column_names != m.column_names:
        raise SchemaMismatch(m.column_names, train.column_names)
    if n == 0:
        return train
    synth = sample_synthetic(m, n, rng)
    return Table(
        train.column_names,
        np.vstack([train.values, synth.values]),
        train.target_name,
        synthetic=np.concatenate([train.synthetic, synth.synthetic]),
    )


def copula_to_dict(m: CopulaModel) -> dict:
    return {
        "format": FORMAT_TAG,
        "column_names": list(m.column_names),
        "target_name": m.target_name,
        "marginals": [
            {"kind": mg.kind, "n": mg.n, "values": mg.sorted_values.tolist()}
            for mg in m.marginals
        ],
        "corr": m.corr.ravel().tolist(),
        "clip_min": m.clip_min.tolist(),
        "clip_max": m.clip_max.tolist(),
        "seed": m.seed,
    }


def copula_from_dict(payload: dict, source: object = "<dict>") -> CopulaModel:
    if payload.get("format") != FORMAT_TAG:
        raise ModelFormatError(source, FORMAT_TAG)
    try:
        return _copula_from_payload(payload)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ModelFormatError(source, FORMAT_TAG) from exc


def _copula_from_payload(payload: dict) -> CopulaModel:
    names = tuple(payload["column_names"])
    p = len(names)
    return CopulaModel(
        column_names=names,
        target_name=payload["target_name"],
        marginals=tuple(Marginal(np.array(mg["values"])) for mg in payload["marginals"]),
        corr=np.array(payload["corr"], dtype=np.float64).reshape(p, p),
        clip_min=np.array(payload["clip_min"], dtype=np.float64),
        clip_max=np.array(payload["clip_max"], dtype=np.float64),
        seed=int(payload["seed"]),
    )


def save_copula(m: CopulaModel, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(copula_to_dict(m), indent=2) + "\n", encoding="utf-8")
    return path


def load_copula(path: str | Path) -> CopulaModel:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(path, FORMAT_TAG) from exc
    if not isinstance(payload, dict):
        raise ModelFormatError(path, FORMAT_TAG)
    return copula_from_dict(payload, path)
