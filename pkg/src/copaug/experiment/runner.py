import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
from joblib import Parallel, delayed

from .. import __version__
from ..core.io import load_csv
from ..core.models import Table
from ..core.preprocess import (
    apply_imputer,
    apply_standardizer,
    drop_missing_target,
    fit_imputer,
    fit_standardizer,
    polynomial_expand,
    train_test_split,
)
from ..errors import CopaugError, StageError
from ..evaluation.metrics import MetricSet, evaluate
from ..evaluation.model_select import (
    CvResult,
    GbmConfig,
    GridSearchResult,
    cross_validate_model,
    grid_search,
    kfold_indices,
)
from ..evaluation.stats_tests import TtestOutcome, paired_ttest
from ..learners.gbm import fit_gbm
from ..learners.predict import predict
from ..learners.ridge import fit_ridge
from ..synth.bundled import make_bundled_dataset
from ..synth.copula import CopulaModel, KsReport, augment, fit_copula, validate_synthetic
from .config import ExperimentConfig, SeedPlan, config_hash

logger = logging.getLogger(__name__)

BASELINE = "Baseline"


def model_name(level: int | None) -> str:
    return BASELINE if level is None else f"Synthetic {level}"


@contextmanager
def stage(name: str) -> Iterator[None]:
    logger.info("stage: %s", name)
    try:
        yield
    except StageError:
        raise
    except (CopaugError, ValueError, ArithmeticError, OSError) as exc:
        raise StageError(name, exc) from exc


@dataclass(frozen=True)
class ModelOutcome:
    name: str
    level: int | None
    best_config: GbmConfig
    search: GridSearchResult
    test_metrics: MetricSet
    cv: CvResult
    fold_synthetic_counts: tuple[int, ...]
    ks: KsReport | None
    n_train_rows: int
    n_synthetic: int

    @property
    def synthetic_share(self) -> float:
        return self.n_synthetic / self.n_train_rows


@dataclass(frozen=True)
class Provenance:
    master_seed: int
    seeds: SeedPlan
    config_hash: str
    timestamp: str
    version: str


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    baseline: ModelOutcome
    levels: tuple[ModelOutcome, ...]
    ttests: tuple[TtestOutcome, ...]
    ridge_check: MetricSet
    n_rows_loaded: int
    n_rows_clean: int
    n_train: int
    n_test: int
    provenance: Provenance

    @property
    def models(self) -> tuple[ModelOutcome, ...]:
        return (self.baseline, *self.levels)


def _load(cfg: ExperimentConfig) -> Table:
    if cfg.uses_bundled_data:
        return make_bundled_dataset(
            cfg.bundled_rows, cfg.seeds.data, cfg.bundled_missing_fraction
        )
    return load_csv(cfg.input_path, cfg.columns, cfg.target)


def _ridge_check(cfg: ExperimentConfig, train: Table, test: Table) -> MetricSet:
    scaler = fit_standardizer(train)
    train_s = apply_standardizer(scaler, train)
    test_s = apply_standardizer(scaler, test)
    model = fit_ridge(train_s.features, train_s.target, cfg.ridge_alpha)
    return evaluate(test_s.target, predict(model, test_s.features), cfg.pe_epsilon)


def split_workers(workers: int, n_models: int) -> tuple[int, int]:
    """Share ``workers`` between model-level and fold-level parallelism."""
    workers = max(1, workers)
    outer = min(workers, n_models)
    return outer, max(1, workers // outer)


def _run_level(
    cfg: ExperimentConfig,
    level: int | None,
    train: Table,
    test: Table,
    copula: CopulaModel,
    workers: int = 1,
) -> ModelOutcome:
    name = model_name(level)
    seeds = cfg.seeds
    n_synth = level or 0

    with stage(f"{name}: augment"):
        augmented = augment(train, copula, n_synth, seeds.level(n_synth))
        ks = None
        if n_synth > 0:
            ks = validate_synthetic(train, augmented.take(augmented.synthetic), cfg.ks_alpha)

    with stage(f"{name}: preprocess"):
        train_x = polynomial_expand(augmented, cfg.poly_degree)
        test_x = polynomial_expand(test, cfg.poly_degree)
        # scaler fit on real rows only; all models share error units
        scaler = fit_standardizer(train_x.take(~train_x.synthetic))
        train_s = apply_standardizer(scaler, train_x)
        test_s = apply_standardizer(scaler, test_x)
        X, y = train_s.features, train_s.target
        synthetic = augmented.synthetic

    with stage(f"{name}: grid search"):
        search = grid_search(
            X, y, cfg.grid, cfg.tuning_k, seeds.tuning, workers, synthetic
        )

    with stage(f"{name}: evaluate"):
        model = fit_gbm(X, y, *search.best, seed=seeds.gbm)
        test_metrics = evaluate(test_s.target, predict(model, test_s.features), cfg.pe_epsilon)

    with stage(f"{name}: cross-validate"):
        cv = cross_validate_model(
            X, y, search.best, cfg.eval_k, seeds.evaluation, synthetic, workers
        )
        folds = kfold_indices(augmented.n_rows, cfg.eval_k, seeds.evaluation, synthetic)
        fold_synthetic = tuple(int(synthetic[valid].sum()) for _, valid in folds)

    logger.info(
        "%s: best %s, test MSE %.4g, mean CV MSE %.4g",
        name,
        tuple(search.best),
        test_metrics.mse,
        cv.mean_loss,
    )
    return ModelOutcome(
        name=name,
        level=level,
        best_config=search.best,
        search=search,
        test_metrics=test_metrics,
        cv=cv,
        fold_synthetic_counts=fold_synthetic,
        ks=ks,
        n_train_rows=augmented.n_rows,
        n_synthetic=int(augmented.synthetic.sum()),
    )


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Baseline plus one augmented model per synthetic level, on one shared split.

    The copula is fit once on the imputed real training rows; every level
    samples from it with its own seed. The test split stays real-only.
    """
    seeds = cfg.seeds

    with stage("load"):
        raw = _load(cfg)
    with stage("clean"):
        clean = drop_missing_target(raw)
    with stage("split"):
        split = train_test_split(clean, cfg.split_ratio, seeds.split)
    with stage("impute"):
        imputer = fit_imputer(split.train)
        train = apply_imputer(imputer, split.train)
        test = apply_imputer(imputer, split.test)
    with stage("ridge baseline"):
        ridge_check = _ridge_check(cfg, train, test)
    with stage("fit copula"):
        copula = fit_copula(train, seeds.copula)

    levels = (None, *cfg.synthetic_levels)
    outer, inner = split_workers(workers, len(levels))
    logger.info("%d models on %d x %d workers", len(levels), outer, inner)
    outcomes = Parallel(n_jobs=outer)(
        delayed(_run_level)(cfg, level, train, test, copula, inner) for level in levels
    )
    baseline, *augmented = outcomes

    with stage("paired t-tests"):
        ttests = tuple(
            paired_ttest(np.array(baseline.cv.fold_losses), np.array(o.cv.fold_losses))
            for o in augmented
        )

    provenance = Provenance(
        master_seed=cfg.master_seed,
        seeds=seeds,
        config_hash=config_hash(cfg),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        version=__version__,
    )
    return ExperimentResult(
        config=cfg,
        baseline=baseline,
        levels=tuple(augmented),
        ttests=ttests,
        ridge_check=ridge_check,
        n_rows_loaded=raw.n_rows,
        n_rows_clean=clean.n_rows,
        n_train=train.n_rows,
        n_test=test.n_rows,
        provenance=provenance,
    )
