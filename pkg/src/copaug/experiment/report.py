"""Serialise an ExperimentResult into report.json plus plot-ready CSV tables."""

import json
import logging
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any

import pandas as pd

from ..errors import ReportFormatError, ReportIoError
from ..evaluation.metrics import MetricSet
from ..evaluation.model_select import CvResult
from ..synth.copula import KsReport
from .config import config_to_dict
from .runner import BASELINE, ExperimentResult, ModelOutcome

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
FLOAT_FORMAT = "%.6g"
REPORT_KEYS = ("models", "ttests", "ridge_check")


def _finite(value: float) -> float | None:
    return value if math.isfinite(value) else None


def _metrics_dict(m: MetricSet, with_samples: bool = True) -> dict[str, Any]:
    payload = {
        "mse": m.mse,
        "rmse": m.rmse,
        "mae": m.mae,
        "r2": m.r2,
        "pe_mean": m.pe_mean,
        "pe_median": m.pe_median,
        "pe_std": m.pe_std,
    }
    if with_samples:
        payload["percent_errors"] = m.percent_errors.tolist()
    return payload


def _cv_dict(cv: CvResult) -> dict[str, Any]:
    return {
        "config": cv.config._asdict(),
        "fold_losses": list(cv.fold_losses),
        "fold_r2": list(cv.fold_r2),
        "mean_loss": cv.mean_loss,
        "mean_r2": _finite(cv.mean_r2),
        "mean_r2_undefined": not math.isfinite(cv.mean_r2),
    }


def _ks_dict(ks: KsReport | None) -> dict[str, Any] | None:
    if ks is None:
        return None
    return {
        "alpha": ks.alpha,
        "passed": ks.passed,
        "columns": [
            {
                "column": c.column,
                "d_statistic": c.outcome.d_statistic,
                "p_value": c.outcome.p_value,
                "n1": c.outcome.n1,
                "n2": c.outcome.n2,
                "passed": c.passed,
            }
            for c in ks.columns
        ],
    }


def _model_dict(o: ModelOutcome, baseline_pe_mean: float) -> dict[str, Any]:
    improvement = None
    if baseline_pe_mean > 0:
        improvement = 100.0 * (baseline_pe_mean - o.test_metrics.pe_mean) / baseline_pe_mean
    return {
        "name": o.name,
        "level": o.level,
        "best_config": o.best_config._asdict(),
        "test_metrics": _metrics_dict(o.test_metrics),
        "improvement_pct": improvement,
        "cv": _cv_dict(o.cv),
        "fold_synthetic_counts": list(o.fold_synthetic_counts),
        "grid_results": [_cv_dict(r) for r in o.search.results],
        "ks": _ks_dict(o.ks),
        "n_train_rows": o.n_train_rows,
        "n_synthetic": o.n_synthetic,
        "synthetic_share": o.synthetic_share,
    }


def result_to_dict(r: ExperimentResult) -> dict[str, Any]:
    baseline_pe = r.baseline.test_metrics.pe_mean
    alpha = r.config.ttest_alpha
    return {
        "config": config_to_dict(r.config),
        "data": {
            "n_rows_loaded": r.n_rows_loaded,
            "n_rows_clean": r.n_rows_clean,
            "n_train": r.n_train,
            "n_test": r.n_test,
        },
        "ridge_check": _metrics_dict(r.ridge_check, with_samples=False),
        "models": [_model_dict(o, baseline_pe) for o in r.models],
        "ttests": [
            {
                "comparison": f"{BASELINE} vs. {o.name}",
                "model": o.name,
                "t_statistic": _finite(t.t_statistic),
                "t_infinite": math.isinf(t.t_statistic),
                "df": t.df,
                "mean_diff": t.mean_diff,
                "p_value": t.p_value,
                "p_one_sided": t.p_one_sided,
                "zero_variance": t.zero_variance,
                "significant": t.p_value < alpha,
            }
            for o, t in zip(r.levels, r.ttests)
        ],
        "provenance": asdict(r.provenance),
    }


def dumps_report(payload: dict[str, Any]) -> str:
    """Strict JSON: non-finite numbers are encoded as null before this point."""
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _tables(payload: dict[str, Any]) -> dict[str, pd.DataFrame]:
    models = payload["models"]
    metrics = pd.DataFrame(
        [
            {
                "model": m["name"],
                "mse": m["test_metrics"]["mse"],
                "rmse": m["test_metrics"]["rmse"],
                "mae": m["test_metrics"]["mae"],
                "r2": m["test_metrics"]["r2"],
                "cv_mean_mse": m["cv"]["mean_loss"],
            }
            for m in models
        ]
    )
    percent_error = pd.DataFrame(
        [
            {
                "model": m["name"],
                "mean_pct": m["test_metrics"]["pe_mean"],
                "median_pct": m["test_metrics"]["pe_median"],
                "std_pct": m["test_metrics"]["pe_std"],
                "improvement_pct": m["improvement_pct"],
            }
            for m in models
        ]
    )
    ttests = pd.DataFrame(
        [
            {
                "comparison": t["comparison"],
                "t_statistic": t["t_statistic"],
                "df": t["df"],
                "mean_diff": t["mean_diff"],
                "p_value": t["p_value"],
                "p_one_sided": t["p_one_sided"],
                "significant": "Yes" if t["significant"] else "No",
            }
            for t in payload["ttests"]
        ],
        columns=[
            "comparison",
            "t_statistic",
            "df",
            "mean_diff",
            "p_value",
            "p_one_sided",
            "significant",
        ],
    )
    cv_folds = pd.DataFrame(
        [
            {"model": m["name"], "fold": i + 1, "mse": loss, "synthetic_rows": n_synth}
            for m in models
            for i, (loss, n_synth) in enumerate(
                zip(m["cv"]["fold_losses"], m["fold_synthetic_counts"])
            )
        ]
    )
    pe_density = pd.DataFrame(
        [
            {"model": m["name"], "percent_error": pe}
            for m in models
            for pe in m["test_metrics"]["percent_errors"]
        ]
    )
    return {
        "metrics.csv": metrics,
        "percent_error.csv": percent_error,
        "ttests.csv": ttests,
        "cv_folds.csv": cv_folds,
        "pe_density.csv": pe_density,
    }


def write_report_payload(
    payload: dict[str, Any], out_dir: str | Path, include_json: bool = True
) -> list[Path]:
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportIoError(out_dir, exc) from exc

    if include_json:
        path = out_dir / REPORT_JSON
        try:
            path.write_text(dumps_report(payload), encoding="utf-8")
        except OSError as exc:
            raise ReportIoError(path, exc) from exc
        written.append(path)

    for name, frame in _tables(payload).items():
        path = out_dir / name
        try:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        except OSError as exc:
            raise ReportIoError(path, exc) from exc
        written.append(path)

    logger.info("wrote %d report files to %s", len(written), out_dir)
    return written


def write_report(r: ExperimentResult, out_dir: str | Path) -> list[Path]:
    return write_report_payload(result_to_dict(r), out_dir)


def load_report(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ReportFormatError(path, "not JSON") from exc
    if not isinstance(payload, dict):
        raise ReportFormatError(path, "root is not an object")
    missing = [key for key in REPORT_KEYS if key not in payload]
    if missing:
        raise ReportFormatError(path, f"missing {missing}")
    return payload


def render_report(
    payload: dict[str, Any], source: object, out_dir: str | Path | None = None
) -> str:
    """Summary text for a loaded payload, writing its CSV tables when ``out_dir`` is set."""
    try:
        if out_dir is not None:
            write_report_payload(payload, out_dir, include_json=False)
        return format_summary(payload)
    except (KeyError, TypeError, IndexError) as exc:
        raise ReportFormatError(source, f"bad field {exc}") from exc


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.4f}"


def _fmt_p(value: float | None) -> str:
    return "-" if value is None else f"{value:.3g}"


def format_summary(payload: dict[str, Any]) -> str:
    """Console table: test-set errors, mean CV MSE and the paired t-test p per model."""
    p_by_model = {t["model"]: t["p_value"] for t in payload["ttests"]}
    rows = [
        {
            "Model": m["name"],
            "MSE": _fmt(m["test_metrics"]["mse"]),
            "RMSE": _fmt(m["test_metrics"]["rmse"]),
            "MAE": _fmt(m["test_metrics"]["mae"]),
            "CV MSE": _fmt(m["cv"]["mean_loss"]),
            "Mean PE (%)": f"{m['test_metrics']['pe_mean']:.2f}",
            "p-value": _fmt_p(p_by_model.get(m["name"])),
        }
        for m in payload["models"]
    ]
    ridge = payload["ridge_check"]
    table = pd.DataFrame(rows).to_string(index=False)
    return f"{table}\n\nRidge check (real data only): MSE {ridge['mse']:.4f}, R2 {_fmt(ridge['r2'])}"
