import argparse
import logging
import os
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .. import __version__
from ..core.io import load_csv, read_header, write_table_csv
from ..core.preprocess import apply_imputer, drop_missing_target, fit_imputer
from ..errors import ConfigError, CopaugError
from ..evaluation.grids import GRIDS
from ..experiment.config import ExperimentConfig, load_config, with_overrides
from ..experiment.report import (
    format_summary,
    load_report,
    render_report,
    result_to_dict,
    write_report_payload,
)
from ..experiment.runner import run_experiment
from ..synth.bundled import make_bundled_dataset
from ..synth.copula import fit_copula, load_copula, sample_synthetic, save_copula, validate_synthetic

logger = logging.getLogger("copaug")

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_KS_FAILED = 3

SEED_ENV = "COPAUG_SEED"
LOG_FORMAT = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity: int) -> None:
    level = {-1: logging.WARNING, 0: logging.INFO}.get(verbosity, logging.DEBUG)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.handlers.clear()
    logger.addHandler(handler)
    logger.setLevel(level)


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return value


def level_list(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def name_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _columns_and_target(
    path: Path, columns: list[str] | None, target: str | None
) -> tuple[list[str], str]:
    columns = columns or read_header(path)
    return columns, target or columns[-1]


def cmd_generate_data(args: argparse.Namespace) -> int:
    table = make_bundled_dataset(args.n, args.seed, args.missing_fraction)
    write_table_csv(table, args.out)
    print(f"wrote {table.n_rows} rows to {args.out}")
    return EXIT_OK


def cmd_fit_copula(args: argparse.Namespace) -> int:
    columns, target = _columns_and_target(args.input, args.columns, args.target)
    table = drop_missing_target(load_csv(args.input, columns, target))
    table = apply_imputer(fit_imputer(table), table)
    model = fit_copula(table, args.seed)
    save_copula(model, args.out)

    print(f"{'column':<12} {'min':>12} {'median':>12} {'max':>12}")
    for name, marginal in zip(model.column_names, model.marginals):
        v = marginal.sorted_values
        print(f"{name:<12} {v[0]:>12.6g} {np.median(v):>12.6g} {v[-1]:>12.6g}")
    print("\ncorrelation of normal scores:")
    with np.printoptions(precision=4, suppress=True):
        print(model.corr)
    print(f"\nwrote {args.out}")
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    model = load_copula(args.model)
    seed = model.seed if args.seed is None else args.seed
    table = sample_synthetic(model, args.n, seed)
    write_table_csv(table, args.out)
    print(f"wrote {table.n_rows} synthetic rows to {args.out}")
    return EXIT_OK


def cmd_ks_test(args: argparse.Namespace) -> int:
    columns, target = _columns_and_target(args.real, args.columns, None)
    real = load_csv(args.real, columns, target)
    synth = load_csv(args.synth, columns, target)
    report = validate_synthetic(real, synth, args.alpha)
    print(f"{'column':<12} {'D':>10} {'p':>12}  result")
    for c in report.columns:
        verdict = "pass" if c.passed else "FAIL"
        print(f"{c.column:<12} {c.outcome.d_statistic:>10.4f} {c.outcome.p_value:>12.4g}  {verdict}")
    return EXIT_OK if report.passed else EXIT_KS_FAILED


def _experiment_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    seed = args.seed
    if seed is None and os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise ConfigError(f"${SEED_ENV} must be an integer: {os.environ[SEED_ENV]!r}")
    return with_overrides(
        cfg,
        master_seed=seed,
        synthetic_levels=args.levels,
        input_path=str(args.input) if args.input else None,
        grid=GRIDS["fast"] if args.fast else None,
    )


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _experiment_config(args)
    result = run_experiment(cfg, workers=args.workers)
    payload = result_to_dict(result)
    write_report_payload(payload, args.out)
    print(format_summary(payload))
    print(f"\nreport written to {args.out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    payload = load_report(args.input)
    print(render_report(payload, args.input, args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copaug",
        description="Gaussian-copula data augmentation for tabular regression.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    noise.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-data", help="write the bundled desk-scale dataset")
    p.add_argument("--out", type=Path, required=True, help="output CSV")
    p.add_argument("--n", type=positive_int, default=12657, help="row count (>= 100)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--missing-fraction", type=float, default=0.02)
    p.set_defaults(handler=cmd_generate_data)

    p = sub.add_parser("fit-copula", help="fit a Gaussian copula to a CSV file")
    p.add_argument("--input", type=Path, required=True, help="input CSV")
    p.add_argument("--out", type=Path, required=True, help="model file to write")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--columns", type=name_list, help="comma-separated columns (default: header)")
    p.add_argument("--target", help="target column (default: last column)")
    p.set_defaults(handler=cmd_fit_copula)

    p = sub.add_parser("sample", help="draw synthetic rows from a fitted copula")
    p.add_argument("--model", type=Path, required=True, help="copula model file")
    p.add_argument("--n", type=positive_int, required=True, help="rows to draw (>= 1)")
    p.add_argument("--out", type=Path, required=True, help="output CSV")
    p.add_argument("--seed", type=int, help="generator seed (default: the model's)")
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("ks-test", help="per-column two-sample KS test of two CSV files")
    p.add_argument("--real", type=Path, required=True)
    p.add_argument("--synth", type=Path, required=True)
    p.add_argument("--alpha", type=fraction, default=0.05)
    p.add_argument("--columns", type=name_list, help="comma-separated columns (default: header)")
    p.set_defaults(handler=cmd_ks_test)

    p = sub.add_parser("run", help="run the full augmentation experiment")
    p.add_argument("--config", type=Path, help="JSON experiment config")
    p.add_argument("--input", type=Path, help="CSV input instead of the bundled data")
    p.add_argument("--levels", type=level_list, help="synthetic levels, e.g. 100,250")
    p.add_argument("--seed", type=int, help=f"master seed (overrides ${SEED_ENV})")
    p.add_argument("--fast", action="store_true", help="single-config grid")
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--workers", type=positive_int, default=os.cpu_count() or 1)
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("report", help="summarise an existing report.json")
    p.add_argument("--input", type=Path, required=True, help="report.json")
    p.add_argument("--out", type=Path, help="regenerate the CSV tables here")
    p.set_defaults(handler=cmd_report)

    return parser


def _check_paths(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    for attr in ("config", "input", "model", "real", "synth"):
        path = getattr(args, attr, None)
        if path is not None and not Path(path).is_file():
            parser.error(f"--{attr}: no such file: {path}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_paths(parser, args)
    configure_logging(-1 if args.quiet else 1 if args.verbose else 0)

    try:
        return args.handler(args)
    except (CopaugError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
