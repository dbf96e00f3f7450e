import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from numbers import Integral, Real
from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..evaluation.grids import GRIDS, full_grid
from ..evaluation.model_select import HyperGrid
from ..synth.bundled import COLUMNS, TARGET

BUNDLED = "bundled"
INT_FIELDS = ("tuning_k", "eval_k", "poly_degree", "master_seed", "bundled_rows")
REAL_FIELDS = (
    "split_ratio",
    "ks_alpha",
    "pe_epsilon",
    "ridge_alpha",
    "ttest_alpha",
    "bundled_missing_fraction",
)


def _is_int(value: Any) -> bool:
    return isinstance(value, Integral) and not isinstance(value, bool)


def _is_sequence(value: Any) -> bool:
    return isinstance(value, (list, tuple))


@dataclass(frozen=True)
class SeedPlan:
    data: int
    split: int
    copula: int
    tuning: int
    evaluation: int
    gbm: int

    @classmethod
    def derive(cls, master_seed: int) -> "SeedPlan":
        return cls(
            data=master_seed,
            split=master_seed + 1,
            copula=master_seed + 2,
            tuning=master_seed + 3,
            evaluation=master_seed + 4,
            gbm=master_seed + 5,
        )

    def level(self, level: int) -> int:
        # keyed on the level value so each level's stream is independent of the others
        return self.data + 1000 + level


@dataclass(frozen=True)
class ExperimentConfig:
    input_path: str = BUNDLED
    columns: tuple[str, ...] = COLUMNS
    target: str = TARGET
    split_ratio: float = 0.8
    synthetic_levels: tuple[int, ...] = (100, 250, 500, 750, 1000)
    tuning_k: int = 5
    eval_k: int = 10
    grid: HyperGrid = field(default=full_grid)
    poly_degree: int = 2
    ks_alpha: float = 0.05
    pe_epsilon: float = 1e-6
    master_seed: int = 42
    ridge_alpha: float = 1.0
    ttest_alpha: float = 0.05
    bundled_rows: int = 12657
    bundled_missing_fraction: float = 0.02

    def __post_init__(self):
        self._check_types()
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "synthetic_levels", tuple(int(v) for v in self.synthetic_levels))
        levels = self.synthetic_levels
        if any(v < 0 for v in levels):
            raise ConfigError(f"synthetic_levels must be non-negative: {list(levels)}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigError(f"synthetic_levels must be strictly increasing: {list(levels)}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ConfigError(f"split_ratio must lie in (0, 1): {self.split_ratio}")
        for name in ("ks_alpha", "ttest_alpha"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1): {getattr(self, name)}")
        if self.tuning_k < 2 or self.eval_k < 2:
            raise ConfigError("tuning_k and eval_k must be >= 2")
        if self.poly_degree < 1:
            raise ConfigError(f"poly_degree must be >= 1: {self.poly_degree}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed must be >= 0: {self.master_seed}")
        if self.pe_epsilon <= 0:
            raise ConfigError(f"pe_epsilon must be > 0: {self.pe_epsilon}")
        if self.ridge_alpha < 0:
            raise ConfigError(f"ridge_alpha must be >= 0: {self.ridge_alpha}")
        if not 0.0 <= self.bundled_missing_fraction < 1.0:
            raise ConfigError(
                f"bundled_missing_fraction must lie in [0, 1): {self.bundled_missing_fraction}"
            )

    def _check_types(self):
        for name in ("input_path", "target"):
            if not isinstance(getattr(self, name), str):
                raise ConfigError(f"{name} must be a string: {getattr(self, name)!r}")
        if not _is_sequence(self.columns) or not all(isinstance(c, str) for c in self.columns):
            raise ConfigError(f"columns must be a list of strings: {self.columns!r}")
        if not _is_sequence(self.synthetic_levels) or not all(
            _is_int(v) for v in self.synthetic_levels
        ):
            raise ConfigError(
                f"synthetic_levels must be a list of integers: {self.synthetic_levels!r}"
            )
        for name in INT_FIELDS:
            if not _is_int(getattr(self, name)):
                raise ConfigError(f"{name} must be an integer: {getattr(self, name)!r}")
        for name in REAL_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Real):
                raise ConfigError(f"{name} must be a number: {value!r}")
        if not isinstance(self.grid, HyperGrid):
            raise ConfigError(f"grid must be a HyperGrid: {self.grid!r}")

    @property
    def seeds(self) -> SeedPlan:
        return SeedPlan.derive(self.master_seed)

    @property
    def uses_bundled_data(self) -> bool:
        return self.input_path == BUNDLED


def _parse_grid(value: Any) -> HyperGrid:
    if isinstance(value, HyperGrid):
        return value
    if isinstance(value, str):
        if value not in GRIDS:
            raise ConfigError(f"unknown grid {value!r}; choose from {sorted(GRIDS)}")
        return GRIDS[value]
    if isinstance(value, dict):
        unknown = set(value) - {"n_estimators", "learning_rate", "max_depth"}
        if unknown:
            raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
        try:
            return HyperGrid(
                tuple(value["n_estimators"]),
                tuple(value["learning_rate"]),
                tuple(value["max_depth"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid: {exc}") from exc
    raise ConfigError(f"grid must be a name or an object, got {type(value).__name__}")


def config_from_dict(payload: dict[str, Any]) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(payload)
    if "grid" in kwargs:
        kwargs["grid"] = _parse_grid(kwargs["grid"])
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: config root must be an object")
    return config_from_dict(payload)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    payload = asdict(cfg)
    payload["columns"] = list(cfg.columns)
    payload["synthetic_levels"] = list(cfg.synthetic_levels)
    payload["grid"] = {
        "n_estimators": list(cfg.grid.n_estimators),
        "learning_rate": list(cfg.grid.learning_rate),
        "max_depth": list(cfg.grid.max_depth),
    }
    return payload


def config_hash(cfg: ExperimentConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def with_overrides(cfg: ExperimentConfig, **changes: Any) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None})
