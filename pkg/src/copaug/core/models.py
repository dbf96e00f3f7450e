from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, LengthMismatch, MissingColumn

# Columns whose training std falls below this are treated as constant.
CONSTANT_STD = 1e-12


@dataclass(frozen=True)
class Table:
    """Column-named float matrix with NaN as the missing-cell sentinel.

    ``synthetic`` flags rows that came from a generator rather than from
    measurements; it travels with every row selection.
    """

    column_names: tuple[str, ...]
    values: np.ndarray
    target_name: str
    synthetic: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        n_cols = len(self.column_names)
        values = np.array(self.values, dtype=np.float64)
        if values.size == 0:
            values = values.reshape(0, n_cols)
        if values.ndim != 2 or values.shape[1] != n_cols:
            raise DimensionMismatch(n_cols, values.shape[-1] if values.ndim else 0)
        if self.target_name not in self.column_names:
            raise MissingColumn(self.target_name)

        if self.synthetic is None:
            synthetic = np.zeros(values.shape[0], dtype=bool)
        else:
            synthetic = np.array(self.synthetic, dtype=bool)
        if synthetic.shape != (values.shape[0],):
            raise LengthMismatch(values.shape[0], synthetic.shape[0])

        values.setflags(write=False)
        synthetic.setflags(write=False)
        object.__setattr__(self, "column_names", tuple(self.column_names))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "synthetic", synthetic)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.values)

    @property
    def target_index(self) -> int:
        return self.column_names.index(self.target_name)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(c for c in self.column_names if c != self.target_name)

    @property
    def features(self) -> np.ndarray:
        idx = [i for i, c in enumerate(self.column_names) if c != self.target_name]
        return self.values[:, idx]

    @property
    def target(self) -> np.ndarray:
        return self.values[:, self.target_index]

    def column(self, name: str) -> np.ndarray:
        if name not in self.column_names:
            raise MissingColumn(name)
        return self.values[:, self.column_names.index(name)]

    def take(self, rows: np.ndarray) -> "Table":
        return Table(
            self.column_names,
            self.values[rows],
            self.target_name,
            synthetic=self.synthetic[rows],
        )

    def replace_values(self, values: np.ndarray) -> "Table":
        return Table(self.column_names, values, self.target_name, synthetic=self.synthetic)


@dataclass(frozen=True)
class SplitPair:
    train: Table
    test: Table
    split_ratio: float
    seed: int
    train_index: np.ndarray
    test_index: np.ndarray


@dataclass(frozen=True)
class Imputer:
    column_names: tuple[str, ...]
    medians: np.ndarray


@dataclass(frozen=True)
class Standardizer:
    column_names: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray

    @property
    def constant(self) -> np.ndarray:
        return self.stds < CONSTANT_STD
