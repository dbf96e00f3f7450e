import logging
import math
from itertools import combinations_with_replacement

import numpy as np

from ..errors import (
    AllMissingColumn,
    AllRowsDropped,
    DegreeTooLarge,
    InvalidParameter,
    NonFiniteInput,
    SchemaMismatch,
    TooFewRows,
)
from .models import Imputer, SplitPair, Standardizer, Table

logger = logging.getLogger(__name__)

MAX_EXPANDED_COLUMNS = 1000


def drop_missing_target(t: Table) -> Table:
    keep = ~np.isnan(t.target)
    if not keep.any():
        raise AllRowsDropped()
    if keep.all():
        return t
    logger.info("dropping %d rows with missing target", int((~keep).sum()))
    return t.take(keep)


def fit_imputer(train: Table) -> Imputer:
    names = train.feature_names
    x = train.features
    medians = np.empty(len(names))
    for j, name in enumerate(names):
        observed = x[:, j][~np.isnan(x[:, j])]
        if observed.size == 0:
            raise AllMissingColumn(name)
        # np.median averages the middle pair for even counts
        medians[j] = np.median(observed)
    return Imputer(names, medians)


def apply_imputer(im: Imputer, t: Table) -> Table:
    if t.feature_names != im.column_names:
        raise SchemaMismatch(im.column_names, t.feature_names)
    values = t.values.copy()
    for j, name in enumerate(im.column_names):
        col = t.column_names.index(name)
        missing = np.isnan(values[:, col])
        values[missing, col] = im.medians[j]
    return t.replace_values(values)


def train_test_split(t: Table, ratio: float, seed: int) -> SplitPair:
    if not 0.0 < ratio < 1.0:
        raise InvalidParameter("ratio", ratio, "must lie in (0, 1)")
    n = t.n_rows
    if n < 2:
        raise TooFewRows(n, 2)

    # round half up, then keep at least one row on each side
    n_test = math.floor(n * (1.0 - ratio) + 0.5)
    n_test = min(max(n_test, 1), n - 1)

    perm = np.random.default_rng(seed).permutation(n)
    test_index = np.sort(perm[:n_test])
    train_index = np.sort(perm[n_test:])
    return SplitPair(
        train=t.take(train_index),
        test=t.take(test_index),
        split_ratio=ratio,
        seed=seed,
        train_index=train_index,
        test_index=test_index,
    )


def fit_standardizer(train: Table) -> Standardizer:
    if np.isnan(train.values).any():
        raise NonFiniteInput("standardizer training data")
    means = train.values.mean(axis=0)
    stds = train.values.std(axis=0)
    return Standardizer(train.column_names, means, stds)


def apply_standardizer(s: Standardizer, t: Table) -> Table:
    if t.column_names != s.column_names:
        raise SchemaMismatch(s.column_names, t.column_names)
    constant = s.constant
    scale = np.where(constant, 1.0, s.stds)
    values = (t.values - s.means) / scale
    values[:, constant] = 0.0
    return t.replace_values(values)


def inverse_standardize(s: Standardizer, t: Table) -> Table:
    """Map standardized values back; constant columns come back as their mean."""
    if t.column_names != s.column_names:
        raise SchemaMismatch(s.column_names, t.column_names)
    scale = np.where(s.constant, 0.0, s.stds)
    return t.replace_values(t.values * scale + s.means)


def _monomial_name(names: tuple[str, ...], combo: tuple[int, ...]) -> str:
    parts = []
    for idx in sorted(set(combo)):
        power = combo.count(idx)
        parts.append(names[idx] if power == 1 else f"{names[idx]}^{power}")
    return "*".join(parts)


def expanded_column_count(n_features: int, degree: int) -> int:
    return math.comb(n_features + degree, degree) - 1


def polynomial_expand(
    t: Table, degree: int = 2, max_columns: int = MAX_EXPANDED_COLUMNS
) -> Table:
    """Replace the features with every monomial of total degree 1..degree.

    Columns come out in graded-lexicographic order (``a, b, a^2, a*b, b^2``)
    followed by the untouched target.
    """
    if degree < 1:
        raise InvalidParameter("degree", degree, "must be >= 1")
    names = t.feature_names
    n_out = expanded_column_count(len(names), degree)
    if n_out > max_columns:
        raise DegreeTooLarge(n_out, max_columns)

    x = t.features
    out_names = []
    out_cols = []
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(range(len(names)), d):
            out_names.append(_monomial_name(names, combo))
            out_cols.append(np.prod(x[:, list(combo)], axis=1))

    values = np.column_stack([*out_cols, t.target]) if out_cols else t.target[:, None]
    return Table(
        (*out_names, t.target_name),
        values,
        t.target_name,
        synthetic=t.synthetic,
    )
