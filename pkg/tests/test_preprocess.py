import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copaug.core.io import load_csv, read_header, write_table_csv
from copaug.core.models import Table
from copaug.core.preprocess import (
    apply_imputer,
    apply_standardizer,
    drop_missing_target,
    expanded_column_count,
    fit_imputer,
    fit_standardizer,
    inverse_standardize,
    polynomial_expand,
    train_test_split,
)
from copaug.errors import (
    AllMissingColumn,
    AllRowsDropped,
    DegreeTooLarge,
    EmptyFile,
    InvalidParameter,
    MalformedRow,
    MissingColumn,
    TooFewRows,
    UnreadableFile,
)

SCHEMA = ["temp", "sal", "uvb", "chla"]


def test_load_csv_clean_rows(write_csv):
    path = write_csv("temp,sal,uvb,chla\n1,2,3,4\n5,6,7,8\n9,10,11,12\n")
    table = load_csv(path, SCHEMA, "chla")
    assert table.n_rows == 3
    assert not table.missing_mask.any()
    assert table.column_names == tuple(SCHEMA)
    assert table.target.tolist() == [4.0, 8.0, 12.0]


def test_load_csv_blank_cell_is_missing(write_csv):
    path = write_csv("temp,sal,uvb,chla\n1,,3,4\n5,6,7,8\n9,10,abc,12\n")
    table = load_csv(path, SCHEMA, "chla")
    mask = table.missing_mask
    assert mask[0, 1]
    assert mask[2, 2]
    assert mask.sum() == 2
    assert table.values[1].tolist() == [5.0, 6.0, 7.0, 8.0]


def test_load_csv_reorders_and_ignores_extra_columns(write_csv):
    path = write_csv("site,chla,uvb,temp,sal\nA,4,3,1,2\n")
    table = load_csv(path, SCHEMA, "chla")
    assert table.column_names == tuple(SCHEMA)
    assert table.values[0].tolist() == [1.0, 2.0, 3.0, 4.0]


def test_load_csv_missing_column(write_csv):
    path = write_csv("temp,sal,chla\n1,2,3\n")
    with pytest.raises(MissingColumn) as exc:
        load_csv(path, SCHEMA, "chla")
    assert exc.value.name == "uvb"


def test_load_csv_malformed_row(write_csv):
    path = write_csv("temp,sal,uvb,chla\n1,2,3,4\n1,2,3\n")
    with pytest.raises(MalformedRow) as exc:
        load_csv(path, SCHEMA, "chla")
    assert exc.value.line == 3


def test_load_csv_strips_byte_order_mark(tmp_path):
    path = tmp_path / "excel.csv"
    path.write_bytes(b"\xef\xbb\xbftemp,sal,uvb,chla\r\n1,2,3,4\r\n")
    table = load_csv(path, SCHEMA, "chla")
    assert table.column_names == tuple(SCHEMA)
    np.testing.assert_array_equal(table.values, [[1.0, 2.0, 3.0, 4.0]])
    assert read_header(path)[0] == "temp"


@pytest.mark.parametrize(
    "content",
    [
        b"temp,sal,uvb,chla\n1,2,3,4\n\xe9,2,3,4\n",
        b"temp,sal,uvb,chla\n1,2,3," + b"9" * 200_000 + b"\n",
    ],
)
def test_load_csv_unreadable_file(tmp_path, content):
    path = tmp_path / "data.csv"
    path.write_bytes(content)
    with pytest.raises(UnreadableFile):
        load_csv(path, SCHEMA, "chla")


def test_load_csv_empty_file(write_csv):
    with pytest.raises(EmptyFile):
        load_csv(write_csv(""), SCHEMA, "chla")


def test_written_csv_reloads_with_missing_cells(tmp_path, make_table):
    table = make_table({"a": [1.5, np.nan], "y": [0.25, 3.0]}, "y")
    path = write_table_csv(table, tmp_path / "out.csv")
    again = load_csv(path, ["a", "y"], "y")
    np.testing.assert_array_equal(again.missing_mask, table.missing_mask)
    assert again.values[0].tolist() == [1.5, 0.25]


def test_drop_missing_target_removes_rows(make_table):
    table = make_table(
        {"x": [1, 2, 3, 4, 5], "y": [1, np.nan, 3, np.nan, 5]}, "y"
    )
    assert drop_missing_target(table).n_rows == 3


def test_drop_missing_target_keeps_feature_missing_rows(make_table):
    table = make_table({"x": [np.nan, 2, 3], "y": [1, 2, 3]}, "y")
    assert drop_missing_target(table) is table


def test_drop_missing_target_all_missing(make_table):
    table = make_table({"x": [1, 2], "y": [np.nan, np.nan]}, "y")
    with pytest.raises(AllRowsDropped):
        drop_missing_target(table)


@pytest.mark.parametrize(
    "column,expected",
    [
        ([1, 2, np.nan, 4], [1, 2, 2, 4]),
        ([3, np.nan, np.nan, 9], [3, 6, 6, 9]),
        ([1, 2, 3, 4], [1, 2, 3, 4]),
    ],
)
def test_imputer_fills_with_training_median(make_table, column, expected):
    table = make_table({"x": column, "y": [0, 0, 0, 0]}, "y")
    filled = apply_imputer(fit_imputer(table), table)
    assert filled.column("x").tolist() == expected


def test_imputer_leaves_observed_cells_bit_identical(make_table):
    rng = np.random.default_rng(3)
    x = rng.normal(size=50)
    x[::7] = np.nan
    table = make_table({"x": x, "y": rng.normal(size=50)}, "y")
    filled = apply_imputer(fit_imputer(table), table)
    observed = ~np.isnan(x)
    assert np.array_equal(filled.column("x")[observed], x[observed])
    assert np.array_equal(filled.target, table.target)


def test_imputer_uses_train_medians_on_test(make_table):
    train = make_table({"x": [1, 2, 3], "y": [0, 0, 0]}, "y")
    test = make_table({"x": [np.nan, 100], "y": [0, 0]}, "y")
    imputer = fit_imputer(train)
    assert apply_imputer(imputer, test).column("x").tolist() == [2, 100]
    assert imputer.medians.tolist() == [2.0]


def test_imputer_all_missing_column(make_table):
    table = make_table({"x": [np.nan, np.nan], "y": [1, 2]}, "y")
    with pytest.raises(AllMissingColumn):
        fit_imputer(table)


def _rows(n: int) -> Table:
    return Table(("x", "y"), np.column_stack([np.arange(n), np.arange(n)]), "y")


@pytest.mark.parametrize(
    "n,ratio,n_train,n_test",
    [(10, 0.8, 8, 2), (12657, 0.8, 10126, 2531), (2, 0.99, 1, 1), (3, 0.01, 1, 2)],
)
def test_split_sizes(n, ratio, n_train, n_test):
    split = train_test_split(_rows(n), ratio, seed=0)
    assert (split.train.n_rows, split.test.n_rows) == (n_train, n_test)


def test_split_is_deterministic():
    a = train_test_split(_rows(50), 0.8, seed=5)
    b = train_test_split(_rows(50), 0.8, seed=5)
    assert np.array_equal(a.test_index, b.test_index)


@settings(max_examples=500, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=300),
    ratio=st.floats(min_value=0.01, max_value=0.99),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_split_is_a_partition(n, ratio, seed):
    split = train_test_split(_rows(n), ratio, seed)
    both = np.concatenate([split.train_index, split.test_index])
    assert sorted(both.tolist()) == list(range(n))
    assert split.train.n_rows >= 1 and split.test.n_rows >= 1
    assert np.array_equal(split.test.column("x"), split.test_index)


def test_split_rejects_bad_input():
    with pytest.raises(TooFewRows):
        train_test_split(_rows(1), 0.8, 0)
    with pytest.raises(InvalidParameter):
        train_test_split(_rows(10), 1.0, 0)


def test_standardizer_population_std(make_table):
    table = make_table({"x": [1, 2, 3], "y": [5, 5, 5]}, "y")
    scaler = fit_standardizer(table)
    out = apply_standardizer(scaler, table)
    assert scaler.stds[0] == pytest.approx(math.sqrt(2 / 3))
    assert out.column("x") == pytest.approx([-1.2247, 0.0, 1.2247], abs=1e-4)
    assert out.target.tolist() == [0.0, 0.0, 0.0]


def test_standardizer_is_idempotent_on_standardized_data(make_table):
    rng = np.random.default_rng(1)
    table = make_table({"x": rng.normal(3, 2, 200), "y": rng.normal(-1, 5, 200)}, "y")
    once = apply_standardizer(fit_standardizer(table), table)
    again = fit_standardizer(once)
    assert again.means == pytest.approx([0, 0], abs=1e-12)
    assert again.stds == pytest.approx([1, 1])
    assert apply_standardizer(again, once).values == pytest.approx(once.values)


def test_standardizer_round_trip(make_table):
    rng = np.random.default_rng(2)
    table = make_table({"x": rng.normal(10, 3, 100), "y": rng.gamma(2, 4, 100)}, "y")
    scaler = fit_standardizer(table)
    back = inverse_standardize(scaler, apply_standardizer(scaler, table))
    assert np.max(np.abs(back.values - table.values)) <= 1e-9


def test_standardizer_apply_does_not_touch_fitted_parameters(make_table):
    train = make_table({"x": [1, 2, 3], "y": [1, 2, 4]}, "y")
    test = make_table({"x": [100, 200], "y": [9, 9]}, "y")
    scaler = fit_standardizer(train)
    means, stds = scaler.means.copy(), scaler.stds.copy()
    apply_standardizer(scaler, test)
    assert np.array_equal(scaler.means, means) and np.array_equal(scaler.stds, stds)


def test_polynomial_expand_degree_two(make_table):
    table = make_table({"a": [2.0], "b": [3.0], "y": [7.0]}, "y")
    out = polynomial_expand(table, 2)
    assert out.column_names == ("a", "b", "a^2", "a*b", "b^2", "y")
    assert out.features[0].tolist() == [2, 3, 4, 6, 9]
    assert out.target.tolist() == [7.0]


def test_polynomial_expand_degree_one_is_identity(make_table):
    table = make_table({"a": [1.0, 2.0], "b": [3.0, 4.0], "y": [0.0, 1.0]}, "y")
    out = polynomial_expand(table, 1)
    assert out.column_names == table.column_names
    assert np.array_equal(out.values, table.values)


def test_polynomial_expand_degree_three_names(make_table):
    table = make_table({"a": [2.0], "b": [3.0], "y": [0.0]}, "y")
    out = polynomial_expand(table, 3)
    assert out.feature_names[-4:] == ("a^3", "a^2*b", "a*b^2", "b^3")
    assert out.features[0, -3] == 12.0


@pytest.mark.parametrize("n_features", [1, 2, 3, 5, 8])
def test_polynomial_expand_degree_two_count(make_table, n_features):
    columns = {f"f{i}": [float(i + 1)] for i in range(n_features)}
    table = make_table({**columns, "y": [0.0]}, "y")
    out = polynomial_expand(table, 2)
    assert len(out.feature_names) == n_features + n_features * (n_features + 1) // 2
    assert expanded_column_count(n_features, 2) == len(out.feature_names)


def test_polynomial_expand_cap(make_table):
    columns = {f"f{i}": [1.0] for i in range(20)}
    table = make_table({**columns, "y": [0.0]}, "y")
    with pytest.raises(DegreeTooLarge):
        polynomial_expand(table, 3)


def test_polynomial_expand_keeps_provenance():
    table = Table(("a", "y"), [[1.0, 2.0], [3.0, 4.0]], "y", synthetic=[False, True])
    assert polynomial_expand(table, 2).synthetic.tolist() == [False, True]
