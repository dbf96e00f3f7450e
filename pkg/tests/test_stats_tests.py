import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import gammaln

from copaug.errors import EmptySample, LengthMismatch
from copaug.evaluation.stats_tests import (
    ks_pvalue,
    ks_statistic,
    ks_two_sample,
    paired_ttest,
    percent_error_stats,
    t_cdf,
)


def brute_force_d(a: list[float], b: list[float]) -> float:
    best = 0.0
    for t in a + b:
        fa = sum(x <= t for x in a) / len(a)
        fb = sum(x <= t for x in b) / len(b)
        best = max(best, abs(fa - fb))
    return best


def t_density(x: float, df: float) -> float:
    log_norm = gammaln((df + 1) / 2) - gammaln(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(log_norm - (df + 1) / 2 * math.log1p(x * x / df))


def quadrature_t_cdf(t: float, df: float) -> float:
    area, _ = integrate.quad(t_density, 0.0, abs(t), args=(df,), epsabs=1e-13, epsrel=1e-13)
    return 0.5 + math.copysign(area, t)


def test_ks_identical_samples():
    out = ks_two_sample([1, 2, 3], [1, 2, 3])
    assert out.d_statistic == 0.0
    assert out.p_value == 1.0


def test_ks_disjoint_samples():
    out = ks_two_sample([1, 2], [3, 4])
    assert out.d_statistic == 1.0
    assert out.p_value < 0.5


def test_ks_matches_brute_force_example():
    a, b = [1.0, 2.0, 3.0, 4.0], [1.5, 2.5, 3.5]
    assert ks_statistic(np.array(a), np.array(b)) == brute_force_d(a, b)


@settings(max_examples=1000, deadline=None)
@given(
    a=st.lists(st.integers(-20, 20), min_size=1, max_size=40),
    b=st.lists(st.integers(-20, 20), min_size=1, max_size=40),
)
def test_ks_statistic_matches_brute_force_with_ties(a, b):
    a, b = [float(v) for v in a], [float(v) for v in b]
    d = ks_statistic(np.array(a), np.array(b))
    assert d == brute_force_d(a, b)
    assert d == ks_statistic(np.array(b), np.array(a))
    assert 0.0 <= d <= 1.0


@pytest.mark.parametrize("d", [0.0, 0.01, 0.05, 0.2, 1.0])
def test_ks_pvalue_in_unit_interval(d):
    assert 0.0 <= ks_pvalue(d, 200, 300) <= 1.0


def test_ks_pvalue_decreases_with_d():
    ps = [ks_pvalue(d, 100, 100) for d in (0.05, 0.1, 0.2, 0.3)]
    assert ps == sorted(ps, reverse=True)


def test_ks_empty_sample():
    with pytest.raises(EmptySample):
        ks_two_sample([], [1.0])


def test_paired_ttest_equal_samples():
    a = np.array([0.3, 0.5, 0.9])
    out = paired_ttest(a, a.copy())
    assert out.t_statistic == 0.0
    assert out.p_value == 1.0
    assert out.zero_variance


def test_paired_ttest_constant_nonzero_difference():
    out = paired_ttest(np.ones(4), np.zeros(4))
    assert out.p_value == 0.0
    assert out.t_statistic == math.inf
    assert out.p_one_sided == 0.0


def test_paired_ttest_worked_example():
    d = np.array([1.2, 0.8, 1.1, 0.9, 1.0])
    out = paired_ttest(d, np.zeros(5))
    assert out.df == 4
    assert out.mean_diff == pytest.approx(1.0)
    assert out.t_statistic == pytest.approx(1.0 / (math.sqrt(0.025) / math.sqrt(5)))
    assert out.t_statistic == pytest.approx(14.14, abs=0.01)
    assert out.p_value == pytest.approx(1.45e-4, rel=0.01)
    oracle = 2.0 * (1.0 - quadrature_t_cdf(out.t_statistic, 4))
    assert out.p_value == pytest.approx(oracle, rel=1e-6)
    assert out.p_one_sided == pytest.approx(out.p_value / 2)


def test_paired_ttest_is_antisymmetric():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=10), rng.normal(size=10)
    ab, ba = paired_ttest(a, b), paired_ttest(b, a)
    assert ab.t_statistic == pytest.approx(-ba.t_statistic)
    assert ab.p_value == pytest.approx(ba.p_value)
    assert ab.p_one_sided + ba.p_one_sided == pytest.approx(1.0)


def test_paired_ttest_errors():
    with pytest.raises(LengthMismatch):
        paired_ttest([1.0, 2.0], [1.0])
    with pytest.raises(EmptySample):
        paired_ttest([1.0], [2.0])


@pytest.mark.parametrize("df", [1, 4, 9, 30])
@pytest.mark.parametrize("t", [-6.0, -1.3, 0.0, 0.4, 2.1, 14.0])
def test_t_cdf_matches_density_integral(df, t):
    assert t_cdf(t, df) == pytest.approx(quadrature_t_cdf(t, df), abs=1e-8)


@pytest.mark.parametrize(
    "pe,expected",
    [
        ([10, 10, 10], (10.0, 10.0, 0.0)),
        ([0, 20], (10.0, 10.0, math.sqrt(200))),
        ([7], (7.0, 7.0, 0.0)),
    ],
)
def test_percent_error_stats(pe, expected):
    assert tuple(percent_error_stats(np.array(pe, dtype=float))) == pytest.approx(expected)
