import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from oracles import kendall_pairs, naive_ranks, pearson_plain
from xfermse.evalmetrics import (
    DegenerateError,
    average_ranks,
    kendall_tau,
    linear_fit_rmse,
    pearson,
    spearman,
    top_k_matching_rate,
)

# sources x targets; target 0: estimator picks source 1 (actually 2nd best),
# target 1: estimator picks source 2 (actually best)
EST_3x2 = np.array([[0.1, 0.0], [0.9, 0.1], [0.2, 0.8]])
ACT_3x2 = np.array([[-1.0, -3.0], [-2.0, -2.0], [-3.0, -1.0]])


def test_pearson_fixtures():
    assert pearson([1, 2, 3], [2, 4, 6]).value == pytest.approx(1.0, abs=1e-12)
    assert pearson([1, 2, 3], [6, 4, 2]).value == pytest.approx(-1.0, abs=1e-12)
    assert pearson([1, 2, 3], [1, 3, 2]).value == pytest.approx(0.5, abs=1e-12)
    assert pearson_plain([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-12)


def test_pearson_pvalue_against_scipy():
    rng = np.random.default_rng(0)
    for n in (3, 5, 30, 500):
        x = rng.standard_normal(n)
        y = 0.3 * x + rng.standard_normal(n)
        rep = pearson(x, y)
        r_ref, p_ref = stats.pearsonr(x, y)
        assert rep.value == pytest.approx(r_ref, abs=1e-12)
        assert rep.p_value == pytest.approx(p_ref, abs=1e-8)


def test_pearson_errors():
    with pytest.raises(DegenerateError):
        pearson([1, 1, 1], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        pearson([1], [1])


def test_spearman_fixtures():
    assert spearman([1, 2, 3], [1, 3, 2]).value == pytest.approx(0.5, abs=1e-12)
    x = np.linspace(-2, 3, 20)
    assert spearman(x, np.exp(x)).value == pytest.approx(1.0, abs=1e-12)
    assert spearman(x, np.exp(x)).p_value is None


def test_spearman_ties_against_naive():
    x = [3.0, 1.0, 3.0, 2.0, 5.0, 1.0, 4.0]
    y = [0.1, 0.5, 0.2, 0.2, 0.9, 0.3, 0.3]
    np.testing.assert_array_equal(average_ranks(x), naive_ranks(x))
    ref = pearson_plain(naive_ranks(x), naive_ranks(y))
    assert spearman(x, y).value == pytest.approx(ref, abs=1e-12)


def test_kendall_fixtures():
    assert kendall_tau([1, 2, 3], [1, 3, 2]).value == pytest.approx(1 / 3, abs=1e-12)
    assert kendall_pairs([1, 2, 3], [1, 3, 2]) == pytest.approx(1 / 3, abs=1e-12)
    x = np.arange(10.0)
    assert kendall_tau(x, x).value == 1.0
    with pytest.raises(DegenerateError):
        kendall_tau([2, 2, 2], [1, 2, 3])


def test_kendall_with_ties_matches_pairs():
    rng = np.random.default_rng(7)
    x = rng.integers(0, 15, 200).astype(float)
    y = rng.integers(0, 15, 200).astype(float) + 0.5 * x
    assert kendall_tau(x, y).value == pytest.approx(kendall_pairs(x, y), abs=1e-12)
    assert kendall_tau(x, y).value == pytest.approx(stats.kendalltau(x, y).statistic, abs=1e-12)


vectors = st.integers(2, 60).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(-5, 5), min_size=n, max_size=n),
        st.lists(st.integers(-5, 5), min_size=n, max_size=n),
    )
)


def _nonconstant(v):
    return len(set(v)) > 1


@settings(max_examples=150, deadline=None)
@given(vectors)
def test_kendall_fast_path_equals_pair_oracle(xy):
    x, y = xy
    if not (_nonconstant(x) and _nonconstant(y)):
        return
    assert kendall_tau(x, y).value == pytest.approx(kendall_pairs(x, y), abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(vectors)
def test_symmetry(xy):
    x, y = xy
    if not (_nonconstant(x) and _nonconstant(y)):
        return
    for fn in (pearson, spearman, kendall_tau):
        assert fn(x, y).value == pytest.approx(fn(y, x).value, abs=1e-12)
        assert abs(fn(x, y).value) <= 1 + 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.1, 10), st.floats(-10, 10))
def test_invariances(seed, a, c):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(25), rng.standard_normal(25)
    r = pearson(x, y).value
    assert pearson(a * x + c, y).value == pytest.approx(r, abs=1e-12)
    assert pearson(-x, y).value == pytest.approx(-r, abs=1e-12)
    for fn in (spearman, kendall_tau):
        base = fn(x, y).value
        assert fn(np.exp(x), y).value == pytest.approx(base, abs=1e-12)
        assert fn(x, y**3 + c).value == pytest.approx(base, abs=1e-12)


class TestTopK:
    def test_identity(self):
        rng = np.random.default_rng(0)
        A = rng.standard_normal((5, 4))
        for k in range(1, 6):
            assert top_k_matching_rate(A, A, k).rate == 1.0

    def test_constructed_fixture(self):
        r1 = top_k_matching_rate(EST_3x2, ACT_3x2, 1)
        r2 = top_k_matching_rate(EST_3x2, ACT_3x2, 2)
        assert (r1.rate, r1.m_match, r1.m_target) == (0.5, 1, 2)
        assert (r2.rate, r2.m_match) == (1.0, 2)
        assert r1.selected == [1, 2] and r1.best == [0, 2]

    def test_reversed(self):
        rng = np.random.default_rng(1)
        A = rng.standard_normal((4, 6))
        assert top_k_matching_rate(-A, A, 1).rate == 0.0

    def test_tie_break_lowest_index(self):
        r = top_k_matching_rate([[1.0], [1.0], [0.0]], [[0.0], [1.0], [2.0]], 1)
        assert r.selected == [0] and r.tied_selection == [True]

    def test_errors(self):
        with pytest.raises(ValueError):
            top_k_matching_rate(EST_3x2, ACT_3x2[:2], 1)
        with pytest.raises(ValueError):
            top_k_matching_rate(EST_3x2, ACT_3x2, 4)
        with pytest.raises(ValueError):
            top_k_matching_rate(EST_3x2, ACT_3x2, 0)

    def test_monotone_in_k(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            S, T = rng.standard_normal((6, 5)), rng.standard_normal((6, 5))
            rates = [top_k_matching_rate(S, T, k).rate for k in range(1, 7)]
            assert rates == sorted(rates) and rates[-1] == 1.0


def test_linear_fit_rmse():
    x = np.array([0.0, 1.0, 2.0, 5.0])
    assert linear_fit_rmse(x, 3 * x - 1) == pytest.approx(0.0, abs=1e-12)
    # best line through (0,0),(1,1),(2,0) is y = 1/3
    assert linear_fit_rmse([0, 1, 2], [0, 1, 0]) == pytest.approx(math.sqrt(2 / 9), abs=1e-12)
    rng = np.random.default_rng(3)
    s, a = rng.standard_normal(20), rng.standard_normal(20)
    assert linear_fit_rmse(s, a + 7.5) == pytest.approx(linear_fit_rmse(s, a), abs=1e-12)
    with pytest.raises(DegenerateError):
        linear_fit_rmse([1, 1, 1], [0, 1, 2])
