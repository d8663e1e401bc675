import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import gauss_jordan_inverse, gram_loops, naive_means
from xfermse.numkit import DimensionError, as_matrix, column_means, gram, solve_spd


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def test_gram_fixtures():
    np.testing.assert_array_equal(gram([[1.0], [2.0]]), [[5.0]])
    np.testing.assert_array_equal(gram(np.eye(3)), np.eye(3))


def test_gram_matches_triple_loop(rng):
    M = rng.standard_normal((5, 3))
    np.testing.assert_allclose(gram(M), gram_loops(M), rtol=0, atol=1e-12)


def test_gram_exactly_symmetric(rng):
    G = gram(rng.standard_normal((40, 7)))
    assert np.array_equal(G, G.T)


def test_gram_empty():
    with pytest.raises(DimensionError):
        gram(np.zeros((0, 3)))


def test_solve_spd_fixtures():
    np.testing.assert_array_equal(solve_spd(np.eye(2), [[3.0], [4.0]]), [[3.0], [4.0]])
    np.testing.assert_allclose(solve_spd([[4.0, 0.0], [0.0, 9.0]], [[8.0], [18.0]]), [[2.0], [2.0]])


def test_solve_spd_against_gauss_jordan(rng):
    M = rng.standard_normal((10, 6))
    S = gram(M) + 0.5 * np.eye(6)
    B = rng.standard_normal((6, 2))
    X = solve_spd(S, B)
    X_ref = gauss_jordan_inverse(S) @ B
    np.testing.assert_allclose(X, X_ref, atol=1e-8)
    assert np.max(np.abs(S @ X - B)) <= 1e-8 * (1 + np.max(np.abs(B)))


def test_solve_spd_singular_gives_min_norm(rng):
    # rank-2 Gram in 4 dimensions, right-hand side in its range
    M = rng.standard_normal((2, 4))
    S = gram(M)
    B = S @ rng.standard_normal((4, 1))
    X = solve_spd(S, B)
    np.testing.assert_allclose(X, np.linalg.pinv(S) @ B, atol=1e-8)
    assert np.max(np.abs(S @ X - B)) <= 1e-8 * (1 + np.max(np.abs(B)))


def test_solve_spd_errors():
    with pytest.raises(DimensionError):
        solve_spd(np.eye(3), np.ones((2, 1)))
    with pytest.raises(DimensionError):
        solve_spd(np.ones((2, 3)), np.ones((2, 1)))
    with pytest.raises(ValueError, match="symmetric"):
        solve_spd([[1.0, 2.0], [0.0, 1.0]], [[1.0], [1.0]])


def test_column_means(rng):
    np.testing.assert_array_equal(column_means([[1, 2], [3, 4]]), [2.0, 3.0])
    np.testing.assert_array_equal(column_means([[5.0, -1.0, 2.5]]), [5.0, -1.0, 2.5])
    M = rng.standard_normal((7, 2))
    np.testing.assert_allclose(column_means(M), naive_means(M), rtol=0, atol=1e-14)
    with pytest.raises(DimensionError):
        column_means(np.zeros((0, 2)))


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])
    assert as_matrix([1.0, 2.0]).shape == (2, 1)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 6)), elements=finite),
       st.integers(0, 2**32 - 1))
def test_gram_psd(M, seed):
    G = gram(M)
    v = np.random.default_rng(seed).standard_normal(G.shape[0])
    assert v @ G @ v >= -1e-12 * (v @ v) * max(1.0, np.abs(G).max())


moderate = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 6)), elements=moderate),
       st.floats(1e-3, 10.0),
       st.integers(0, 2**32 - 1))
def test_ridge_system_round_trip(M, lam, seed):
    S = gram(M) + lam * np.eye(M.shape[1])
    B = np.random.default_rng(seed).standard_normal((M.shape[1], 2))
    X = solve_spd(S, B)
    assert np.max(np.abs(S @ X - B)) <= 1e-8 * (1 + np.max(np.abs(B)))
