"""Small dense linear algebra helpers.

Matrices are plain 2-D ``float64`` numpy arrays in C (row-major) order.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "DimensionError",
    "as_matrix",
    "gram",
    "solve_spd",
    "column_means",
]

SYMMETRY_RTOL = 1e-10
EIG_CUTOFF = 1e-12


class DimensionError(ValueError):
    """Raised when array shapes are incompatible."""


def as_matrix(data, name: str = "matrix", check_finite: bool = True) -> np.ndarray:
    """Coerce ``data`` to a 2-D row-major float64 array.

    1-D input is read as a single column. Non-finite entries are rejected
    when ``check_finite`` is set.
    """
    M = np.asarray(data, dtype=np.float64)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if check_finite and not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return np.ascontiguousarray(M)


def gram(M) -> np.ndarray:
    """Return ``M.T @ M`` as an exactly symmetric matrix."""
    M = as_matrix(M, "M", check_finite=False)
    if M.size == 0:
        raise DimensionError("gram of an empty matrix")
    G = M.T @ M
    # mirror the upper triangle so symmetry is exact, not just up to rounding
    upper = np.triu(G)
    return upper + np.triu(G, 1).T


def solve_spd(S, B) -> np.ndarray:
    """Solve ``S @ X = B`` for symmetric positive (semi)definite ``S``.

    Cholesky is tried first. If ``S`` is not numerically positive definite
    the system is solved through an eigendecomposition, discarding
    eigenvalues below ``1e-12 * max eigenvalue``; this gives the
    minimum-norm least-squares solution for singular ``S``.

    Parameters
    ----------
    S : array_like, shape (p, p)
    B : array_like, shape (p, q) or (p,)

    Returns
    -------
    X : ndarray, shape (p, q)
    """
    S = as_matrix(S, "S", check_finite=False)
    B = as_matrix(B, "B", check_finite=False)
    p = S.shape[0]
    if S.shape[1] != p:
        raise DimensionError(f"S must be square, got {S.shape}")
    if B.shape[0] != p:
        raise DimensionError(f"S is {S.shape} but B has {B.shape[0]} rows")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T), initial=0.0) > SYMMETRY_RTOL * max(scale, 1.0):
        raise ValueError("S is not symmetric")
    if p == 0:
        return np.zeros((0, B.shape[1]))

    try:
        factor = scipy.linalg.cho_factor(S, lower=True, check_finite=False)
        pivots = np.diag(factor[0]) ** 2
        # a factorization that "succeeds" on a numerically singular matrix
        # returns huge, non-minimum-norm solutions
        if pivots.min() > EIG_CUTOFF * pivots.max():
            X = scipy.linalg.cho_solve(factor, B, check_finite=False)
            if np.all(np.isfinite(X)):
                return X

    except np.linalg.LinAlgError:
        pass
    return _solve_eigh(S, B)


def _solve_eigh(S: np.ndarray, B: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(S)
    wmax = w.max()
    if wmax <= 0.0:
        return np.zeros_like(B)
    keep = w > EIG_CUTOFF * wmax
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / w[keep]
    return V @ (inv[:, None] * (V.T @ B))


def column_means(M) -> np.ndarray:
    M = as_matrix(M, "M", check_finite=False)
    if M.shape[0] == 0:
        raise DimensionError("column_means of a matrix with zero rows")
    return M.mean(axis=0)
