"""Multi-output ridge regression with an unpenalized intercept.

Minimizes

    (1/n) * sum_i ||y_i - A u_i - b||^2 + lam * ||A||_F^2

over ``A`` (stored ``q x p``, mapping inputs to outputs) and ``b``. The
intercept is handled by centering, so it is never shrunk, and ``lam`` is
used as given (not multiplied by ``n``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkit import DimensionError, as_matrix, column_means, gram, solve_spd

__all__ = ["RidgeSolution", "ridge_fit", "predict", "objective_at"]


@dataclass(frozen=True)
class RidgeSolution:
    """Fitted linear map ``u -> A u + b`` with its objective breakdown."""

    A: np.ndarray
    b: np.ndarray
    lam: float
    mse_term: float
    penalty_term: float
    n: int

    @property
    def input_dim(self) -> int:
        return self.A.shape[1]

    @property
    def output_dim(self) -> int:
        return self.A.shape[0]

    def objective(self) -> float:
        return self.mse_term + self.penalty_term

    def predict(self, U) -> np.ndarray:
        return predict(self, U)


def _check_lambda(lam) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise ValueError(f"lambda must be a finite nonnegative number, got {lam}")
    return lam


def ridge_fit(U, Y, lam: float) -> RidgeSolution:
    """Exact ridge fit of ``Y`` on ``U``.

    Parameters
    ----------
    U : array_like, shape (n, p)
        Regression inputs (features, dummy labels or source labels).
    Y : array_like, shape (n, q)
        Targets.
    lam : float
        Penalty weight on ``||A||_F^2``. With ``lam == 0`` and a singular
        input covariance the minimum-norm ``A`` is returned.
    """
    U = as_matrix(U, "U")
    Y = as_matrix(Y, "Y")
    lam = _check_lambda(lam)
    n = U.shape[0]
    if n < 1:
        raise DimensionError("ridge_fit needs at least one sample")
    if Y.shape[0] != n:
        raise DimensionError(f"U has {n} rows but Y has {Y.shape[0]}")

    u_bar = column_means(U)
    y_bar = column_means(Y)
    Uc = U - u_bar
    Yc = Y - y_bar

    p = U.shape[1]
    S = gram(Uc) / n
    S[np.diag_indices(p)] += lam
    C = (Uc.T @ Yc) / n
    A = solve_spd(S, C).T
    b = y_bar - A @ u_bar

    resid = Yc - Uc @ A.T
    mse = float(np.sum(resid * resid) / n)
    penalty = lam * float(np.sum(A * A))
    return RidgeSolution(A=A, b=b, lam=lam, mse_term=mse, penalty_term=penalty, n=n)


def predict(sol: RidgeSolution, U) -> np.ndarray:
    U = as_matrix(U, "U", check_finite=False)
    if U.shape[1] != sol.input_dim:
        raise DimensionError(
            f"solution expects {sol.input_dim} input columns, got {U.shape[1]}"
        )
    return U @ sol.A.T + sol.b


def objective_at(A, b, U, Y, lam: float) -> float:
    """Ridge objective evaluated at an arbitrary ``(A, b)``."""
    A = as_matrix(A, "A", check_finite=False)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    U = as_matrix(U, "U", check_finite=False)
    Y = as_matrix(Y, "Y", check_finite=False)
    n = U.shape[0]
    if Y.shape[0] != n or A.shape != (Y.shape[1], U.shape[1]) or b.shape[0] != Y.shape[1]:
        raise DimensionError(
            f"inconsistent shapes: A {A.shape}, b {b.shape}, U {U.shape}, Y {Y.shape}"
        )
    resid = Y - U @ A.T - b
    return float(np.sum(resid * resid) / n + float(lam) * np.sum(A * A))
