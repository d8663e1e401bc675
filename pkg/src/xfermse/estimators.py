"""Transferability scores, bound calculators and empirical inequality checks.

All three scores are the negative minimum of the same ridge objective and
differ only in what is used as regression input:

* ``lin_mse``        -- features extracted by the frozen source network,
* ``lab_mse``        -- dummy labels, i.e. source-model predictions on the
                        target inputs,
* ``shared_lab_mse`` -- true source labels, when source and target share
                        their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .numkit import DimensionError, as_matrix
from .ridge import RidgeSolution, ridge_fit

__all__ = [
    "Method",
    "TransferScore",
    "ComplexitySpec",
    "lin_mse",
    "lab_mse",
    "shared_lab_mse",
    "score",
    "complexity_term",
    "theorem1_lower_bound",
    "theorem2_lower_bound",
    "Lemma1Result",
    "Lemma2Result",
    "lemma1_check",
    "lemma2_check",
    "GapResult",
    "generalization_gap",
]

LEMMA_TOL = 1e-10


class Method(str, Enum):
    LinMSE = "LinMSE"
    LabMSE = "LabMSE"
    SharedLabMSE = "SharedLabMSE"


@dataclass(frozen=True)
class TransferScore:
    method: Method
    lam: float
    value: float
    n: int
    input_dim: int
    output_dim: int
    mse_term: float
    penalty_term: float

    @classmethod
    def from_solution(cls, method: Method, sol: RidgeSolution) -> "TransferScore":
        return cls(
            method=Method(method),
            lam=sol.lam,
            value=-(sol.mse_term + sol.penalty_term),
            n=sol.n,
            input_dim=sol.input_dim,
            output_dim=sol.output_dim,
            mse_term=sol.mse_term,
            penalty_term=sol.penalty_term,
        )


def lin_mse(features, targets, lam: float = 1.0) -> TransferScore:
    """Linear MSE: negative ridge objective of targets regressed on features."""
    return TransferScore.from_solution(Method.LinMSE, ridge_fit(features, targets, lam))


def lab_mse(dummy_labels, targets, lam: float = 1.0) -> TransferScore:
    """Label MSE: negative ridge objective of targets regressed on dummy labels."""
    return TransferScore.from_solution(Method.LabMSE, ridge_fit(dummy_labels, targets, lam))


def shared_lab_mse(source_labels, target_labels, lam: float = 1.0) -> TransferScore:
    """Shared-inputs Label MSE: regress target labels on true source labels."""
    return TransferScore.from_solution(
        Method.SharedLabMSE, ridge_fit(source_labels, target_labels, lam)
    )


_DISPATCH = {
    Method.LinMSE: lin_mse,
    Method.LabMSE: lab_mse,
    Method.SharedLabMSE: shared_lab_mse,
}


def score(method, inputs, targets, lam: float = 1.0) -> TransferScore:
    return _DISPATCH[Method(method)](inputs, targets, lam)


@dataclass(frozen=True)
class ComplexitySpec:
    """Architecture and sample-size parameters of the generalization bounds.

    ``d``, ``d_t`` are input and target dimensions, ``M`` and ``H`` bound the
    parameters and hidden nodes per layer, ``L`` is the layer count, ``delta``
    the confidence parameter and ``n`` the target sample count. ``delta``
    may be anything in (0, 4); only ``delta <= 1`` is a probability
    statement.
    """

    d: int
    d_t: int
    M: float
    H: float
    L: int
    delta: float
    n: int

    def __post_init__(self):
        for name in ("d", "d_t", "H", "L", "n"):
            if not getattr(self, name) >= 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.M >= 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not 0 < self.delta < 4:
            raise ValueError(f"delta must lie in (0, 4), got {self.delta}")


def complexity_term(spec: ComplexitySpec) -> float:
    """Complexity constant ``C(d, d_t, M, H, L, delta)`` of the bounds."""
    d, dt, L = spec.d, spec.d_t, spec.L
    arch = 16.0 * spec.M ** (2 * L + 2) * spec.H ** (2 * L)
    width = dt * dt * d * math.sqrt(L + 1 + math.log(d))
    conf = dt * d * d * math.sqrt(2.0 * math.log(4.0 / spec.delta))
    return arch * (width + conf)


def theorem1_lower_bound(score: TransferScore, spec: ComplexitySpec) -> float:
    """Lower bound on transferability from a Label MSE score."""
    if Method(score.method) is not Method.LabMSE:
        raise ValueError(f"expected a LabMSE score, got {score.method}")
    if spec.n != score.n:
        raise ValueError(f"spec.n={spec.n} does not match score.n={score.n}")
    return score.value - complexity_term(spec) / math.sqrt(spec.n)


def theorem2_lower_bound(
    score: TransferScore, a_norm_sq: float, source_loss: float, spec: ComplexitySpec
) -> float:
    """Lower bound on transferability from a shared-inputs Label MSE score.

    ``a_norm_sq`` is the squared Frobenius norm of the fitted label map and
    ``source_loss`` the training MSE of the source model.
    """
    if Method(score.method) is not Method.SharedLabMSE:
        raise ValueError(f"expected a SharedLabMSE score, got {score.method}")
    if a_norm_sq < 0 or source_loss < 0:
        raise ValueError("a_norm_sq and source_loss must be nonnegative")
    if spec.n != score.n:
        raise ValueError(f"spec.n={spec.n} does not match score.n={score.n}")
    return (
        2.0 * score.value
        - 2.0 * a_norm_sq * source_loss
        - complexity_term(spec) / math.sqrt(spec.n)
    )


@dataclass(frozen=True)
class Lemma1Result:
    lab_score: float
    neg_target_loss: float
    gap: float
    holds: bool


@dataclass(frozen=True)
class Lemma2Result:
    shared_score: float
    rhs: float
    a_norm_sq: float
    source_loss: float
    holds: bool


def _same_rows(*mats):
    rows = {m.shape[0] for m in mats}
    if len(rows) != 1:
        raise DimensionError(f"row counts differ: {[m.shape[0] for m in mats]}")


def lemma1_check(features, dummy_labels, targets, lam: float) -> Lemma1Result:
    """Check that the Label MSE never exceeds the retrained head's negative loss.

    The retrained head is the unregularized linear head on ``features``.
    ``dummy_labels`` must be an affine function of ``features`` for the
    inequality to be guaranteed.
    """
    F = as_matrix(features, "features")
    Z = as_matrix(dummy_labels, "dummy_labels")
    Y = as_matrix(targets, "targets")
    _same_rows(F, Z, Y)
    lab = lab_mse(Z, Y, lam).value
    neg_loss = -ridge_fit(F, Y, 0.0).mse_term
    gap = neg_loss - lab
    return Lemma1Result(lab_score=lab, neg_target_loss=neg_loss, gap=gap, holds=gap >= -LEMMA_TOL)


def lemma2_check(
    source_labels, target_labels, features, lam: float, source_loss: float | None = None
) -> Lemma2Result:
    """Check the shared-inputs inequality

        shared_score <= -L_target / 2 + ||A*||_F^2 * L_source

    where ``L_target`` is the training MSE of the unregularized linear head
    on ``features`` and ``A*`` the ridge map from source to target labels.
    When ``source_loss`` is omitted it is taken from an unregularized linear
    fit of the source labels on ``features``.
    """
    Ys = as_matrix(source_labels, "source_labels")
    Yt = as_matrix(target_labels, "target_labels")
    F = as_matrix(features, "features")
    _same_rows(Ys, Yt, F)
    if source_loss is None:
        source_loss = ridge_fit(F, Ys, 0.0).mse_term
    if source_loss < 0:
        raise ValueError("source_loss must be nonnegative")

    sol = ridge_fit(Ys, Yt, lam)
    shared = TransferScore.from_solution(Method.SharedLabMSE, sol).value
    a_norm_sq = float(np.sum(sol.A * sol.A))
    target_loss = ridge_fit(F, Yt, 0.0).mse_term
    rhs = -target_loss / 2.0 + a_norm_sq * source_loss
    return Lemma2Result(
        shared_score=shared,
        rhs=rhs,
        a_norm_sq=a_norm_sq,
        source_loss=float(source_loss),
        holds=shared <= rhs + LEMMA_TOL,
    )


@dataclass(frozen=True)
class GapResult:
    gap: float
    ratio: float | None

    @property
    def ratio_defined(self) -> bool:
        return self.ratio is not None


def generalization_gap(score: TransferScore | float, actual_neg_mse: float) -> GapResult:
    """Gap between the actual negative test MSE and a transferability score.

    ``ratio = |score| / gap`` is only defined for a positive gap.
    """
    value = score.value if isinstance(score, TransferScore) else float(score)
    gap = float(actual_neg_mse) - value
    ratio = abs(value) / gap if gap > 0 else None
    return GapResult(gap=gap, ratio=ratio)
