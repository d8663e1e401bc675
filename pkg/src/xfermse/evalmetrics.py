"""Correlation statistics and source-selection metrics used for evaluation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

__all__ = [
    "DegenerateError",
    "CorrelationReport",
    "pearson",
    "spearman",
    "kendall_tau",
    "correlate",
    "average_ranks",
    "TopKResult",
    "top_k_matching_rate",
    "linear_fit_rmse",
    "METRICS",
]

METRICS = ("pearson", "spearman", "kendall")


class DegenerateError(ValueError):
    """Raised when an input has no variation (a correlation is undefined)."""


@dataclass(frozen=True)
class CorrelationReport:
    metric: str
    value: float
    n_pairs: int
    p_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "value": self.value,
            "n_pairs": self.n_pairs,
            "p_value": self.p_value,
        }


def _pair(x, y, min_len: int = 2):
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < min_len:
        raise ValueError(f"need at least {min_len} pairs, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("inputs contain NaN or Inf")
    return x, y


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateError("correlation undefined for a constant vector")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def _pearson_pvalue(r: float, n: int) -> float:
    # two-sided t test: P(|T| > t) with df = n - 2 equals I_{df/(df+t^2)}(df/2, 1/2)
    df = n - 2
    if df <= 0:
        return 1.0
    if abs(r) >= 1.0:
        return 0.0
    t2 = r * r * df / (1.0 - r * r)
    return float(special.betainc(0.5 * df, 0.5, df / (df + t2)))


def pearson(x, y) -> CorrelationReport:
    x, y = _pair(x, y)
    r = _pearson_r(x, y)
    return CorrelationReport("pearson", r, x.size, _pearson_pvalue(r, x.size))


def average_ranks(x) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(x.size)
    start = 0
    n = x.size
    while start < n:
        stop = start + 1
        while stop < n and xs[stop] == xs[start]:
            stop += 1
        ranks[order[start:stop]] = 0.5 * (start + stop - 1) + 1.0
        start = stop
    return ranks


def spearman(x, y) -> CorrelationReport:
    x, y = _pair(x, y)
    r = _pearson_r(average_ranks(x), average_ranks(y))
    return CorrelationReport("spearman", r, x.size)


def _count_inversions(a: list) -> int:
    """Number of pairs i < j with a[i] > a[j]; sorts ``a`` in place."""
    n = len(a)
    buf = [0.0] * n
    swaps = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid = lo + width
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[k] = a[j]
                    swaps += mid - i
                    j += 1
                else:
                    buf[k] = a[i]
                    i += 1
                k += 1
            while i < mid:
                buf[k] = a[i]
                i += 1
                k += 1
            while j < hi:
                buf[k] = a[j]
                j += 1
                k += 1
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return swaps


def _tied_pairs(sorted_vals) -> int:
    total = 0
    run = 1
    for prev, cur in zip(sorted_vals[:-1], sorted_vals[1:]):
        if cur == prev:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    return total + run * (run - 1) // 2


def kendall_tau(x, y) -> CorrelationReport:
    """Kendall's tau-b in O(n log n) (Knight's merge-sort counting)."""
    x, y = _pair(x, y)
    n = x.size
    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]

    n0 = n * (n - 1) // 2
    n1 = _tied_pairs(xs.tolist())
    # pairs tied in both x and y
    n3 = 0
    run = 1
    for i in range(1, n):
        if xs[i] == xs[i - 1] and ys[i] == ys[i - 1]:
            run += 1
        else:
            n3 += run * (run - 1) // 2
            run = 1
    n3 += run * (run - 1) // 2

    ylist = ys.tolist()
    discordant = _count_inversions(ylist)
    n2 = _tied_pairs(ylist)

    if n0 == n1 or n0 == n2:
        raise DegenerateError("tau-b undefined: one input is entirely tied")
    numer = n0 - n1 - n2 + n3 - 2 * discordant
    tau = numer / math.sqrt(float(n0 - n1) * float(n0 - n2))
    return CorrelationReport("kendall", min(1.0, max(-1.0, tau)), n)


_FUNCS = {"pearson": pearson, "spearman": spearman, "kendall": kendall_tau}


def correlate(x, y, metric: str) -> CorrelationReport:
    try:
        fn = _FUNCS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}") from None
    return fn(x, y)


@dataclass(frozen=True)
class TopKResult:
    k: int
    rate: float
    m_match: int
    m_target: int
    selected: list = field(default_factory=list)
    best: list = field(default_factory=list)
    tied_selection: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "rate": self.rate,
            "m_match": self.m_match,
            "m_target": self.m_target,
            "selected": self.selected,
            "best": self.best,
            "tied_selection": self.tied_selection,
        }


def top_k_matching_rate(estimator_scores, actual_neg_mse, k: int) -> TopKResult:
    """Fraction of targets whose estimator-selected source is among the k best.

    Both matrices are ``sources x targets``; higher is better in each. The
    estimator's choice per target is the argmax of its column, lowest source
    index winning ties. A choice matches when fewer than ``k`` sources have a
    strictly higher actual value.
    """
    S = np.asarray(estimator_scores, dtype=np.float64)
    T = np.asarray(actual_neg_mse, dtype=np.float64)
    if S.ndim == 1:
        S = S.reshape(-1, 1)
    if T.ndim == 1:
        T = T.reshape(-1, 1)
    if S.shape != T.shape:
        raise ValueError(f"shape mismatch: {S.shape} vs {T.shape}")
    n_sources, n_targets = S.shape
    k = int(k)
    if not 1 <= k <= n_sources:
        raise ValueError(f"k must be in [1, {n_sources}], got {k}")

    selected, best, tied = [], [], []
    m_match = 0
    for t in range(n_targets):
        col = S[:, t]
        pick = int(np.argmax(col))
        selected.append(pick)
        tied.append(bool(np.sum(col == col[pick]) > 1))
        act = T[:, t]
        best.append(int(np.argmax(act)))
        if np.sum(act > act[pick]) < k:
            m_match += 1
    return TopKResult(
        k=k,
        rate=m_match / n_targets,
        m_match=m_match,
        m_target=n_targets,
        selected=selected,
        best=best,
        tied_selection=tied,
    )


def linear_fit_rmse(scores, actual_mse) -> float:
    """RMSE of the least-squares line ``actual_mse ~ slope * score + offset``."""
    x, y = _pair(scores, actual_mse)
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx == 0.0:
        raise DegenerateError("scores are constant")
    slope = float(xc @ (y - y.mean())) / sxx
    resid = (y - y.mean()) - slope * xc
    return math.sqrt(float(resid @ resid) / x.size)
