"""Synthetic transfer-learning benchmark.

A task family is built from one pool of "core" ReLU units
``relu(W_core x + c_core)``. A low-rank latent signal is a fixed linear
read-out of the core units, standardized to zero mean and unit variance,
and every source and target label is an affine map of that latent signal
plus Gaussian noise.

Each source owns a frozen extractor of ``feature_dim`` ReLU units. A
fraction ``alignment ** e`` of them (``e`` drawn per source from
``[0.5, 2]``) are core units; the rest are private random units. With
``alignment = 1`` every extractor contains all core units and every target
is exactly linear in the features. The source head is the unregularized
linear fit of the source labels on the extracted features of a separate
source training sample.

Randomness
----------
All draws use numpy's Philox4x64-10 counter-based generator
(``numpy.random.Philox``) with standard-normal variates from
``Generator.standard_normal``. Every component gets its own stream keyed by
``SeedSequence([seed, stream, index...])``, so a source or target does not
change when others are added, and pair-level draws do not depend on the
order in which pairs are evaluated.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import estimators as est
from .estimators import Method
from .evalmetrics import METRICS, CorrelationReport, DegenerateError, correlate
from .ridge import RidgeSolution, predict, ridge_fit

__all__ = [
    "TaskSpec",
    "SourceModel",
    "TargetTask",
    "TaskFamily",
    "HeadResult",
    "PairRecord",
    "BenchResult",
    "generate_task_family",
    "head_retrain",
    "run_benchmark",
    "small_data_sweep",
    "default_workers",
]

# stream tags for SeedSequence
_LATENT, _SOURCE, _TARGET, _SHARED, _SUBSET = 1, 2, 3, 4, 5
_CALIBRATION_SAMPLES = 8192
CONSTANT_SCORE_TOL = 1e-12


def _rng(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def default_workers() -> int:
    env = os.environ.get("XFERMSE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class TaskSpec:
    seed: int = 0
    n_train: int = 2000
    n_test: int = 1000
    input_dim: int = 16
    feature_dim: int = 64
    source_label_dim: int = 2
    target_label_dim: int = 2
    noise_std: float = 0.05
    alignment: float = 0.5

    def __post_init__(self):
        for name in ("n_train", "n_test", "input_dim", "feature_dim",
                     "source_label_dim", "target_label_dim"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.noise_std >= 0:
            raise ValueError("noise_std must be >= 0")
        if not 0 <= self.alignment <= 1:
            raise ValueError("alignment must lie in [0, 1]")
        if int(self.seed) < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class _Latent:
    W: np.ndarray        # (d_r, d)
    c: np.ndarray        # (d_r,)
    readout: np.ndarray  # (rank, d_r)
    mean: np.ndarray     # (rank,)
    scale: np.ndarray    # (rank,)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        core = np.maximum(X @ self.W.T + self.c, 0.0)
        return (core @ self.readout.T - self.mean) / self.scale


@dataclass(frozen=True)
class SourceModel:
    """Frozen extractor ``relu(W x + c)`` plus its linear source head."""

    W: np.ndarray
    c: np.ndarray
    n_core: int
    label_map: np.ndarray
    label_offset: np.ndarray
    head: RidgeSolution
    source_loss: float

    def features(self, X) -> np.ndarray:
        return np.maximum(X @ self.W.T + self.c, 0.0)

    def dummy_labels(self, X) -> np.ndarray:
        return predict(self.head, self.features(X))


@dataclass(frozen=True)
class TargetTask:
    label_map: np.ndarray
    label_offset: np.ndarray
    X_train: np.ndarray
    Y_train: np.ndarray
    X_test: np.ndarray
    Y_test: np.ndarray


@dataclass(frozen=True)
class TaskFamily:
    spec: TaskSpec
    latent: _Latent
    sources: tuple
    targets: tuple

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    def source_labels(self, source_id: int, target_id: int, X) -> np.ndarray:
        """Source-task labels on target inputs (shared-inputs setting)."""
        src = self.sources[source_id]
        rng = _rng(self.spec.seed, _SHARED, source_id, target_id)
        Y = self.latent(X) @ src.label_map.T + src.label_offset
        return Y + self.spec.noise_std * rng.standard_normal(Y.shape)


def _make_latent(spec: TaskSpec) -> _Latent:
    rng = _rng(spec.seed, _LATENT)
    d, dr = spec.input_dim, spec.feature_dim
    rank = spec.source_label_dim
    W = rng.standard_normal((dr, d)) / np.sqrt(d)
    c = 0.5 * rng.standard_normal(dr)
    readout = rng.standard_normal((rank, dr))
    Xcal = rng.standard_normal((_CALIBRATION_SAMPLES, d))
    raw = np.maximum(Xcal @ W.T + c, 0.0) @ readout.T
    return _Latent(W=W, c=c, readout=readout, mean=raw.mean(axis=0), scale=raw.std(axis=0))


def _make_source(spec: TaskSpec, latent: _Latent, idx: int) -> SourceModel:
    rng = _rng(spec.seed, _SOURCE, idx)
    d, dr, ds = spec.input_dim, spec.feature_dim, spec.source_label_dim
    rank = latent.readout.shape[0]

    exponent = rng.uniform(0.5, 2.0)
    n_core = int(round(dr * spec.alignment ** exponent))
    core_idx = np.sort(rng.permutation(dr)[:n_core])
    W = rng.standard_normal((dr, d)) / np.sqrt(d)
    c = 0.5 * rng.standard_normal(dr)
    W[:n_core] = latent.W[core_idx]
    c[:n_core] = latent.c[core_idx]
    order = rng.permutation(dr)
    W, c = np.ascontiguousarray(W[order]), c[order]

    label_map = rng.standard_normal((ds, rank)) / np.sqrt(rank)
    label_offset = rng.standard_normal(ds)
    X = rng.standard_normal((spec.n_train, d))
    Y = latent(X) @ label_map.T + label_offset
    Y = Y + spec.noise_std * rng.standard_normal(Y.shape)
    feats = np.maximum(X @ W.T + c, 0.0)
    head = ridge_fit(feats, Y, 0.0)
    return SourceModel(
        W=W, c=c, n_core=n_core, label_map=label_map, label_offset=label_offset,
        head=head, source_loss=head.mse_term,
    )


def _make_target(spec: TaskSpec, latent: _Latent, idx: int) -> TargetTask:
    rng = _rng(spec.seed, _TARGET, idx)
    d, dt = spec.input_dim, spec.target_label_dim
    rank = latent.readout.shape[0]
    label_map = rng.standard_normal((dt, rank)) / np.sqrt(rank)
    label_offset = rng.standard_normal(dt)

    def draw(n):
        X = rng.standard_normal((n, d))
        Y = latent(X) @ label_map.T + label_offset
        return X, Y + spec.noise_std * rng.standard_normal(Y.shape)

    X_train, Y_train = draw(spec.n_train)
    X_test, Y_test = draw(spec.n_test)
    return TargetTask(label_map, label_offset, X_train, Y_train, X_test, Y_test)


def generate_task_family(spec: TaskSpec, n_sources: int, n_targets: int) -> TaskFamily:
    """Build ``n_sources`` frozen source models and ``n_targets`` target tasks."""
    if n_sources < 1 or n_targets < 1:
        raise ValueError("n_sources and n_targets must be >= 1")
    latent = _make_latent(spec)
    sources = tuple(_make_source(spec, latent, i) for i in range(n_sources))
    targets = tuple(_make_target(spec, latent, j) for j in range(n_targets))
    return TaskFamily(spec=spec, latent=latent, sources=sources, targets=targets)


@dataclass(frozen=True)
class HeadResult:
    train_neg_mse: float
    test_neg_mse: float
    features_train: np.ndarray
    features_test: np.ndarray
    dummy_train: np.ndarray
    head: RidgeSolution


def _check_ids(family: TaskFamily, source_id: int, target_id: int):
    if not 0 <= source_id < family.n_sources:
        raise IndexError(f"source_id {source_id} out of range [0, {family.n_sources})")
    if not 0 <= target_id < family.n_targets:
        raise IndexError(f"target_id {target_id} out of range [0, {family.n_targets})")


def head_retrain(
    family: TaskFamily, source_id: int, target_id: int, lambda_head: float = 0.0,
    rows: np.ndarray | None = None,
) -> HeadResult:
    """Freeze the source extractor and refit a linear head on the target.

    ``rows`` optionally restricts the target training split to a subset;
    the test split is always used in full.
    """
    _check_ids(family, source_id, target_id)
    src = family.sources[source_id]
    tgt = family.targets[target_id]
    X_train, Y_train = tgt.X_train, tgt.Y_train
    if rows is not None:
        X_train, Y_train = X_train[rows], Y_train[rows]

    F_train = src.features(X_train)
    F_test = src.features(tgt.X_test)
    head = ridge_fit(F_train, Y_train, lambda_head)
    resid = tgt.Y_test - predict(head, F_test)
    test_mse = float(np.sum(resid * resid) / resid.shape[0])
    return HeadResult(
        train_neg_mse=-head.mse_term,
        test_neg_mse=-test_mse,
        features_train=F_train,
        features_test=F_test,
        dummy_train=predict(src.head, F_train),
        head=head,
    )


@dataclass
class PairRecord:
    source_id: int
    target_id: int
    scores: dict
    actual_train_neg_mse: float
    actual_test_neg_mse: float
    lemma1_holds: bool | None = None
    lemma2_holds: bool | None = None

    def to_dict(self) -> dict:
        out = {
            "source_id": self.source_id,
            "target_id": self.target_id,
            "scores": {m: {_lam_key(l): v for l, v in by_lam.items()}
                       for m, by_lam in self.scores.items()},
            "actual_train_neg_mse": self.actual_train_neg_mse,
            "actual_test_neg_mse": self.actual_test_neg_mse,
        }
        if self.lemma1_holds is not None:
            out["lemma1_holds"] = self.lemma1_holds
            out["lemma2_holds"] = self.lemma2_holds
        return out


@dataclass
class BenchResult:
    pairs: list
    correlations: dict = field(default_factory=dict)
    degenerate: list = field(default_factory=list)

    def score_vector(self, method, lam) -> np.ndarray:
        m = Method(method).value
        return np.array([p.scores[m][float(lam)] for p in self.pairs])

    def actual_vector(self) -> np.ndarray:
        return np.array([p.actual_test_neg_mse for p in self.pairs])

    def correlation(self, method, lam, metric: str = "pearson") -> CorrelationReport:
        return self.correlations[(Method(method).value, float(lam), metric)]

    def lemma_violations(self) -> list:
        return [
            (p.source_id, p.target_id)
            for p in self.pairs
            if p.lemma1_holds is False or p.lemma2_holds is False
        ]

    def to_dict(self) -> dict:
        corr = {}
        for (m, lam, metric), rep in sorted(self.correlations.items()):
            corr.setdefault(m, {}).setdefault(_lam_key(lam), {})[metric] = rep.to_dict()
        return {
            "pairs": [p.to_dict() for p in self.pairs],
            "correlations": corr,
            "degenerate": [[m, _lam_key(lam)] for m, lam in self.degenerate],
        }


def _lam_key(lam: float) -> str:
    return repr(float(lam))


def _evaluate_pair(family, s, t, lambdas, methods, rows, check_lemmas) -> PairRecord:
    tgt = family.targets[t]
    Y = tgt.Y_train if rows is None else tgt.Y_train[rows]
    res = head_retrain(family, s, t, 0.0, rows=rows)
    shared = None
    if Method.SharedLabMSE in methods or check_lemmas:
        shared = family.source_labels(s, t, tgt.X_train)
        if rows is not None:
            shared = shared[rows]

    inputs = {
        Method.LinMSE: res.features_train,
        Method.LabMSE: res.dummy_train,
        Method.SharedLabMSE: shared,
    }
    scores = {}
    for m in methods:
        scores[m.value] = {float(l): est.score(m, inputs[m], Y, l).value for l in lambdas}

    rec = PairRecord(s, t, scores, res.train_neg_mse, res.test_neg_mse)
    if check_lemmas:
        rec.lemma1_holds = all(
            est.lemma1_check(res.features_train, res.dummy_train, Y, l).holds for l in lambdas
        )
        rec.lemma2_holds = all(
            est.lemma2_check(shared, Y, res.features_train, l).holds for l in lambdas
        )
    return rec


def _is_constant(v: np.ndarray) -> bool:
    return float(np.ptp(v)) <= CONSTANT_SCORE_TOL * max(1.0, float(np.max(np.abs(v))))


def _correlations(pairs, lambdas, methods, metrics=METRICS):
    correlations, degenerate = {}, []
    if len(pairs) < 2:
        return correlations, degenerate
    actual = np.array([p.actual_test_neg_mse for p in pairs])
    for m in methods:
        for lam in lambdas:
            v = np.array([p.scores[m.value][float(lam)] for p in pairs])
            key = (m.value, float(lam))
            if _is_constant(v) or _is_constant(actual):
                degenerate.append(key)
                continue
            for metric in metrics:
                try:
                    correlations[key + (metric,)] = correlate(v, actual, metric)
                except DegenerateError:
                    if key not in degenerate:
                        degenerate.append(key)
    return correlations, degenerate


def _normalize(lambdas, methods):
    lambdas = [float(l) for l in lambdas]
    methods = [Method(m) for m in methods]
    if not lambdas or not methods:
        raise ValueError("lambdas and methods must be nonempty")
    if any(not l >= 0 for l in lambdas):
        raise ValueError("lambdas must be nonnegative")
    return lambdas, methods


def _run_pairs(family, lambdas, methods, rows_for, check_lemmas, workers):
    jobs = [(s, t) for s in range(family.n_sources) for t in range(family.n_targets)]
    workers = default_workers() if workers is None else max(1, int(workers))

    def job(st):
        s, t = st
        return _evaluate_pair(family, s, t, lambdas, methods, rows_for(t), check_lemmas)

    if workers == 1 or len(jobs) == 1:
        return [job(st) for st in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, i.e. (source_id, target_id) order
        return list(pool.map(job, jobs))


def run_benchmark(
    family: TaskFamily,
    lambdas=(0.0, 1.0),
    methods=(Method.LinMSE, Method.LabMSE, Method.SharedLabMSE),
    check_lemmas: bool = False,
    workers: int | None = None,
) -> BenchResult:
    """Score every (source, target) pair and correlate scores with actual transfer.

    Scores are computed on the target training split; the actual
    transferability of a pair is the negative test MSE of the retrained
    linear head. Correlations (Pearson, Spearman, Kendall) are filled for
    every (method, lambda) when there are at least two pairs and neither
    side is constant.
    """
    lambdas, methods = _normalize(lambdas, methods)
    pairs = _run_pairs(family, lambdas, methods, lambda t: None, check_lemmas, workers)
    correlations, degenerate = _correlations(pairs, lambdas, methods)
    return BenchResult(pairs=pairs, correlations=correlations, degenerate=degenerate)


def subset_rows(family: TaskFamily, size: int, repeat: int, target_id: int) -> np.ndarray:
    """Sorted random row subset of a target training split."""
    n = family.spec.n_train
    if not 1 <= size <= n:
        raise ValueError(f"subset size {size} must lie in [1, {n}]")
    rng = _rng(family.spec.seed, _SUBSET, size, repeat, target_id)
    return np.sort(rng.permutation(n)[:size])


def small_data_sweep(
    family: TaskFamily,
    subset_sizes,
    repeats: int,
    lambdas=(0.0, 1.0),
    methods=(Method.LinMSE,),
    workers: int | None = None,
) -> dict:
    """Average correlations over random small subsets of each target's training set.

    Returns ``{(size, method, lam): {metric: CorrelationReport}}`` where each
    report's value is the mean over ``repeats`` subsets. A repeat whose
    scores are constant (for instance lambda = 0 with fewer samples than
    features, where every head interpolates) contributes a correlation of 0.
    """
    lambdas, methods = _normalize(lambdas, methods)
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    for size in subset_sizes:
        if not 1 <= int(size) <= family.spec.n_train:
            raise ValueError(f"subset size {size} exceeds n_train={family.spec.n_train}")

    table = {}
    for size in subset_sizes:
        size = int(size)
        sums = {}
        n_pairs = 0
        for r in range(repeats):
            pairs = _run_pairs(
                family, lambdas, methods,
                lambda t, r=r: subset_rows(family, size, r, t), False, workers,
            )
            n_pairs = len(pairs)
            correlations, _ = _correlations(pairs, lambdas, methods)
            for m in methods:
                for lam in lambdas:
                    for metric in METRICS:
                        rep = correlations.get((m.value, lam, metric))
                        key = (size, m.value, lam, metric)
                        sums[key] = sums.get(key, 0.0) + (rep.value if rep else 0.0)
        for (sz, m, lam, metric), total in sums.items():
            table.setdefault((sz, m, lam), {})[metric] = CorrelationReport(
                metric, total / repeats, n_pairs
            )
    return table
