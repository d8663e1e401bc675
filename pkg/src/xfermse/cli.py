"""Command-line front end.

Exit codes: 0 success, 2 bad file/format/configuration, 3 dimension or
shape mismatch, 4 degenerate (constant) input to a correlation, 5 an
inequality check failed during ``bench --check-lemmas``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from . import estimators as est
from . import evalmetrics as ev
from . import synthbench as sb
from .matrixio import MatrixFormatError, file_digest, read_matrix
from .numkit import DimensionError

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SHAPE = 3
EXIT_DEGENERATE = 4
EXIT_LEMMA = 5

_METHODS = {
    "linmse": est.Method.LinMSE,
    "labmse": est.Method.LabMSE,
    "sharedlab": est.Method.SharedLabMSE,
}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(payload: dict, out: str | None) -> None:
    payload = {"schema_version": SCHEMA_VERSION, "tool_version": __version__, **payload}
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(path: str, header) -> np.ndarray:
    try:
        return read_matrix(path, header=header)
    except MatrixFormatError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc


def _vector(M: np.ndarray, path: str) -> np.ndarray:
    if M.shape[1] != 1:
        raise CliError(EXIT_SHAPE, f"{path}: expected a single column, got {M.shape[1]}")
    return M[:, 0]


def _ms(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1e3, 3)


def cmd_score(args) -> int:
    U = _load(args.inputs, args.header)
    Y = _load(args.targets, args.header)
    if U.shape[0] != Y.shape[0]:
        raise CliError(EXIT_SHAPE, f"row count mismatch: inputs {U.shape[0]}, targets {Y.shape[0]}")
    t0 = time.perf_counter()
    s = est.score(_METHODS[args.method], U, Y, args.lam)
    elapsed = _ms(t0)
    _emit(
        {
            "method": s.method.value,
            "lambda": s.lam,
            "value": s.value,
            "mse_term": s.mse_term,
            "penalty_term": s.penalty_term,
            "n": s.n,
            "input_dim": s.input_dim,
            "output_dim": s.output_dim,
            "input_digests": {
                "inputs": file_digest(args.inputs),
                "targets": file_digest(args.targets),
            },
            "compute_ms": elapsed,
        },
        args.out,
    )
    return EXIT_OK


def cmd_correlate(args) -> int:
    x = _vector(_load(args.scores, args.header), args.scores)
    y = _vector(_load(args.actuals, args.header), args.actuals)
    if x.size != y.size:
        raise CliError(EXIT_SHAPE, f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise CliError(EXIT_SHAPE, "need at least 2 pairs")
    metrics = ev.METRICS if args.metric == "all" else (args.metric,)
    t0 = time.perf_counter()
    try:
        reports = [ev.correlate(x, y, m).to_dict() for m in metrics]
    except ev.DegenerateError as exc:
        raise CliError(EXIT_DEGENERATE, str(exc)) from exc
    elapsed = _ms(t0)
    payload = {"reports": reports, "compute_ms": elapsed}
    if len(reports) == 1:
        payload.update(reports[0])
    _emit(payload, args.out)
    return EXIT_OK


def cmd_select_source(args) -> int:
    S = _load(args.scores, args.header)
    T = _load(args.actuals, args.header)
    if S.shape != T.shape:
        raise CliError(EXIT_SHAPE, f"shape mismatch: {S.shape} vs {T.shape}")
    ks = args.k or [1]
    for k in ks:
        if not 1 <= k <= S.shape[0]:
            raise CliError(EXIT_SHAPE, f"k={k} outside [1, {S.shape[0]}]")
    t0 = time.perf_counter()
    results = [ev.top_k_matching_rate(S, T, k).to_dict() for k in ks]
    elapsed = _ms(t0)
    _emit({"results": results, "compute_ms": elapsed}, args.out)
    return EXIT_OK


def cmd_bound(args) -> int:
    try:
        spec = est.ComplexitySpec(
            d=args.d, d_t=args.dt, M=args.M, H=args.H, L=args.L, delta=args.delta, n=args.n
        )
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    if spec.delta > 1:
        print(f"warning: delta={spec.delta} > 1, the bound is not a probability statement",
              file=sys.stderr)
    t0 = time.perf_counter()
    C = est.complexity_term(spec)
    if args.shared:
        if args.a_norm_sq is None or args.source_loss is None:
            raise CliError(EXIT_INPUT, "--shared needs --a-norm-sq and --source-loss")
        s = est.TransferScore(est.Method.SharedLabMSE, 0.0, args.score, spec.n, 0, spec.d_t, 0.0, 0.0)
        try:
            bound = est.theorem2_lower_bound(s, args.a_norm_sq, args.source_loss, spec)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
    else:
        s = est.TransferScore(est.Method.LabMSE, 0.0, args.score, spec.n, 0, spec.d_t, 0.0, 0.0)
        bound = est.theorem1_lower_bound(s, spec)
    elapsed = _ms(t0)
    payload = {
        "theorem": 2 if args.shared else 1,
        "score": args.score,
        "complexity": C,
        "complexity_over_sqrt_n": C / math.sqrt(spec.n),
        "lower_bound": bound,
        "spec": {"d": spec.d, "d_t": spec.d_t, "M": spec.M, "H": spec.H, "L": spec.L,
                 "delta": spec.delta, "n": spec.n},
        "compute_ms": elapsed,
    }
    if args.shared:
        payload["a_norm_sq"] = args.a_norm_sq
        payload["source_loss"] = args.source_loss
    _emit(payload, args.out)
    return EXIT_OK


def _float_list(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def cmd_bench(args) -> int:
    try:
        spec = sb.TaskSpec(
            seed=args.seed, n_train=args.n_train, n_test=args.n_test, input_dim=args.d,
            feature_dim=args.dr, source_label_dim=args.ds, target_label_dim=args.dt,
            noise_std=args.noise, alignment=args.alignment,
        )
        methods = [_METHODS[m] for m in args.methods.split(",")]
        if args.n_sources < 1 or args.n_targets < 1:
            raise ValueError("--n-sources and --n-targets must be >= 1")
        if not args.lambdas or any(l < 0 for l in args.lambdas):
            raise ValueError("--lambdas must be a nonempty list of nonnegative numbers")
        if args.subset_sizes and any(not 1 <= s <= args.n_train for s in args.subset_sizes):
            raise ValueError("--subset-sizes must lie in [1, n_train]")
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_INPUT, f"invalid configuration: {exc}") from exc

    t0 = time.perf_counter()
    family = sb.generate_task_family(spec, args.n_sources, args.n_targets)
    result = sb.run_benchmark(family, args.lambdas, methods, check_lemmas=args.check_lemmas)
    payload = {
        "config": {
            "seed": spec.seed, "n_sources": args.n_sources, "n_targets": args.n_targets,
            "n_train": spec.n_train, "n_test": spec.n_test, "d": spec.input_dim,
            "dr": spec.feature_dim, "ds": spec.source_label_dim, "dt": spec.target_label_dim,
            "noise": spec.noise_std, "alignment": spec.alignment,
            "lambdas": args.lambdas, "methods": [m.value for m in methods],
        },
        **result.to_dict(),
    }
    if args.subset_sizes:
        table = sb.small_data_sweep(
            family, args.subset_sizes, args.repeats, args.lambdas, methods
        )
        payload["small_data"] = [
            {"size": size, "method": m, "lambda": lam,
             "mean": {metric: rep.value for metric, rep in reports.items()}}
            for (size, m, lam), reports in sorted(table.items())
        ]
    if args.check_lemmas:
        payload["lemma_violations"] = [list(v) for v in result.lemma_violations()]
    if args.timing:
        payload["compute_ms"] = _ms(t0)
    _emit(payload, args.out)
    if args.check_lemmas and result.lemma_violations():
        print(f"lemma check failed for pairs {result.lemma_violations()}", file=sys.stderr)
        return EXIT_LEMMA
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="xfermse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write JSON here instead of standard output")
        hdr = sp.add_mutually_exclusive_group()
        hdr.add_argument("--header", dest="header", action="store_const", const=True,
                         help="CSV inputs have a header row")
        hdr.add_argument("--no-header", dest="header", action="store_const", const=False,
                         help="CSV inputs have no header row")
        sp.set_defaults(header=None)

    sp = sub.add_parser("score", help="compute a transferability score")
    sp.add_argument("--method", choices=sorted(_METHODS), required=True)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--inputs", required=True,
                    help="features (linmse), dummy labels (labmse) or source labels (sharedlab)")
    sp.add_argument("--targets", required=True)
    common(sp)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("correlate", help="correlate scores with actual transferability")
    sp.add_argument("--scores", required=True)
    sp.add_argument("--actuals", required=True)
    sp.add_argument("--metric", choices=[*ev.METRICS, "all"], default="pearson")
    common(sp)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("select-source", help="top-k source selection matching rate")
    sp.add_argument("--scores", required=True, help="sources x targets estimator scores")
    sp.add_argument("--actuals", required=True, help="sources x targets negative test MSE")
    sp.add_argument("--k", type=int, action="append")
    common(sp)
    sp.set_defaults(func=cmd_select_source)

    sp = sub.add_parser("bound", help="evaluate the generalization lower bounds")
    sp.add_argument("--score", type=float, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--dt", type=int, required=True)
    sp.add_argument("--M", type=float, required=True)
    sp.add_argument("--H", type=float, required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--shared", action="store_true", help="shared-inputs bound")
    sp.add_argument("--a-norm-sq", type=float)
    sp.add_argument("--source-loss", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("bench", help="run the synthetic transfer benchmark")
    d = sb.TaskSpec()
    sp.add_argument("--seed", type=int, default=d.seed)
    sp.add_argument("--n-sources", type=int, default=6)
    sp.add_argument("--n-targets", type=int, default=5)
    sp.add_argument("--n-train", type=int, default=d.n_train)
    sp.add_argument("--n-test", type=int, default=d.n_test)
    sp.add_argument("--d", type=int, default=d.input_dim)
    sp.add_argument("--dr", type=int, default=d.feature_dim)
    sp.add_argument("--ds", type=int, default=d.source_label_dim)
    sp.add_argument("--dt", type=int, default=d.target_label_dim)
    sp.add_argument("--noise", type=float, default=d.noise_std)
    sp.add_argument("--alignment", type=float, default=d.alignment)
    sp.add_argument("--lambdas", type=_float_list, default=[0.0, 0.5, 1.0, 5.0])
    sp.add_argument("--methods", default="linmse,labmse,sharedlab")
    sp.add_argument("--subset-sizes", type=_int_list)
    sp.add_argument("--repeats", type=int, default=10)
    sp.add_argument("--check-lemmas", action="store_true")
    sp.add_argument("--timing", action="store_true",
                    help="include compute_ms (makes output run-dependent)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"xfermse {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except DimensionError as exc:
        print(f"xfermse {args.command}: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except OSError as exc:
        print(f"xfermse {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
