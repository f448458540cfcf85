"""``ensprop-bench``: scalar versus ensemble timings as CSV or JSON."""

from __future__ import annotations

import argparse
import sys

from ..mgsolve import SolverConfig
from .report import emit_report
from .runner import KERNELS, LAYOUTS, BenchConfig, run_bench


def _sizes(text: str):
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad ensemble sizes {text!r}") from exc
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("ensemble sizes must be positive integers")
    return sizes


def _positive_int(text: str):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ensprop-bench",
        description="Time s sequential single-sample runs against one ensemble run.")
    p.add_argument("--kernel", choices=KERNELS, default="spmv")
    p.add_argument("--mesh", type=_positive_int, default=None,
                   help="cells per axis (default 64, or 16 for solve)")
    p.add_argument("--ensemble-sizes", type=_sizes, default=[1, 2, 4, 8, 16, 32],
                   help="comma-separated list, e.g. 1,2,4,8,16,32")
    p.add_argument("--reps", type=_positive_int, default=5, help="best-of repetitions")
    p.add_argument("--seed", type=int, default=20140101)
    p.add_argument("--layout", choices=LAYOUTS, default="commuted")
    p.add_argument("--tol", type=float, default=1e-8, help="CG relative tolerance")
    p.add_argument("--maxit", type=_positive_int, default=1000)
    p.add_argument("--latency-us", type=float, default=100.0)
    p.add_argument("--bandwidth-gbs", type=float, default=1.0)
    p.add_argument("--ranks", type=_positive_int, default=2)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = BenchConfig(
            kernel=args.kernel, mesh_n=args.mesh, ensemble_sizes=args.ensemble_sizes,
            reps=args.reps, seed=args.seed, layout=args.layout,
            solver=SolverConfig(tol=args.tol, maxit=args.maxit),
            latency_us=args.latency_us, bandwidth_gbs=args.bandwidth_gbs, ranks=args.ranks)
        report = run_bench(cfg)
        emit_report(report, args.format, args.out)
    except (ValueError, OSError) as exc:
        print(f"ensprop-bench: error: {exc}", file=sys.stderr)
        return 2
    for r in report.records:
        if r.status != "ok":
            print(f"ensprop-bench: s={r.ensemble_size}: {r.status}", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
