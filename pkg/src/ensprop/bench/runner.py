"""Scalar-versus-ensemble benchmarks with correctness gates."""

from __future__ import annotations

import gc
import time
from dataclasses import dataclass, field

import numpy as np

from ..commsim import TransportModel, fit_halo_model, halo_exchange, partition, predicted_speedup
from ..fem import PdeCoefficients, assemble, build_mesh, kl_build, newton_solve
from ..mgsolve import SolverConfig, mg_pcg_solve
from ..sparsela import spmv, spmv_ensemble_commuted, spmv_ensemble_outer, spmv_scalar
from ..sparsela.crs import BlockEnsembleCrs
from .report import BenchRecord, SpeedupReport
from .samples import draw_samples, sample_block

KERNELS = ("spmv", "assembly", "solve", "halo")
LAYOUTS = ("commuted", "outer")
DEFAULT_MESH = {"spmv": 64, "assembly": 64, "solve": 16, "halo": 64}
KL_TERMS = 5
SOLVE_GATE_TOL = 1e-12   # tolerance of the untimed reference solves
SOLVE_GATE_RTOL = 1e-10  # allowed relative gap between ensemble and scalar solutions
HALO_GATE_RTOL = 1e-6


@dataclass
class BenchConfig:
    kernel: str = "spmv"
    mesh_n: int | None = None  # kernel default when None
    ensemble_sizes: list = field(default_factory=lambda: [1, 2, 4, 8, 16, 32])
    reps: int = 5
    seed: int = 20140101
    layout: str = "commuted"
    solver: SolverConfig = field(default_factory=SolverConfig)
    latency_us: float = 100.0
    bandwidth_gbs: float = 1.0
    ranks: int = 2

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout must be one of {LAYOUTS}")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if not self.ensemble_sizes or min(self.ensemble_sizes) < 1:
            raise ValueError("ensemble sizes must be at least 1")

    @property
    def mesh(self) -> int:
        return self.mesh_n if self.mesh_n is not None else DEFAULT_MESH[self.kernel]


def best_of(reps: int, fn) -> float:
    """Shortest wall time of ``reps`` calls, in seconds."""
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _pair(kernel, layout, n, s, t_scalar, t_ens, flops=None, its=(None, None)):
    scalar = BenchRecord(kernel, "scalar", n, s, 1e3 * t_scalar,
                         1e-9 * flops / t_scalar if flops else None, 1.0, its[0])
    ens = BenchRecord(kernel, layout, n, s, 1e3 * t_ens,
                      1e-9 * flops / t_ens if flops else None, t_scalar / t_ens, its[1])
    return [scalar, ens]


def _gate_failed(kernel, layout, n, s, what):
    return [BenchRecord(kernel, layout, n, s, status=f"gate_failed: {what}")]


def _bench_spmv(cfg, mesh, field_, samples, s):
    n = mesh.cells_per_axis
    Y = sample_block(samples)
    A = assemble(mesh, field_, PdeCoefficients(), np.zeros((mesh.num_nodes, s)), Y).A
    X = np.ascontiguousarray(
        np.random.default_rng(cfg.seed + s).uniform(-1, 1, (mesh.num_nodes, s)))
    # block layout: sample e's values are one contiguous row, so its rows
    # double as the scalar matrices of the baseline
    B = BlockEnsembleCrs(A.row_map, A.col_entry, A.values.T, A.num_cols)
    xs = [np.ascontiguousarray(X[:, e]) for e in range(s)]
    zs = [np.empty(mesh.num_nodes) for _ in range(s)]
    blocks = [B.block(e) for e in range(s)]
    if cfg.layout == "outer":
        del A
        gc.collect()
        x_flat = np.ascontiguousarray(X.T).reshape(-1)
        z_flat = np.empty(s * mesh.num_nodes)
        run_ens = lambda: spmv_ensemble_outer(B, x_flat, z_flat)  # noqa: E731
        ens_result = lambda: z_flat.reshape(s, -1).T  # noqa: E731
    else:
        Z = np.empty_like(X)
        run_ens = (lambda: spmv(A, X, Z)) if s == 1 else (  # noqa: E731
            lambda: spmv_ensemble_commuted(A, X, Z))
        ens_result = lambda: Z  # noqa: E731

    def run_scalar():
        for e in range(s):
            spmv_scalar(blocks[e], xs[e], zs[e])

    run_ens()
    run_scalar()
    if not np.array_equal(ens_result().view(np.uint64), np.stack(zs, axis=1).view(np.uint64)):
        return _gate_failed("spmv", cfg.layout, n, s, "ensemble spmv differs from scalar runs")
    t_ens = best_of(cfg.reps, run_ens)
    t_scalar = best_of(cfg.reps, run_scalar)
    flops = 2.0 * B.num_entries * s
    return _pair("spmv", cfg.layout, n, s, t_scalar, t_ens, flops)


def _bench_assembly(cfg, mesh, field_, samples, s):
    n = mesh.cells_per_axis
    coeffs = PdeCoefficients()
    Y = sample_block(samples)
    U = np.zeros((mesh.num_nodes, s))
    ens = assemble(mesh, field_, coeffs, U, Y)
    u0 = np.zeros(mesh.num_nodes)
    scal = [assemble(mesh, field_, coeffs, u0, y) for y in samples]
    for e, sc in enumerate(scal):
        if not (np.array_equal(ens.A.values[:, e].view(np.uint64), sc.A.values.view(np.uint64))
                and np.array_equal(ens.f[:, e].view(np.uint64), sc.f.view(np.uint64))):
            return _gate_failed("assembly", cfg.layout, n, s,
                                f"sample {e} differs from its scalar assembly")

    def run_scalar():
        for y, sc in zip(samples, scal):
            assemble(mesh, field_, coeffs, u0, y, out=sc)

    t_ens = best_of(cfg.reps, lambda: assemble(mesh, field_, coeffs, U, Y, out=ens))
    t_scalar = best_of(cfg.reps, run_scalar)
    return _pair("assembly", cfg.layout, n, s, t_scalar, t_ens)


def _mg_solver(config):
    def solve(A, rhs):
        res = mg_pcg_solve(A, rhs, config)
        return res.x, res.iterations
    return solve


def _bench_solve(cfg, mesh, field_, samples, s):
    n = mesh.cells_per_axis
    coeffs = PdeCoefficients()
    Y = sample_block(samples)
    # untimed gate: tightly converged ensemble and scalar solutions must agree
    tight = SolverConfig(**{**vars(cfg.solver), "tol": SOLVE_GATE_TOL})
    ref_ens = newton_solve(mesh, field_, coeffs, Y, _mg_solver(tight)).u
    for e, y in enumerate(samples):
        ref = newton_solve(mesh, field_, coeffs, y, _mg_solver(tight)).u
        gap = np.linalg.norm(ref_ens[:, e] - ref) / np.linalg.norm(ref)
        if not gap <= SOLVE_GATE_RTOL:
            return _gate_failed("solve", cfg.layout, n, s,
                                f"sample {e} relative gap {gap:.3e}")
    solver = _mg_solver(cfg.solver)
    its = {}

    def run_ens():
        its["ens"] = newton_solve(mesh, field_, coeffs, Y, solver).linear_iterations[0]

    def run_scalar():
        its["scalar"] = max(newton_solve(mesh, field_, coeffs, y, solver).linear_iterations[0]
                            for y in samples)

    t_ens = best_of(cfg.reps, run_ens)
    t_scalar = best_of(cfg.reps, run_scalar)
    return _pair("solve", cfg.layout, n, s, t_scalar, t_ens,
                 its=(its["scalar"], its["ens"]))


def _bench_halo(cfg, mesh, sizes):
    n = mesh.cells_per_axis
    part = partition(mesh, cfg.ranks)
    link = TransportModel.from_flags(cfg.latency_us, cfg.bandwidth_gbs)

    def exchange_time(s):
        x = np.zeros((mesh.num_nodes, s)) if s > 1 else np.zeros(mesh.num_nodes)
        return halo_exchange(part, part.distribute(x), link).elapsed

    t1 = exchange_time(1)
    times = {s: exchange_time(s) for s in sizes}
    fit_pts = [(1, t1)] + [(s, t) for s, t in times.items() if s != 1]
    model = fit_halo_model(fit_pts)[0] if len({p[0] for p in fit_pts}) > 1 else None
    records = []
    for s in sizes:
        recs = _pair("halo", cfg.layout, n, s, s * t1, times[s])
        if model is not None:
            pred = predicted_speedup(model, s)
            if abs(recs[1].speedup - pred) > HALO_GATE_RTOL * pred:
                recs[1].status = f"gate_failed: measured {recs[1].speedup:.9g} vs model {pred:.9g}"
        records += recs
    return records


def run_bench(cfg: BenchConfig) -> SpeedupReport:
    """Time the scalar and ensemble paths for every ensemble size.

    The scalar path runs ``s`` single-sample problems one after the other
    and the ensemble path runs them together; both report best-of-``reps``
    wall time.  Every ensemble is checked against its scalar runs before
    timing, and a failing check replaces the timings with a status entry.
    """
    mesh = build_mesh(cfg.mesh)
    report = SpeedupReport()
    if cfg.kernel == "halo":
        report.records = _bench_halo(cfg, mesh, cfg.ensemble_sizes)
        return report
    field_ = kl_build(KL_TERMS)
    bench = {"spmv": _bench_spmv, "assembly": _bench_assembly, "solve": _bench_solve}[cfg.kernel]
    for s in cfg.ensemble_sizes:
        samples = draw_samples(cfg.seed + s, s, KL_TERMS)
        try:
            report.records += bench(cfg, mesh, field_, samples, s)
        except Exception as exc:  # recorded per row; the sweep continues
            report.records.append(BenchRecord(cfg.kernel, cfg.layout, mesh.cells_per_axis, s,
                                              status=f"error: {type(exc).__name__}: {exc}"))
        gc.collect()
    return report
