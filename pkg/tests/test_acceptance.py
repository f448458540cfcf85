"""End-to-end acceptance checks, one per criterion.

Each test prints a ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""

import time

import numpy as np

from ensprop.bench import BenchConfig, draw_samples, roofline_bounds, run_bench, sample_block
from ensprop.commsim import (TransportModel, fit_halo_model, halo_exchange, partition,
                             predicted_speedup)
from ensprop.fem import (QP_REF, PdeCoefficients, apply_dirichlet, assemble, build_mesh,
                         default_linear_solver, kl_build, newton_solve)
from ensprop.mgsolve import SolverConfig, build_hierarchy, mg_pcg_solve, vcycle
from ensprop.sparsela import repack, spmv

from conftest import random_crs

RESULTS = []


def record(number, title, ok, detail, started):
    line = (f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail} "
            f"({time.perf_counter() - started:.1f} s)")
    RESULTS.append(line)
    print(line)
    assert ok, line


def same_bits(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    return a.shape == b.shape and np.array_equal(a.view(np.uint64), b.view(np.uint64))


def dirichlet_system(mesh, field, Y):
    u = np.zeros((mesh.num_nodes,) + np.shape(Y)[1:])
    return apply_dirichlet(assemble(mesh, field, PdeCoefficients(), u, Y), mesh)


# 1 -------------------------------------------------------------------------------------

def test_1_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    sizes = (1, 2, 4, 8, 32)
    checks = failures = 0
    for s in sizes:
        for n in (1, 17, 200):
            base = random_crs(rng, n, 0.05)
            blocks = [base.with_values(rng.standard_normal(base.num_entries)) for _ in range(s)]
            xs = [rng.standard_normal(n) for _ in range(s)]
            A, X = repack(blocks, xs)
            ref = np.stack([spmv(b, x) for b, x in zip(blocks, xs)], axis=1)
            checks += 1
            failures += not same_bits(spmv(A, X), ref)
    field = kl_build(5)
    for s in sizes:
        for n in (2, 8):
            mesh = build_mesh(n)
            coeffs = PdeCoefficients()
            Y = rng.uniform(-1, 1, (5, s))
            U = rng.uniform(-1, 1, (mesh.num_nodes, s))
            ens = assemble(mesh, field, coeffs, U, Y)
            scal = [assemble(mesh, field, coeffs, U[:, e], Y[:, e]) for e in range(s)]
            A, F = repack([x.A for x in scal], [x.f for x in scal])
            X = rng.standard_normal((mesh.num_nodes, s))
            ref = np.stack([spmv(x.A, X[:, e]) for e, x in enumerate(scal)], axis=1)
            checks += 3
            failures += (not same_bits(ens.A.values, A.values)) + (not same_bits(ens.f, F)) \
                + (not same_bits(spmv(ens.A, X), ref))
    elapsed = time.perf_counter() - t0
    record(1, "ensemble SpMV and assembly bitwise equal to scalar runs",
           failures == 0 and elapsed < 10,
           f"{checks - failures}/{checks} bitwise checks, s in {sizes}", t0)


# 2 -------------------------------------------------------------------------------------

# bandwidth (GB/s) and published bounds (GFLOP/s): scalar opt/pess, ensemble opt/pess
ARCHITECTURES = {
    "Sandy Bridge": (36.2, (6.0, 3.6, 9.1, 4.5)),
    "Blue Gene/Q": (28.5, (4.8, 2.9, 7.1, 3.6)),
    "Cray XK7": (11.2, (1.9, 1.1, 2.8, 1.4)),
    "GPU": (178.0, (29.7, 17.8, 44.5, 22.3)),
    "Accelerator": (147.0, (24.5, 14.7, 36.8, 18.4)),
}


def test_2_roofline_bounds():
    t0 = time.perf_counter()
    worst = 0.0
    for bw, table in ARCHITECTURES.values():
        worst = max(worst, max(abs(a - b) for a, b in zip(roofline_bounds(bw), table)))
    # published values are rounded half-up to 0.1, so the gap may reach 0.05
    record(2, "roofline bounds reproduce the published table", worst <= 0.05 + 1e-9,
           f"max |formula - table| = {worst:.4f} GFLOP/s over {len(ARCHITECTURES)} machines", t0)


# 3 -------------------------------------------------------------------------------------

def test_3_halo_model():
    t0 = time.perf_counter()
    link = TransportModel.from_flags(latency_us=100.0, bandwidth_gbs=1.0)
    part = partition(build_mesh(64), 2)
    times = {}
    for s in range(1, 33):
        x = np.zeros((part.mesh.num_nodes, s)) if s > 1 else np.zeros(part.mesh.num_nodes)
        times[s] = halo_exchange(part, part.distribute(x), link).elapsed
    model, rss = fit_halo_model(list(times.items()))
    worst = max(abs(s * times[1] / times[s] - predicted_speedup(model, s))
                / predicted_speedup(model, s) for s in times)
    a_err = abs(model.a - 100e-6) / 100e-6
    b_err = abs(model.b - 65 ** 2 * 8 / 1e9) / (65 ** 2 * 8 / 1e9)
    ok = worst <= 1e-6 and rss < 1e-12 and a_err < 1e-9 and b_err < 1e-9
    record(3, "halo speedup follows s(a+b)/(a+bs)", ok,
           f"max rel. speedup gap {worst:.2e}, RSS {rss:.2e}, "
           f"a={model.a * 1e6:.6f} us, b={model.b * 1e6:.6f} us", t0)


# 4 -------------------------------------------------------------------------------------

def test_4_iteration_invariance():
    t0 = time.perf_counter()
    mesh, field = build_mesh(16), kl_build(5, kappa0=1.0, sigma=0.1, L=1.0)
    cfg = SolverConfig(tol=1e-8)
    sizes = (2, 4, 8, 16, 32)
    excess = []
    counts = set()
    for group in range(20):
        samples = draw_samples(1000 + group, max(sizes), 5)
        scalar = []
        for y in samples:
            sys = dirichlet_system(mesh, field, y)
            scalar.append(mg_pcg_solve(sys.A, -sys.f, cfg).iterations)
        for s in sizes:
            sys = dirichlet_system(mesh, field, sample_block(samples[:s]))
            its = mg_pcg_solve(sys.A, -sys.f, cfg).iterations
            excess.append(its - max(scalar[:s]))
            counts.add(its)
    elapsed = time.perf_counter() - t0
    record(4, "ensemble CG iterations <= worst scalar + 2",
           max(excess) <= 2 and elapsed < 300,
           f"max excess {max(excess)} over {len(excess)} ensembles, "
           f"ensemble counts {sorted(counts)}", t0)


# 5 -------------------------------------------------------------------------------------

def test_5_kronecker_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    mesh, field = build_mesh(8), kl_build(5)
    Y = rng.uniform(-1, 1, (5, 4))
    B = rng.standard_normal((mesh.num_nodes, 4))
    ens = dirichlet_system(mesh, field, Y)
    out = vcycle(build_hierarchy(ens.A), B)
    worst = 0.0
    for e in range(4):
        sc = dirichlet_system(mesh, field, Y[:, e])
        ref = vcycle(build_hierarchy(sc.A), B[:, e])
        worst = max(worst, np.abs(out[:, e] - ref).max() / np.abs(ref).max())
    record(5, "ensemble V-cycle equals per-sample V-cycles",
           worst <= 1e-12 and time.perf_counter() - t0 < 30,
           f"max relative difference {worst:.2e} (s=4, 8^3)", t0)


# 6 -------------------------------------------------------------------------------------

def test_6_manufactured_solution():
    t0 = time.perf_counter()
    worst, iterations = 0.0, set()
    for n in (4, 8):
        mesh = build_mesh(n)
        res = newton_solve(mesh, kl_build(5, sigma=0.0), PdeCoefficients(), np.zeros(5),
                           linear_solver=default_linear_solver(1e-12))
        iterations.add(res.iterations)
        worst = max(worst, np.abs(res.u - (1 - mesh.node_coordinates()[:, 0])).max())
    record(6, "kappa=1 Dirichlet 1->0 gives u = 1 - x in one Newton step",
           worst <= 1e-10 and iterations == {1} and time.perf_counter() - t0 < 10,
           f"max nodal error {worst:.2e}, Newton iterations {sorted(iterations)}", t0)


# 7 -------------------------------------------------------------------------------------

def test_7_directional_speedups():
    t0 = time.perf_counter()
    spmv_c = run_bench(BenchConfig(kernel="spmv", mesh_n=64, ensemble_sizes=[32], reps=5,
                                   layout="commuted"))
    spmv_o = run_bench(BenchConfig(kernel="spmv", mesh_n=64, ensemble_sizes=[32], reps=5,
                                   layout="outer"))
    asm = run_bench(BenchConfig(kernel="assembly", mesh_n=32, ensemble_sizes=[16, 32], reps=5))
    gates = spmv_c.ok and spmv_o.ok and asm.ok
    sp_c = spmv_c.find("spmv", "commuted", 32)
    sp_o = spmv_o.find("spmv", "outer", 32)
    asm_sp = [asm.find("assembly", "commuted", s).speedup for s in (16, 32)]
    ok = (gates and sp_c.speedup > 1.0 and sp_c.time_ms < sp_o.time_ms
          and min(asm_sp) > 1.0 and time.perf_counter() - t0 < 120)
    record(7, "ensemble kernels beat sequential scalar runs", ok,
           f"SpMV 64^3 s=32 commuted x{sp_c.speedup:.2f} ({sp_c.time_ms:.1f} ms) vs outer "
           f"({sp_o.time_ms:.1f} ms); assembly 32^3 x{asm_sp[0]:.2f} (s=16), "
           f"x{asm_sp[1]:.2f} (s=32)", t0)


# 8 -------------------------------------------------------------------------------------

def test_8_kl_oracle():
    t0 = time.perf_counter()
    npts = 2000
    x = (np.arange(npts) + 0.5) / npts
    kernel = np.exp(-np.abs(x[:, None] - x[None, :])) / npts
    lam1d = np.sort(np.linalg.eigvalsh(kernel))[::-1][:5]
    field = kl_build(5, kappa0=1.0, sigma=0.1, L=1.0)
    oracle = np.sort([lam1d[i] * lam1d[j] * lam1d[k]
                      for i in range(5) for j in range(5) for k in range(5)])[::-1][:5]
    rel = np.max(np.abs(field.eigenvalues - oracle) / oracle)
    rng = np.random.default_rng(8)
    mesh = build_mesh(8)
    corner = mesh.node_coordinates()[mesh.cell_nodes[:, 0]]
    qp = (corner[:, None, :] + QP_REF[None] * mesh.h).reshape(-1, 3)
    coef = field.mode_coefficients_at(qp)
    kmin = min((field.kappa0 + field.sigma * coef @ rng.uniform(-1, 1, (5, 1000))).min()
               for _ in range(10))
    record(8, "KL eigenvalues match Nystrom, kappa stays positive",
           rel <= 1e-4 and kmin > 0 and time.perf_counter() - t0 < 30,
           f"max rel. eigenvalue error {rel:.2e}, min kappa {kmin:.4f} over 10^4 samples", t0)
