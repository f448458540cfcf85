import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

import ensprop.bench.runner as runner
from ensprop.bench import (BenchConfig, BenchRecord, SpeedupReport, draw_samples, emit_report,
                           parse_csv, roofline_bounds, run_bench, to_csv)
from ensprop.bench.cli import main
from ensprop.commsim import HaloModel, predicted_speedup
from ensprop.mgsolve import SolverConfig


# ---- samples -------------------------------------------------------------------

def test_samples_deterministic():
    a, b = draw_samples(7, 10, 5), draw_samples(7, 10, 5)
    assert len(a) == 10 and all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], draw_samples(8, 1, 5)[0])
    assert draw_samples(1, 0, 5) == []
    with pytest.raises(ValueError):
        draw_samples(1, 3, 0)


def test_samples_uniform_on_box():
    y = np.array(draw_samples(3, 100_000, 5))
    assert y.min() >= -1 and y.max() <= 1
    # sd of the mean is 0.577 / sqrt(1e5) = 0.0018
    assert np.all(np.abs(y.mean(axis=0)) < 0.02)


# ---- roofline -----------------------------------------------------------------------

def test_roofline_examples():
    b = roofline_bounds(36.2)
    assert round(b.scalar_optimistic, 2) == 6.03 and round(b.scalar_pessimistic, 2) == 3.62
    assert round(b.scalar_optimistic, 1) == 6.0 and round(b.scalar_pessimistic, 1) == 3.6
    g = roofline_bounds(178)
    assert g.ensemble_optimistic == pytest.approx(44.5) and g.scalar_pessimistic == pytest.approx(17.8)
    with pytest.raises(ValueError):
        roofline_bounds(0.0)


@given(st.floats(1e-3, 1e4))
def test_roofline_ensemble_gain(bw):
    b = roofline_bounds(bw)
    assert b.ensemble_optimistic / b.scalar_optimistic == pytest.approx(1.5, rel=1e-14)
    assert b.ensemble_pessimistic / b.scalar_pessimistic == pytest.approx(1.25, rel=1e-14)


# ---- reports --------------------------------------------------------------------

HEADER = "kernel,layout,mesh_n,ensemble_size,time_ms,gflops,speedup,iterations,status"


def test_empty_report_is_header_only(tmp_path):
    path = tmp_path / "r.csv"
    emit_report(SpeedupReport(), "csv", path)
    assert path.read_text() == HEADER + "\n"


def test_csv_round_trip():
    rec = BenchRecord("spmv", "commuted", 64, 32, 12.3456789, 2.5, 1.6142857, None, "ok")
    (back,) = parse_csv(to_csv(SpeedupReport([rec])))
    assert back.kernel == "spmv" and back.mesh_n == 64 and back.iterations is None
    assert back.time_ms == 12.3457 and back.speedup == 1.61429
    assert back == parse_csv(to_csv(SpeedupReport([back])))[0]


def test_json_mirrors_records(tmp_path):
    recs = [BenchRecord("solve", "scalar", 16, 4, 1.0, None, 1.0, 12),
            BenchRecord("solve", "commuted", 16, 4, 0.5, None, 2.0, 12)]
    path = tmp_path / "r.json"
    emit_report(SpeedupReport(recs), "json", path)
    rows = json.loads(path.read_text())
    assert len(rows) == 2 and list(rows[0]) == HEADER.split(",")
    assert rows[1]["speedup"] == 2.0 and rows[0]["gflops"] is None


def test_emit_report_errors(tmp_path):
    with pytest.raises(OSError, match="nope"):
        emit_report(SpeedupReport(), "csv", tmp_path / "nope" / "r.csv")
    with pytest.raises(ValueError):
        emit_report(SpeedupReport(), "xml", tmp_path / "r.xml")


# ---- runner -------------------------------------------------------------------------

def test_config_validation():
    for kw in ({"kernel": "fft"}, {"layout": "diagonal"}, {"reps": 0}, {"ensemble_sizes": [0]}):
        with pytest.raises(ValueError):
            BenchConfig(**kw)
    assert BenchConfig(kernel="solve").mesh == 16 and BenchConfig().mesh == 64


@pytest.mark.parametrize("kernel,layout", [("spmv", "commuted"), ("spmv", "outer"),
                                           ("assembly", "commuted"), ("solve", "commuted")])
def test_run_bench_rows(kernel, layout):
    rep = run_bench(BenchConfig(kernel=kernel, mesh_n=4, ensemble_sizes=[1, 4], reps=2,
                                layout=layout))
    assert rep.ok and len(rep.records) == 4
    for s in (1, 4):
        scalar, ens = rep.find(kernel, "scalar", s), rep.find(kernel, layout, s)
        # printed digits are self-consistent
        (sc_p,) = parse_csv(to_csv(SpeedupReport([scalar])))
        (en_p,) = parse_csv(to_csv(SpeedupReport([ens])))
        assert en_p.speedup * en_p.time_ms == pytest.approx(sc_p.time_ms, rel=2e-5)
        if kernel == "spmv":
            assert ens.gflops * ens.time_ms == pytest.approx(scalar.gflops * scalar.time_ms)
        if kernel == "solve":
            assert ens.iterations >= 1


def test_identical_samples_same_iterations(monkeypatch):
    def same(seed, count, m):
        y = np.random.default_rng(seed).uniform(-1, 1, m)
        return [y.copy() for _ in range(count)]

    monkeypatch.setattr(runner, "draw_samples", same)
    rep = run_bench(BenchConfig(kernel="solve", mesh_n=8, ensemble_sizes=[4, 8], reps=1))
    assert rep.ok
    for s in (4, 8):
        assert rep.find("solve", "scalar", s).iterations == rep.find("solve", "commuted", s).iterations


def test_halo_speedups_follow_model():
    rep = run_bench(BenchConfig(kernel="halo", mesh_n=64, ensemble_sizes=list(range(1, 33))))
    assert rep.ok
    a, b = 100e-6, 65 ** 2 * 8 / 1e9
    for r in rep.ensemble_rows("halo"):
        assert r.speedup == pytest.approx(predicted_speedup(HaloModel(a, b), r.ensemble_size),
                                          rel=1e-6)


def test_non_timing_fields_deterministic():
    def fields(rep):
        return [(r.kernel, r.layout, r.mesh_n, r.ensemble_size, r.iterations, r.status)
                for r in rep.records]

    cfg = BenchConfig(kernel="solve", mesh_n=6, ensemble_sizes=[2, 3], reps=1, seed=5)
    assert fields(run_bench(cfg)) == fields(run_bench(cfg))


def test_gate_failure_is_reported(monkeypatch):
    real = runner.spmv_ensemble_commuted

    def broken(A, x, out=None):
        z = real(A, x, out)
        z[0, -1] = np.nextafter(z[0, -1], np.inf)  # one ulp off
        return z

    monkeypatch.setattr(runner, "spmv_ensemble_commuted", broken)
    rep = run_bench(BenchConfig(kernel="spmv", mesh_n=3, ensemble_sizes=[2, 4], reps=1))
    assert not rep.ok
    assert [r.status.split(":")[0] for r in rep.records] == ["gate_failed", "gate_failed"]


def test_solver_failure_recorded_and_sweep_continues():
    rep = run_bench(BenchConfig(kernel="solve", mesh_n=8, ensemble_sizes=[1, 2], reps=1,
                                solver=SolverConfig(maxit=2)))
    assert len(rep.records) == 2
    assert all(r.status.startswith("error: PcgMaxIterError") for r in rep.records)


def test_single_sample_speedup_near_one():
    rep = run_bench(BenchConfig(kernel="spmv", mesh_n=48, ensemble_sizes=[1], reps=15))
    assert 0.9 <= rep.find("spmv", "commuted", 1).speedup <= 1.1


# ---- CLI --------------------------------------------------------------------------------

def test_cli_writes_csv(tmp_path):
    out = tmp_path / "halo.csv"
    rc = main(["--kernel", "halo", "--mesh", "16", "--ensemble-sizes", "1,2,8",
               "--latency-us", "50", "--bandwidth-gbs", "2", "--ranks", "3", "--out", str(out)])
    assert rc == 0
    recs = parse_csv(out.read_text())
    assert [r.ensemble_size for r in recs] == [1, 1, 2, 2, 8, 8]


def test_cli_exit_code_on_failure(tmp_path):
    rc = main(["--kernel", "solve", "--mesh", "8", "--ensemble-sizes", "2", "--maxit", "1",
               "--reps", "1", "--format", "json", "--out", str(tmp_path / "r.json")])
    assert rc == 1
    assert json.loads((tmp_path / "r.json").read_text())[0]["status"].startswith("error")


def test_cli_rejects_bad_flags(capsys):
    for argv in (["--kernel", "fft"], ["--ensemble-sizes", "1,x"], ["--reps", "0"]):
        with pytest.raises(SystemExit) as err:
            main(argv)
        assert err.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ensprop.bench", "--kernel", "halo", "--mesh",
                          "8", "--ensemble-sizes", "1,4"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == HEADER
