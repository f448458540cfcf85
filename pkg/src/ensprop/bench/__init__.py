"""Benchmark harness: sampling, timing, speedups, roofline bounds and reports."""

from .report import BenchRecord, SpeedupReport, emit_report, parse_csv, to_csv, to_json
from .roofline import RooflineBounds, roofline_bounds
from .runner import BenchConfig, best_of, run_bench
from .samples import draw_samples, sample_block

__all__ = [
    "BenchConfig", "BenchRecord", "RooflineBounds", "SpeedupReport", "best_of",
    "draw_samples", "emit_report", "parse_csv", "roofline_bounds", "run_bench",
    "sample_block", "to_csv", "to_json",
]
