"""Benchmark records and their CSV/JSON serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

COLUMNS = ("kernel", "layout", "mesh_n", "ensemble_size", "time_ms", "gflops", "speedup",
           "iterations", "status")
FLOAT_COLUMNS = ("time_ms", "gflops", "speedup")
INT_COLUMNS = ("mesh_n", "ensemble_size", "iterations")


@dataclass
class BenchRecord:
    """One timed path.

    ``layout`` is ``scalar`` for the baseline of ``s`` sequential
    single-sample runs, whose ``time_ms`` is their total; the ensemble row
    carries ``speedup = scalar time_ms / ensemble time_ms``.
    """

    kernel: str
    layout: str
    mesh_n: int
    ensemble_size: int
    time_ms: float | None = None
    gflops: float | None = None
    speedup: float | None = None
    iterations: int | None = None
    status: str = "ok"


@dataclass
class SpeedupReport:
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status == "ok" for r in self.records)

    def ensemble_rows(self, kernel=None):
        return [r for r in self.records
                if r.layout != "scalar" and (kernel is None or r.kernel == kernel)]

    def find(self, kernel, layout, s):
        for r in self.records:
            if (r.kernel, r.layout, r.ensemble_size) == (kernel, layout, s):
                return r
        raise KeyError((kernel, layout, s))


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        return float("%.6g" % value) if math.isfinite(value) else None
    return value


def to_csv(report: SpeedupReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in report.records:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def to_json(report: SpeedupReport) -> str:
    rows = [{c: _json_value(getattr(r, c)) for c in COLUMNS} for r in report.records]
    return json.dumps(rows, indent=1)


def parse_csv(text: str) -> list:
    """Records back from :func:`to_csv` output."""
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for c in COLUMNS:
            v = row[c]
            if c in FLOAT_COLUMNS:
                kw[c] = float(v) if v else None
            elif c in INT_COLUMNS:
                kw[c] = int(v) if v else None
            else:
                kw[c] = v
        out.append(BenchRecord(**kw))
    return out


def emit_report(report: SpeedupReport, fmt: str = "csv", path=None) -> str:
    """Write the report as CSV or JSON to ``path`` (stdout for ``None``/``-``)."""
    if fmt == "csv":
        text = to_csv(report)
    elif fmt == "json":
        text = to_json(report) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return text
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text
