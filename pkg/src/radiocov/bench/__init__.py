"""Benchmark harness: timed runs, scaling sweeps, reports and charts."""

from __future__ import annotations

from radiocov.bench.metrics import RunRecord, efficiency, gain_pct, speedup
from radiocov.bench.report import REPORT_COLUMNS, load_report, recompute_metrics, report_frame, write_report
from radiocov.bench.runner import BenchKnobs, run_once
from radiocov.bench.sweep import ScalingReport, SweepRow, fill_metrics, replicate_network, scaling_sweep
from radiocov.bench.visualization import plot_scaling, save_scaling_html

__all__ = [
    # Metrics
    "RunRecord",
    "speedup",
    "efficiency",
    "gain_pct",
    # Runs
    "BenchKnobs",
    "run_once",
    # Sweeps
    "SweepRow",
    "ScalingReport",
    "replicate_network",
    "scaling_sweep",
    "fill_metrics",
    # Reports
    "REPORT_COLUMNS",
    "report_frame",
    "write_report",
    "load_report",
    "recompute_metrics",
    # Charts
    "plot_scaling",
    "save_scaling_html",
]
