"""Machine-readable sweep reports.

A report is a tab-separated table, one row per (mode, NP)::

    mode  np  tx  best_s  median_s  speedup  efficiency  gain_pct  error

Undefined metrics are empty cells. The metric columns can always be derived
again from ``mode``, ``np``, ``tx`` and ``best_s`` with :func:`recompute_metrics`.
"""

from __future__ import annotations

from pathlib import Path

import polars as pl

from radiocov.bench.sweep import ScalingReport
from radiocov.errors import ParseError
from radiocov.logging import get_logger

__all__ = ["REPORT_COLUMNS", "report_frame", "write_report", "load_report", "recompute_metrics"]

logger = get_logger(__name__)

REPORT_COLUMNS = ("mode", "np", "tx", "best_s", "median_s", "speedup", "efficiency", "gain_pct", "error")

_SCHEMA: dict[str, type[pl.DataType]] = {
    "mode": pl.Utf8,
    "np": pl.Int64,
    "tx": pl.Int64,
    "best_s": pl.Float64,
    "median_s": pl.Float64,
    "speedup": pl.Float64,
    "efficiency": pl.Float64,
    "gain_pct": pl.Float64,
    "error": pl.Utf8,
}


def report_frame(report: ScalingReport) -> pl.DataFrame:
    """Rows of a sweep as a DataFrame ordered by mode, then NP."""
    records = [
        {
            "mode": row.mode.value,
            "np": row.np,
            "tx": row.tx,
            "best_s": row.best_s if row.ok else None,
            "median_s": row.median_s if row.ok else None,
            "speedup": row.speedup,
            "efficiency": row.efficiency,
            "gain_pct": row.gain_pct,
            "error": row.error,
        }
        for row in report.rows
    ]
    frame = pl.DataFrame(records, schema=_SCHEMA) if records else pl.DataFrame(schema=_SCHEMA)
    return frame.sort(["mode", "np"])


def write_report(report: ScalingReport, path: Path | str) -> pl.DataFrame:
    """Write the TSV report and return the frame that was written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = report_frame(report)
    frame.write_csv(path, separator="\t")
    logger.info("Wrote %d report rows to %s", frame.height, path)
    return frame


def load_report(path: Path | str) -> pl.DataFrame:
    """Read a TSV report back.

    Raises:
        ParseError: If the file lacks report columns
    """
    path = Path(path)
    try:
        frame = pl.read_csv(path, separator="\t", infer_schema_length=0)
    except (OSError, pl.exceptions.ComputeError, pl.exceptions.NoDataError) as exc:
        logger.error("Cannot read report %s: %s", path, exc)
        raise ParseError(f"Cannot read report {path}: {exc}") from exc
    missing = [column for column in REPORT_COLUMNS if column not in frame.columns]
    if missing:
        logger.error("Report %s lacks columns %s", path, missing)
        raise ParseError(f"Report {path} lacks columns: {', '.join(missing)}")
    try:
        return frame.select([pl.col(name).cast(dtype, strict=True) for name, dtype in _SCHEMA.items()])
    except pl.exceptions.PolarsError as exc:
        raise ParseError(f"Report {path} has a non-numeric metric: {exc}") from exc


def recompute_metrics(frame: pl.DataFrame) -> pl.DataFrame:
    """Speedup, efficiency and gain derived from the ``best_s`` column alone.

    Speedup is filled where the NP=1 row of the same mode ran the same number
    of transmitters; gain where both modes have a time at that NP.
    """
    base = frame.filter(pl.col("np") == 1).select(
        "mode", pl.col("tx").alias("base_tx"), pl.col("best_s").alias("base_s")
    )
    mw = frame.filter(pl.col("mode") == "mw").select("np", pl.col("best_s").alias("mw_s"))
    mwd = frame.filter(pl.col("mode") == "mwd").select("np", pl.col("best_s").alias("mwd_s"))

    same_instance = pl.col("base_tx") == pl.col("tx")
    speedup = pl.when(same_instance).then(pl.col("base_s") / pl.col("best_s")).otherwise(None)
    return (
        frame.drop(["speedup", "efficiency", "gain_pct"])
        .join(base, on="mode", how="left")
        .join(mw, on="np", how="left")
        .join(mwd, on="np", how="left")
        .with_columns(speedup.alias("speedup"))
        .with_columns(
            (pl.col("speedup") / pl.col("np")).alias("efficiency"),
            ((pl.col("mw_s") - pl.col("mwd_s")) / pl.col("mw_s") * 100.0).alias("gain_pct"),
        )
        .select(list(REPORT_COLUMNS))
        .sort(["mode", "np"])
    )
