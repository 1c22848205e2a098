"""Per-transmitter result tables and best-server scans over them."""

from __future__ import annotations

from radiocov.store.base import ResultStore, ResultTable, table_from_field
from radiocov.store.filesystem import TABLE_SUFFIX, FileResultStore, format_row, parse_rows
from radiocov.store.stress import StressVerdict, concurrent_write_stress

__all__ = [
    "ResultStore",
    "ResultTable",
    "table_from_field",
    "TABLE_SUFFIX",
    "FileResultStore",
    "format_row",
    "parse_rows",
    "StressVerdict",
    "concurrent_write_stress",
]
