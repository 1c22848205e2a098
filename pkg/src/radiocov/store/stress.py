"""Concurrent-writer audit of a result store."""

from __future__ import annotations

import tempfile
import threading
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from radiocov.errors import StoreError, TableConflictError
from radiocov.logging import get_logger
from radiocov.propagation import PathLossField
from radiocov.store.base import ResultStore
from radiocov.store.filesystem import FileResultStore
from radiocov.terrain import DEFAULT_NODATA, RasterHeader

__all__ = ["StressVerdict", "concurrent_write_stress"]

logger = get_logger(__name__)


@dataclass(slots=True)
class StressVerdict:
    """Outcome of :func:`concurrent_write_stress`.

    Attributes:
        tables: Committed tables found after all writers finished
        conflicts: Conflict errors raised to writers
        reads: Tables read by the polling reader while writers ran
        violations: Everything that went wrong; empty on success
    """

    tables: int = 0
    conflicts: int = 0
    reads: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _stress_field(seed: int, size: int) -> PathLossField:
    rng = np.random.default_rng(seed)
    loss = rng.uniform(60.0, 160.0, size=(size, size))
    return PathLossField(parent_offset=(0, 0), loss_db=loss, nodata=DEFAULT_NODATA)


def concurrent_write_stress(
    workers: int,
    tables_per_worker: int,
    store_factory: Callable[[Path], ResultStore] = FileResultStore,
    run_dir: Path | str | None = None,
    field_size: int = 16,
    inject_duplicate: bool = False,
) -> StressVerdict:
    """Let ``workers`` writers commit ``tables_per_worker`` tables each while a reader polls.

    Every table a reader sees must be complete; afterwards exactly
    ``workers * tables_per_worker`` tables must exist, each with the expected rows.
    With ``inject_duplicate`` one extra write reuses an existing id and exactly
    one conflict error is expected.
    """
    verdict = StressVerdict()
    with tempfile.TemporaryDirectory(prefix="radiocov-stress-") as scratch:
        store = store_factory(Path(run_dir) if run_dir is not None else Path(scratch))
        extent = RasterHeader(ncols=field_size, nrows=field_size, xll=0.0, yll=0.0, cellsize=25.0)
        expected_rows = field_size * field_size

        jobs: list[list[tuple[str, int]]] = [
            [(f"w{w:02d}-t{k:03d}", w * tables_per_worker + k) for k in range(tables_per_worker)]
            for w in range(workers)
        ]
        if inject_duplicate:
            jobs[(1 % workers)].append(jobs[0][0])

        conflicts: list[str] = []
        errors: list[str] = []
        done = threading.Event()
        lock = threading.Lock()

        def write(batch: list[tuple[str, int]]) -> None:
            for tx_id, seed in batch:
                try:
                    store.put_table(tx_id, _stress_field(seed, field_size), extent)
                except TableConflictError:
                    with lock:
                        conflicts.append(tx_id)
                except StoreError as exc:
                    with lock:
                        errors.append(f"writer failed on {tx_id}: {exc}")

        def poll() -> None:
            while True:
                finished = done.is_set()
                for tx_id in store.table_ids():
                    try:
                        rows = len(store.read_table(tx_id))
                    except StoreError as exc:
                        verdict.violations.append(f"partial read of {tx_id}: {exc}")
                        continue
                    verdict.reads += 1
                    if rows != expected_rows:
                        verdict.violations.append(f"partial read of {tx_id}: {rows} of {expected_rows} rows")
                if finished:
                    return
                done.wait(0.001)

        reader = threading.Thread(target=poll, name="radiocov-stress-reader", daemon=True)
        reader.start()
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="radiocov-stress") as pool:
            list(pool.map(write, jobs))
        done.set()
        reader.join()

        verdict.violations.extend(errors)
        verdict.conflicts = len(conflicts)
        expected_conflicts = 1 if inject_duplicate else 0
        if verdict.conflicts != expected_conflicts:
            verdict.violations.append(f"expected {expected_conflicts} conflict errors, observed {verdict.conflicts}")

        table_ids = store.table_ids()
        verdict.tables = len(table_ids)
        expected_tables = workers * tables_per_worker
        if verdict.tables != expected_tables:
            verdict.violations.append(f"expected {expected_tables} tables, found {verdict.tables}")
        for tx_id in table_ids:
            table = store.read_table(tx_id)
            if len(table) != expected_rows:
                verdict.violations.append(f"table {tx_id} has {len(table)} of {expected_rows} rows")

    logger.info(
        "Store stress W=%d K=%d: %d tables, %d conflicts, %d violations",
        workers,
        tables_per_worker,
        verdict.tables,
        verdict.conflicts,
        len(verdict.violations),
    )
    return verdict
