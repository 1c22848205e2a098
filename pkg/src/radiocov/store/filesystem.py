"""Directory-per-run result store.

Layout::

    <run_dir>/<tx_id>.tsv      one committed table per transmitter
    <run_dir>/.<tx_id>.*.tmp   table being written (never read)

Rows are ``easting<TAB>northing<TAB>loss_db``. Coordinates carry 6 decimals;
the loss is written in its shortest round-trip form so a table reproduces the
computed float exactly.

A table is written to a temp file, fsynced, then hard-linked to its final
name. The link fails when the name already exists, which makes the commit both
atomic and exclusive, also across processes sharing the directory.
"""

from __future__ import annotations

import os
import tempfile
import threading
from pathlib import Path

import numpy as np

from radiocov.errors import StoreError, TableConflictError
from radiocov.logging import get_logger
from radiocov.propagation import PathLossField
from radiocov.store.base import ResultStore, ResultTable, table_from_field
from radiocov.terrain import RasterHeader

__all__ = ["TABLE_SUFFIX", "FileResultStore", "format_row", "parse_rows"]

logger = get_logger(__name__)

TABLE_SUFFIX = ".tsv"


def format_row(easting: float, northing: float, loss_db: float) -> str:
    """One table line, newline included."""
    return f"{easting:.6f}\t{northing:.6f}\t{float(loss_db)!r}\n"


def parse_rows(tx_id: str, text: str) -> ResultTable:
    """Parse table text.

    Raises:
        StoreError: On a malformed or truncated line
    """
    if text and not text.endswith("\n"):
        raise StoreError(f"Table {tx_id!r} is truncated: last line has no newline")
    lines = text.splitlines()
    eastings = np.empty(len(lines), dtype=np.float64)
    northings = np.empty(len(lines), dtype=np.float64)
    losses = np.empty(len(lines), dtype=np.float64)
    for index, line in enumerate(lines):
        parts = line.split("\t")
        if len(parts) != 3:
            raise StoreError(f"Table {tx_id!r} line {index + 1}: expected 3 tab-separated fields, got {len(parts)}")
        try:
            eastings[index], northings[index], losses[index] = (float(part) for part in parts)
        except ValueError:
            raise StoreError(f"Table {tx_id!r} line {index + 1}: non-numeric field in {line!r}") from None
    return ResultTable(tx_id=tx_id, eastings=eastings, northings=northings, losses=losses)


def _fsync_dir(directory: Path) -> None:
    try:
        fd = os.open(directory, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(fd)
    except OSError:
        pass
    finally:
        os.close(fd)


class FileResultStore(ResultStore):
    """Result store on the local filesystem.

    Args:
        run_dir: Directory of this run's tables (created if missing)
        fsync: Flush every table to disk before committing it

    Example:
        >>> store = FileResultStore("runs/2024-06-01")
        >>> store.put_table("tx-001", field, dem.header)
        >>> store.table_ids()
        ['tx-001']
    """

    def __init__(self, run_dir: Path | str, fsync: bool = True) -> None:
        self.run_dir = Path(run_dir)
        self.fsync = fsync
        try:
            self.run_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            logger.error("Cannot create store directory %s: %s", self.run_dir, exc)
            raise StoreError(f"Cannot create store directory {self.run_dir}: {exc}") from exc
        self._claims: set[str] = set()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"FileResultStore({str(self.run_dir)!r})"

    def table_path(self, tx_id: str) -> Path:
        return self.run_dir / f"{tx_id}{TABLE_SUFFIX}"

    def _claim(self, tx_id: str) -> None:
        with self._lock:
            if tx_id in self._claims or self.table_path(tx_id).exists():
                logger.error("Duplicate table for transmitter %s", tx_id)
                raise TableConflictError(f"Table for transmitter {tx_id!r} already exists in {self.run_dir}")
            self._claims.add(tx_id)

    def _release(self, tx_id: str) -> None:
        with self._lock:
            self._claims.discard(tx_id)

    def put_table(self, tx_id: str, path_loss: PathLossField, extent: RasterHeader) -> None:
        if not tx_id or "/" in tx_id or "\\" in tx_id or tx_id.startswith("."):
            raise StoreError(f"Transmitter id {tx_id!r} cannot be used as a table name")
        self._claim(tx_id)
        keep_claim = False
        try:
            table = table_from_field(tx_id, path_loss, extent)
            text = "".join(
                format_row(e, n, loss)
                for e, n, loss in zip(
                    table.eastings.tolist(), table.northings.tolist(), table.losses.tolist(), strict=True
                )
            )
            self._commit(tx_id, text)
            keep_claim = True
        except TableConflictError:
            keep_claim = True
            raise
        except OSError as exc:
            logger.error("Writing table %s failed: %s", tx_id, exc)
            raise StoreError(f"Cannot write table {tx_id!r} to {self.run_dir}: {exc}") from exc
        finally:
            # the id stays claimed once a table for it exists on disk
            if not keep_claim:
                self._release(tx_id)
        logger.debug("Committed table %s (%d rows)", tx_id, len(table))

    def _commit(self, tx_id: str, text: str) -> None:
        final = self.table_path(tx_id)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{tx_id}.", suffix=".tmp", dir=self.run_dir)
        tmp = Path(tmp_name)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
                handle.flush()
                if self.fsync:
                    os.fsync(handle.fileno())
            try:
                os.link(tmp, final)
            except FileExistsError:
                raise TableConflictError(f"Table for transmitter {tx_id!r} already exists in {self.run_dir}") from None
            if self.fsync:
                _fsync_dir(self.run_dir)
        finally:
            try:
                tmp.unlink()
            except OSError:
                pass

    def table_ids(self) -> list[str]:
        try:
            names = sorted(
                path.name[: -len(TABLE_SUFFIX)]
                for path in self.run_dir.iterdir()
                if path.name.endswith(TABLE_SUFFIX) and not path.name.startswith(".")
            )
        except OSError as exc:
            raise StoreError(f"Cannot list tables in {self.run_dir}: {exc}") from exc
        return names

    def has_table(self, tx_id: str) -> bool:
        return self.table_path(tx_id).exists()

    def read_table(self, tx_id: str) -> ResultTable:
        path = self.table_path(tx_id)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise StoreError(f"No table for transmitter {tx_id!r} in {self.run_dir}") from None
        except OSError as exc:
            raise StoreError(f"Cannot read table {path}: {exc}") from exc
        return parse_rows(tx_id, text)
