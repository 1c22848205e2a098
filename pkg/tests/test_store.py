"""Tests for per-transmitter result tables and the filesystem store."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from radiocov.engine import aggregate, predict_transmitter
from radiocov.errors import DomainError, StoreError, TableConflictError
from radiocov.propagation import PathLossField
from radiocov.runtime import RunInputs
from radiocov.store import (
    TABLE_SUFFIX,
    FileResultStore,
    ResultTable,
    concurrent_write_stress,
    format_row,
    parse_rows,
    table_from_field,
)
from radiocov.terrain import RasterHeader

NODATA = -9999.0


@pytest.fixture
def extent() -> RasterHeader:
    return RasterHeader(ncols=6, nrows=5, xll=1000.0, yll=2000.0, cellsize=10.0)


@pytest.fixture
def sparse_field() -> PathLossField:
    loss = np.array([[101.25, NODATA, 99.0], [NODATA, 120.0 / 7.0, 88.5]])
    return PathLossField(parent_offset=(1, 2), loss_db=loss, nodata=NODATA)


def test_table_rows_sit_on_master_cell_centers(extent: RasterHeader, sparse_field: PathLossField) -> None:
    table = table_from_field("a", sparse_field, extent)
    assert len(table) == 4
    assert table.eastings.tolist() == [1025.0, 1045.0, 1035.0, 1045.0]
    assert table.northings.tolist() == [2035.0, 2035.0, 2025.0, 2025.0]
    assert table.to_field(extent).equals(  # type: ignore[union-attr]
        PathLossField(parent_offset=(1, 2), loss_db=sparse_field.loss_db, nodata=NODATA)
    )


def test_empty_table_has_no_field(extent: RasterHeader) -> None:
    empty = PathLossField(parent_offset=(0, 0), loss_db=np.full((2, 2), NODATA), nodata=NODATA)
    assert table_from_field("a", empty, extent).to_field(extent) is None


def test_rows_outside_the_extent_are_rejected(extent: RasterHeader) -> None:
    table = ResultTable(tx_id="a", eastings=np.array([5.0]), northings=np.array([2005.0]), losses=np.array([90.0]))
    with pytest.raises(DomainError, match="outside the extent"):
        table.cells(extent)


def test_put_and_read_preserve_losses_exactly(
    tmp_path: Path, extent: RasterHeader, sparse_field: PathLossField
) -> None:
    store = FileResultStore(tmp_path / "run")
    store.put_table("tx-1", sparse_field, extent)

    assert store.table_ids() == ["tx-1"]
    assert store.has_table("tx-1")
    read = store.read_table("tx-1")
    assert read.losses.tolist() == [101.25, 99.0, 120.0 / 7.0, 88.5]
    assert (tmp_path / "run" / f"tx-1{TABLE_SUFFIX}").read_text().splitlines()[0] == "1025.000000\t2035.000000\t101.25"
    assert not [path for path in (tmp_path / "run").iterdir() if path.name.endswith(".tmp")]


def test_second_table_for_an_id_conflicts(tmp_path: Path, extent: RasterHeader, sparse_field: PathLossField) -> None:
    store = FileResultStore(tmp_path)
    store.put_table("tx-1", sparse_field, extent)
    with pytest.raises(TableConflictError):
        store.put_table("tx-1", sparse_field, extent)
    # a second store on the same directory sees the committed table
    with pytest.raises(TableConflictError):
        FileResultStore(tmp_path).put_table("tx-1", sparse_field, extent)


def test_failed_write_frees_the_id_for_a_retry(
    tmp_path: Path, extent: RasterHeader, sparse_field: PathLossField, monkeypatch: pytest.MonkeyPatch
) -> None:
    store = FileResultStore(tmp_path)

    def broken(tx_id: str, path_loss: PathLossField, extent: RasterHeader) -> ResultTable:
        raise ValueError("field cannot be tabulated")

    monkeypatch.setattr("radiocov.store.filesystem.table_from_field", broken)
    with pytest.raises(ValueError, match="tabulated"):
        store.put_table("tx-1", sparse_field, extent)
    assert not store.has_table("tx-1")

    monkeypatch.undo()
    store.put_table("tx-1", sparse_field, extent)
    assert store.table_ids() == ["tx-1"]


@pytest.mark.parametrize("tx_id", ["", "a/b", ".hidden"])
def test_unusable_table_names(tmp_path: Path, extent: RasterHeader, sparse_field: PathLossField, tx_id: str) -> None:
    with pytest.raises(StoreError, match="table name"):
        FileResultStore(tmp_path).put_table(tx_id, sparse_field, extent)


def test_missing_and_truncated_tables(tmp_path: Path) -> None:
    store = FileResultStore(tmp_path)
    with pytest.raises(StoreError, match="No table"):
        store.read_table("absent")
    (tmp_path / f"cut{TABLE_SUFFIX}").write_text(format_row(1.0, 2.0, 3.0) + "4.0\t5.0")
    with pytest.raises(StoreError, match="truncated"):
        store.read_table("cut")


@pytest.mark.parametrize(("text", "message"), [("1\t2\n", "expected 3"), ("1\t2\tx\n", "non-numeric")])
def test_parse_rows_rejects_malformed_lines(text: str, message: str) -> None:
    with pytest.raises(StoreError, match=message):
        parse_rows("a", text)


def test_scan_max_equals_in_memory_aggregation(tmp_path: Path, small_inputs: RunInputs) -> None:
    inputs = small_inputs
    fields = [
        (
            tx,
            predict_transmitter(
                inputs.dem, inputs.clutter, tx, inputs.diagrams[tx.diagram_id], inputs.params, inputs.clutter_losses
            ),
        )
        for tx in inputs.transmitters
    ]
    store = FileResultStore(tmp_path)
    for tx, path_loss in fields:
        store.put_table(tx.id, path_loss, inputs.dem.header)

    scanned = store.scan_max(inputs.transmitters, inputs.dem.header)

    assert scanned.equals(aggregate(fields, inputs.dem.header))
    assert scanned.equals(inputs.serial())


def test_scan_max_rejects_foreign_tables(tmp_path: Path, small_inputs: RunInputs) -> None:
    store = FileResultStore(tmp_path)
    field = PathLossField(parent_offset=(0, 0), loss_db=np.full((2, 2), 90.0), nodata=NODATA)
    store.put_table("stranger", field, small_inputs.dem.header)
    with pytest.raises(DomainError, match="stranger"):
        store.scan_max(small_inputs.transmitters, small_inputs.dem.header)


@pytest.mark.parametrize("workers", [1, 4, 8])
def test_concurrent_writers_never_expose_partial_tables(workers: int) -> None:
    verdict = concurrent_write_stress(workers=workers, tables_per_worker=6)
    assert verdict.ok, verdict.violations
    assert verdict.tables == workers * 6
    assert verdict.conflicts == 0


def test_injected_duplicate_raises_exactly_one_conflict() -> None:
    verdict = concurrent_write_stress(workers=4, tables_per_worker=3, inject_duplicate=True)
    assert verdict.ok, verdict.violations
    assert verdict.conflicts == 1
    assert verdict.tables == 12


@pytest.mark.slow
def test_repeated_stress_trials_stay_complete(tmp_path: Path) -> None:
    for trial in range(20):
        verdict = concurrent_write_stress(workers=4, tables_per_worker=8, run_dir=tmp_path / f"trial{trial}")
        assert verdict.ok, (trial, verdict.violations)
        assert verdict.tables == 32
