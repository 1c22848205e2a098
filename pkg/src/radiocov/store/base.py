"""Result-store interface and the per-transmitter table type.

A store holds one table of ``(easting, northing, loss_db)`` rows per
transmitter. Tables are created atomically and never modified afterwards.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from radiocov.engine import CoverageAccumulator
from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation import PathLossField
from radiocov.terrain import RasterGrid, RasterHeader
from radiocov.types import TransmitterConfig

__all__ = ["ResultTable", "ResultStore", "table_from_field"]

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class ResultTable:
    """Path-loss rows of one transmitter.

    Attributes:
        tx_id: Transmitter id, also the table name
        eastings: Cell-center eastings
        northings: Cell-center northings
        losses: Loss in dB per row
    """

    tx_id: str
    eastings: FloatArray = field(repr=False)
    northings: FloatArray = field(repr=False)
    losses: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        arrays = [np.asarray(getattr(self, name), dtype=np.float64) for name in ("eastings", "northings", "losses")]
        if not arrays[0].shape == arrays[1].shape == arrays[2].shape or arrays[0].ndim != 1:
            raise DomainError(f"Table {self.tx_id!r}: columns must be 1D arrays of equal length")
        for name, array in zip(("eastings", "northings", "losses"), arrays, strict=True):
            object.__setattr__(self, name, array)

    def __len__(self) -> int:
        return int(self.losses.shape[0])

    def cells(self, extent: RasterHeader) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        """Master (rows, cols) of every row.

        Raises:
            DomainError: If a row does not sit on a cell center of the extent
        """
        cs = extent.cellsize
        cols = np.rint((self.eastings - extent.xll) / cs - 0.5).astype(np.int64)
        rows = np.rint(extent.nrows - 0.5 - (self.northings - extent.yll) / cs).astype(np.int64)
        outside = (rows < 0) | (rows >= extent.nrows) | (cols < 0) | (cols >= extent.ncols)
        if outside.any():
            index = int(np.flatnonzero(outside)[0])
            raise DomainError(
                f"Table {self.tx_id!r}: row {index} at ({self.eastings[index]}, {self.northings[index]}) "
                "lies outside the extent"
            )
        return rows, cols

    def to_field(self, extent: RasterHeader) -> PathLossField | None:
        """Field spanning the rows' bounding box; None for an empty table."""
        if len(self) == 0:
            return None
        rows, cols = self.cells(extent)
        row0, col0 = int(rows.min()), int(cols.min())
        loss = np.full((int(rows.max()) - row0 + 1, int(cols.max()) - col0 + 1), extent.nodata, dtype=np.float64)
        loss[rows - row0, cols - col0] = self.losses
        return PathLossField(parent_offset=(row0, col0), loss_db=loss, nodata=extent.nodata)


def table_from_field(tx_id: str, path_loss: PathLossField, extent: RasterHeader) -> ResultTable:
    """Rows of every non-sentinel cell, in row-major order, at master cell centers."""
    rows, cols = np.nonzero(path_loss.valid_mask())
    master_rows = rows + path_loss.parent_offset[0]
    master_cols = cols + path_loss.parent_offset[1]
    cs = extent.cellsize
    return ResultTable(
        tx_id=tx_id,
        eastings=extent.xll + (master_cols + 0.5) * cs,
        northings=extent.yll + (extent.nrows - master_rows - 0.5) * cs,
        losses=path_loss.loss_db[rows, cols],
    )


class ResultStore(ABC):
    """Store of per-transmitter path-loss tables.

    Implementations must let distinct writers create distinct tables
    concurrently, reject a second table for the same id, and never expose a
    partially written table to readers.
    """

    @abstractmethod
    def put_table(self, tx_id: str, path_loss: PathLossField, extent: RasterHeader) -> None:
        """Atomically create the table of one transmitter.

        Raises:
            TableConflictError: If a table for ``tx_id`` already exists
            StoreError: On I/O failure
        """
        ...

    @abstractmethod
    def table_ids(self) -> list[str]:
        """Ids of all committed tables, sorted."""
        ...

    @abstractmethod
    def read_table(self, tx_id: str) -> ResultTable:
        """Rows of one committed table.

        Raises:
            StoreError: If the table does not exist or cannot be parsed
        """
        ...

    def has_table(self, tx_id: str) -> bool:
        return tx_id in self.table_ids()

    def scan_max(self, transmitters: Sequence[TransmitterConfig], extent: RasterHeader) -> RasterGrid:
        """Best-server coverage over every committed table.

        Raises:
            DomainError: If a table belongs to a transmitter not in ``transmitters``
        """
        by_id = {tx.id: tx for tx in transmitters}
        accumulator = CoverageAccumulator(extent)
        table_ids = self.table_ids()
        for tx_id in table_ids:
            tx = by_id.get(tx_id)
            if tx is None:
                logger.error("Table %s has no transmitter configuration", tx_id)
                raise DomainError(f"Table {tx_id!r} does not belong to any known transmitter")
            path_loss = self.read_table(tx_id).to_field(extent)
            if path_loss is not None:
                accumulator.add(tx.power_dbm, path_loss)
        logger.info("Scanned %d tables", len(table_ids))
        return accumulator.to_raster()
