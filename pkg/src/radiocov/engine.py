"""Serial coverage-prediction pipeline and best-server aggregation.

Per transmitter the stages run in a fixed order::

    extract_subgrid -> line_of_sight -> path_loss_field -> apply_antenna

:func:`predict_subgrid` is the part after the cut. It needs nothing but the two
windows, so parallel workers call it directly and produce the same floats as
the serial path.

Example:
    >>> coverage = predict_serial(dem, clutter, transmitters, diagrams, PropagationParams())
    >>> write_ascii_grid(coverage, "coverage.asc")
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np
import numpy.typing as npt

from radiocov.antenna import AntennaDiagram, apply_antenna
from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation import (
    MAX_FREQUENCY_MHZ,
    MIN_FREQUENCY_MHZ,
    ClutterLossTable,
    PathLossField,
    PropagationParams,
    in_frequency_window,
    line_of_sight,
    path_loss_field,
    transmitter_cell,
)
from radiocov.terrain import RasterGrid, RasterHeader, SubGrid, ensure_aligned, extract_subgrid
from radiocov.types import TransmitterConfig

__all__ = [
    "received_power",
    "cut_subgrids",
    "predict_subgrid",
    "predict_transmitter",
    "CoverageAccumulator",
    "aggregate",
    "validate_network",
    "predict_serial",
]

logger = get_logger(__name__)


def received_power(power_dbm: float, loss_db: float) -> float:
    """Signal strength at the receiver: transmit power minus path loss."""
    return power_dbm - loss_db


def cut_subgrids(dem: RasterGrid, clutter: RasterGrid, tx: TransmitterConfig) -> tuple[SubGrid, SubGrid]:
    """DEM and clutter windows covering a transmitter's radius."""
    return (
        extract_subgrid(dem, tx.position, tx.radius_m),
        extract_subgrid(clutter, tx.position, tx.radius_m),
    )


def predict_subgrid(
    dem: SubGrid,
    clutter: SubGrid,
    tx: TransmitterConfig,
    diagram: AntennaDiagram,
    params: PropagationParams,
    clutter_losses: ClutterLossTable | None = None,
) -> PathLossField:
    """Path loss of one transmitter from its already-cut windows."""
    params = params.for_transmitter(tx)
    los = line_of_sight(
        dem,
        transmitter_cell(dem, tx),
        tx.height_agl_m,
        params.rx_height_m,
        params.frequency_mhz,
        params.fresnel_clearance,
    )
    isotropic = path_loss_field(dem, clutter, los, tx, params, clutter_losses)
    return apply_antenna(isotropic, dem, diagram, tx.mount, tx, params.rx_height_m)


def predict_transmitter(
    dem: RasterGrid,
    clutter: RasterGrid,
    tx: TransmitterConfig,
    diagram: AntennaDiagram,
    params: PropagationParams,
    clutter_losses: ClutterLossTable | None = None,
) -> PathLossField:
    """Path loss of one transmitter over the full rasters.

    Raises:
        DomainError: If the transmitter lies outside the map or on nodata terrain
    """
    dem_sub, clutter_sub = cut_subgrids(dem, clutter, tx)
    return predict_subgrid(dem_sub, clutter_sub, tx, diagram, params, clutter_losses)


class CoverageAccumulator:
    """Running per-cell maximum of received power over the master extent.

    The result does not depend on the order in which fields are added.
    """

    def __init__(self, extent: RasterHeader) -> None:
        self.extent = extent
        self._best: npt.NDArray[np.float64] = np.full(extent.shape, np.nan, dtype=np.float64)
        self.count = 0

    def add(self, power_dbm: float, field: PathLossField) -> None:
        """Fold one transmitter's field into the maximum.

        Raises:
            DomainError: If the field does not fit inside the extent
        """
        row0, col0 = field.parent_offset
        nrows, ncols = field.shape
        if row0 + nrows > self.extent.nrows or col0 + ncols > self.extent.ncols:
            logger.error("Field %dx%d at %s exceeds extent %s", nrows, ncols, field.parent_offset, self.extent.shape)
            raise DomainError(
                f"Field of shape {field.shape} at offset {field.parent_offset} "
                f"does not fit the {self.extent.nrows}x{self.extent.ncols} extent"
            )
        power = np.where(field.valid_mask(), power_dbm - field.loss_db, np.nan)
        window = field.master_slices()
        self._best[window] = np.fmax(self._best[window], power)
        self.count += 1

    def to_raster(self) -> RasterGrid:
        """Coverage raster; cells no transmitter reached carry the nodata sentinel."""
        values = np.where(np.isnan(self._best), self.extent.nodata, self._best)
        return RasterGrid(header=self.extent, values=values)


def aggregate(fields: Iterable[tuple[TransmitterConfig, PathLossField]], extent: RasterHeader) -> RasterGrid:
    """Best-server received power over the extent."""
    accumulator = CoverageAccumulator(extent)
    for tx, field in fields:
        accumulator.add(tx.power_dbm, field)
    return accumulator.to_raster()


def validate_network(
    extent: RasterHeader,
    transmitters: Sequence[TransmitterConfig],
    diagrams: Mapping[str, AntennaDiagram],
) -> None:
    """Check ids are unique, frequencies lie in the model window, positions lie on
    the map and diagrams resolve.

    Raises:
        DomainError: On the first violation found
    """
    seen: set[str] = set()
    for tx in transmitters:
        if tx.id in seen:
            raise DomainError(f"Duplicate transmitter id {tx.id!r}")
        seen.add(tx.id)
        if not in_frequency_window(tx.frequency_mhz):
            logger.error("Transmitter %s frequency %s MHz is outside the model window", tx.id, tx.frequency_mhz)
            raise DomainError(
                f"Transmitter {tx.id!r} frequency {tx.frequency_mhz} MHz lies outside the "
                f"{MIN_FREQUENCY_MHZ:g}-{MAX_FREQUENCY_MHZ:g} MHz validity window"
            )
        if not extent.contains(tx.position):
            logger.error("Transmitter %s at (%s, %s) is off the map", tx.id, tx.position.easting, tx.position.northing)
            raise DomainError(
                f"Transmitter {tx.id!r} at ({tx.position.easting}, {tx.position.northing}) lies outside the map"
            )
        if tx.diagram_id not in diagrams:
            logger.error("Transmitter %s references unknown diagram %s", tx.id, tx.diagram_id)
            raise DomainError(f"Transmitter {tx.id!r} references unknown antenna diagram {tx.diagram_id!r}")


def predict_serial(
    dem: RasterGrid,
    clutter: RasterGrid,
    transmitters: Sequence[TransmitterConfig],
    diagrams: Mapping[str, AntennaDiagram],
    params: PropagationParams,
    clutter_losses: ClutterLossTable | None = None,
) -> RasterGrid:
    """Coverage prediction of a whole network in one process.

    Raises:
        RasterFormatError: If DEM and clutter are not aligned
        DomainError: On an invalid transmitter
    """
    ensure_aligned(dem, clutter)
    validate_network(dem.header, transmitters, diagrams)
    logger.info("Serial prediction of %d transmitters on %dx%d map", len(transmitters), dem.nrows, dem.ncols)

    accumulator = CoverageAccumulator(dem.header)
    for index, tx in enumerate(transmitters, start=1):
        field = predict_transmitter(dem, clutter, tx, diagrams[tx.diagram_id], params, clutter_losses)
        accumulator.add(tx.power_dbm, field)
        logger.debug("Transmitter %s done (%d/%d)", tx.id, index, len(transmitters))
    return accumulator.to_raster()
