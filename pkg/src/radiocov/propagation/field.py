"""Per-transmitter path-loss fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation.clutter import ClutterLossTable
from radiocov.propagation.los import LosMask, terrain_profile
from radiocov.propagation.models import MIN_DISTANCE_KM, nlos_loss
from radiocov.propagation.params import PropagationParams
from radiocov.terrain import SubGrid
from radiocov.types import TransmitterConfig

__all__ = ["PathLossField", "path_loss_field", "transmitter_cell", "slant_distances_km"]

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class PathLossField:
    """Path loss in dB over the sub-grid of one transmitter.

    Attributes:
        parent_offset: (row, col) of the first cell in the master grid
        loss_db: Loss per cell; ``nodata`` where the cell is out of range or has no data
        nodata: Sentinel value
    """

    parent_offset: tuple[int, int]
    loss_db: FloatArray = field(repr=False)
    nodata: float

    def __post_init__(self) -> None:
        loss = np.array(self.loss_db, dtype=np.float64, copy=True)
        if loss.ndim != 2 or loss.size == 0:
            raise DomainError(f"Path-loss field must be a non-empty 2D array, got shape {loss.shape}")
        row0, col0 = self.parent_offset
        if row0 < 0 or col0 < 0:
            raise DomainError(f"Field offset must be non-negative, got {self.parent_offset}")
        loss.flags.writeable = False
        object.__setattr__(self, "parent_offset", (int(row0), int(col0)))
        object.__setattr__(self, "loss_db", loss)

    @property
    def shape(self) -> tuple[int, int]:
        nrows, ncols = self.loss_db.shape
        return int(nrows), int(ncols)

    def valid_mask(self) -> npt.NDArray[np.bool_]:
        """True where the cell carries a loss value."""
        return np.asarray(self.loss_db != self.nodata)

    @property
    def valid_count(self) -> int:
        return int(np.count_nonzero(self.valid_mask()))

    def master_slices(self) -> tuple[slice, slice]:
        """Row and column slices selecting this field in the master grid."""
        row0, col0 = self.parent_offset
        nrows, ncols = self.shape
        return slice(row0, row0 + nrows), slice(col0, col0 + ncols)

    def equals(self, other: PathLossField) -> bool:
        """Exact equality of offset, sentinel and every value."""
        return (
            self.parent_offset == other.parent_offset
            and self.nodata == other.nodata
            and bool(np.array_equal(self.loss_db, other.loss_db))
        )


def transmitter_cell(dem: SubGrid, tx: TransmitterConfig) -> tuple[int, int]:
    """Window cell containing the transmitter.

    Raises:
        DomainError: If the transmitter lies outside the window
    """
    return dem.grid.header.cell_index(tx.position)


def slant_distances_km(dem: SubGrid, tx: TransmitterConfig, rx_height_m: float) -> tuple[FloatArray, FloatArray]:
    """Horizontal distances in meters and 3D distances in km from the antenna tip to every cell.

    The 3D distance joins the antenna tip (terrain plus mast) with the receiver
    point (terrain plus receiver height) and is floored at 1 m.
    """
    values = dem.grid.values
    tx_row, tx_col = transmitter_cell(dem, tx)
    eastings, northings = dem.grid.header.cell_centers()
    horizontal = np.hypot(eastings - tx.position.easting, northings - tx.position.northing)
    tip = values[tx_row, tx_col] + tx.height_agl_m
    vertical = (values + rx_height_m) - tip
    slant = np.hypot(horizontal, vertical) / 1000.0
    return horizontal, np.maximum(slant, MIN_DISTANCE_KM)


def path_loss_field(
    dem: SubGrid,
    clutter: SubGrid,
    los: LosMask,
    tx: TransmitterConfig,
    params: PropagationParams,
    clutter_losses: ClutterLossTable | None = None,
) -> PathLossField:
    """Isotropic path loss of one transmitter over its sub-grid.

    Every cell with its center inside the circular radius gets
    ``L0(d) + L_CLUT + (L_LOS(d) if LOS else max(L_LOS(d), L_NLOS))``; the rest, and
    cells with nodata terrain or clutter, carry the sentinel.

    Args:
        dem: Terrain window
        clutter: Clutter window with the same offset and shape
        los: LOS mask computed from ``dem``
        tx: Transmitter
        params: Model parameters; the transmitter's frequency and radius take precedence
        clutter_losses: Code-to-loss table (all codes 0 dB when omitted)

    Raises:
        DomainError: On mismatched window shapes or offsets
    """
    if dem.shape != clutter.shape or dem.parent_offset != clutter.parent_offset:
        logger.error("DEM window %s does not match clutter window %s", dem.shape, clutter.shape)
        raise DomainError(
            f"DEM window {dem.shape} at {dem.parent_offset} does not match "
            f"clutter window {clutter.shape} at {clutter.parent_offset}"
        )
    if los.los.shape != dem.shape:
        raise DomainError(f"LOS mask shape {los.los.shape} does not match DEM window {dem.shape}")

    params = params.for_transmitter(tx)
    f_mhz = params.frequency_mhz
    nodata = dem.grid.nodata
    table = clutter_losses if clutter_losses is not None else ClutterLossTable()

    horizontal, d_km = slant_distances_km(dem, tx, params.rx_height_m)
    valid = (horizontal <= params.radius_m) & ~dem.grid.nodata_mask() & ~clutter.grid.nodata_mask()

    log_f = 20.0 * math.log10(f_mhz)
    free_space = 32.45 + 20.0 * np.log10(d_km) + log_f
    line_of_sight = 42.64 + 26.0 * np.log10(d_km) + log_f
    clutter_db = np.zeros(dem.shape, dtype=np.float64)
    if valid.any():
        clutter_db[valid] = table.lookup(clutter.grid.values[valid])

    branch = line_of_sight.copy()
    nlos_cells = [cell for cell in los.obstacles if valid[cell]]
    for row, col in nlos_cells:
        profile, _, _ = terrain_profile(dem, los.tx_cell, (row, col), tx.height_agl_m, params.rx_height_m)
        obstructed = nlos_loss(
            profile, los.obstacles[(row, col)], float(d_km[row, col]), f_mhz, params, tx.height_agl_m
        )
        # an obstructed cell never loses less than a clear one at the same distance
        branch[row, col] = max(float(line_of_sight[row, col]), obstructed)

    loss = np.where(valid, free_space + clutter_db + branch, nodata)
    logger.debug(
        "Path loss for %s: %d cells in range, %d NLOS",
        tx.id,
        int(np.count_nonzero(valid)),
        len(nlos_cells),
    )
    return PathLossField(parent_offset=dem.parent_offset, loss_db=loss, nodata=nodata)
