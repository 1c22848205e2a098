"""Application of an antenna diagram to an isotropic path-loss field."""

from __future__ import annotations

import math

import numpy as np

from radiocov.antenna.diagram import AntennaDiagram, pattern_lookup
from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation import PathLossField, transmitter_cell
from radiocov.terrain import SubGrid
from radiocov.types import AntennaMount, GeoPoint, TransmitterConfig

__all__ = ["angles_to", "apply_antenna"]

logger = get_logger(__name__)


def _wrap(angle_deg: float) -> float:
    wrapped = angle_deg % 360.0
    return 0.0 if wrapped >= 360.0 else wrapped


def angles_to(
    tx: GeoPoint,
    tx_total_height_m: float,
    rx: GeoPoint,
    rx_total_height_m: float,
    mount: AntennaMount,
) -> tuple[float, float]:
    """Pattern lookup angles of a receiver point as seen from the antenna.

    Args:
        tx: Antenna position
        tx_total_height_m: Antenna tip elevation (terrain plus mast)
        rx: Receiver position
        rx_total_height_m: Receiver elevation (terrain plus receiver height)
        mount: Azimuth and tilts of the antenna

    Returns:
        (horizontal, vertical) angles in [0, 360): bearing minus azimuth, and
        depression below the horizon minus the total downtilt

    Raises:
        DomainError: If the two points share the same horizontal position
    """
    dx = rx.easting - tx.easting
    dy = rx.northing - tx.northing
    horizontal = math.hypot(dx, dy)
    if horizontal == 0.0:
        logger.error("angles_to called with coincident points (%s, %s)", tx.easting, tx.northing)
        raise DomainError(f"Receiver coincides with transmitter at ({tx.easting}, {tx.northing})")
    bearing = math.degrees(math.atan2(dx, dy))
    depression = math.degrees(math.atan2(tx_total_height_m - rx_total_height_m, horizontal))
    return _wrap(bearing - mount.azimuth_deg), _wrap(depression - mount.total_tilt_deg)


def apply_antenna(
    field: PathLossField,
    dem: SubGrid,
    diagram: AntennaDiagram,
    mount: AntennaMount,
    tx: TransmitterConfig,
    rx_height_m: float = 1.5,
) -> PathLossField:
    """Turn an isotropic field into the field of a real antenna.

    Per cell: ``loss - gain + H[horizontal angle] + V[vertical angle]`` with
    linearly interpolated pattern lookups. Sentinel cells are left unchanged.

    Raises:
        DomainError: If the field and the DEM window do not line up
    """
    if field.shape != dem.shape or field.parent_offset != dem.parent_offset:
        logger.error("Field %s does not match DEM window %s", field.shape, dem.shape)
        raise DomainError(
            f"Field {field.shape} at {field.parent_offset} does not match DEM window {dem.shape} at {dem.parent_offset}"
        )

    values = dem.grid.values
    tx_row, tx_col = transmitter_cell(dem, tx)
    tip = values[tx_row, tx_col] + tx.height_agl_m

    eastings, northings = dem.grid.header.cell_centers()
    dx = eastings - tx.position.easting
    dy = northings - tx.position.northing
    bearing = np.degrees(np.arctan2(dx, dy))
    depression = np.degrees(np.arctan2(tip - (values + rx_height_m), np.hypot(dx, dy)))

    horizontal = pattern_lookup(diagram.horizontal, bearing - mount.azimuth_deg)
    vertical = pattern_lookup(diagram.vertical, depression - mount.total_tilt_deg)

    valid = field.valid_mask()
    loss = np.where(valid, field.loss_db - diagram.gain_dbi + horizontal + vertical, field.nodata)
    logger.debug("Applied diagram %s to %s (%d cells)", diagram.name, tx.id, int(np.count_nonzero(valid)))
    return PathLossField(parent_offset=field.parent_offset, loss_db=loss, nodata=field.nodata)
