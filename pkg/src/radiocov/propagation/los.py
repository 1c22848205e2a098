"""Line-of-sight determination over a DEM window.

For every target cell the walk from the transmitter cell is the supercover of
the segment joining the two cell centers: every cell whose closed square
touches the segment, ordered along the direction of travel. A target is NLOS
when at least one intermediate terrain sample rises above the lower boundary
of the first Fresnel zone of the direct antenna-to-receiver ray.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation.models import SPEED_OF_LIGHT_MHZ_M, TerrainProfile
from radiocov.terrain import SubGrid

__all__ = [
    "walk_offsets",
    "walk_cells",
    "terrain_profile",
    "obstructing_samples",
    "LosMask",
    "line_of_sight",
]

logger = get_logger(__name__)

IntArray = npt.NDArray[np.int64]
Cell = tuple[int, int]


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


@lru_cache(maxsize=1 << 16)
def walk_offsets(drow: int, dcol: int) -> tuple[IntArray, IntArray]:
    """Relative (row, col) offsets of the walk from (0, 0) to (drow, dcol).

    Both endpoints are included. Exact integer arithmetic on doubled
    coordinates (cell (r, c) spans [2c, 2c+2] x [2r, 2r+2], centers are odd)
    makes corner crossings deterministic: all cells touching the corner are
    visited. The result depends only on the offset, so it is cached.
    """
    row_step = 1 if drow >= 0 else -1
    col_step = 1 if dcol >= 0 else -1
    rows: list[int] = []
    cols: list[int] = []

    if dcol == 0:
        for r in range(0, drow + row_step, row_step):
            rows.append(r)
            cols.append(0)
    else:
        x0, y0 = 1, 1
        x1, y1 = 2 * dcol + 1, 2 * drow + 1
        dx, dy = x1 - x0, y1 - y0
        sign = 1 if dx > 0 else -1
        den = abs(dx)
        xmin, xmax = min(x0, x1), max(x0, x1)
        rmin, rmax = min(0, drow), max(0, drow)
        for c in range(0, dcol + col_step, col_step):
            xa = max(2 * c, xmin)
            xb = min(2 * c + 2, xmax)
            # y * |dx| at both strip ends
            na = (y0 * dx + (xa - x0) * dy) * sign
            nb = (y0 * dx + (xb - x0) * dy) * sign
            lo = max(_ceil_div(min(na, nb), 2 * den) - 1, rmin)
            hi = min(max(na, nb) // (2 * den), rmax)
            strip = range(lo, hi + 1) if row_step > 0 else range(hi, lo - 1, -1)
            for r in strip:
                rows.append(r)
                cols.append(c)

    row_arr = np.array(rows, dtype=np.int64)
    col_arr = np.array(cols, dtype=np.int64)
    row_arr.flags.writeable = False
    col_arr.flags.writeable = False
    return row_arr, col_arr


def walk_cells(tx_cell: Cell, target: Cell) -> tuple[IntArray, IntArray]:
    """Absolute (rows, cols) of the intermediate cells between two cells, in walk order."""
    rows, cols = walk_offsets(target[0] - tx_cell[0], target[1] - tx_cell[1])
    return rows[1:-1] + tx_cell[0], cols[1:-1] + tx_cell[1]


def terrain_profile(
    dem: SubGrid,
    tx_cell: Cell,
    target: Cell,
    tx_height_m: float,
    rx_height_m: float,
) -> tuple[TerrainProfile, IntArray, IntArray]:
    """Terrain samples along the walk to ``target`` and the cells they come from.

    Each intermediate cell center is projected onto the transmitter-to-target
    segment; its distance along the segment is the profile distance.
    """
    values = dem.grid.values
    cs = dem.grid.cellsize
    rows, cols = walk_cells(tx_cell, target)
    drow, dcol = target[0] - tx_cell[0], target[1] - tx_cell[1]
    total = float(np.hypot(drow, dcol)) * cs
    norm2 = float(drow * drow + dcol * dcol)
    t = ((rows - tx_cell[0]) * drow + (cols - tx_cell[1]) * dcol) / norm2
    t = np.clip(t, 0.0, 1.0)
    profile = TerrainProfile(
        distances_m=t * total,
        heights_m=values[rows, cols],
        tx_tip_m=float(values[tx_cell]) + tx_height_m,
        rx_point_m=float(values[target]) + rx_height_m,
        total_m=total,
    )
    return profile, rows, cols


def obstructing_samples(
    profile: TerrainProfile,
    f_mhz: float,
    clearance: float = 1.0,
    nodata: float | None = None,
) -> npt.NDArray[np.intp]:
    """Indices of profile samples that intrude into the first Fresnel zone.

    A sample obstructs when its terrain height exceeds the direct ray height
    minus ``clearance`` times the first Fresnel radius at that point. Nodata
    samples never obstruct.
    """
    if len(profile) == 0:
        return np.empty(0, dtype=np.intp)
    wavelength = SPEED_OF_LIGHT_MHZ_M / f_mhz
    d1 = profile.distances_m
    d2 = profile.total_m - d1
    r1 = np.sqrt(np.clip(wavelength * d1 * d2 / profile.total_m, 0.0, None))
    sightline = profile.tx_tip_m + (d1 / profile.total_m) * (profile.rx_point_m - profile.tx_tip_m)
    blocked = profile.heights_m > sightline - clearance * r1
    if nodata is not None:
        blocked &= profile.heights_m != nodata
    return np.flatnonzero(blocked)


@dataclass(frozen=True, slots=True, eq=False)
class LosMask:
    """LOS/NLOS flags over a DEM window.

    Attributes:
        tx_cell: Transmitter cell in window coordinates
        los: True where the target cell is in line of sight
        obstacles: For every NLOS cell, the profile indices of its obstacles in walk order
    """

    tx_cell: Cell
    los: npt.NDArray[np.bool_] = field(repr=False)
    obstacles: dict[Cell, tuple[int, ...]] = field(repr=False)

    def is_los(self, row: int, col: int) -> bool:
        return bool(self.los[row, col])

    def obstacles_at(self, row: int, col: int) -> tuple[int, ...]:
        """Obstacle indices on the walk to (row, col); empty when LOS."""
        return self.obstacles.get((row, col), ())

    def obstacle_cells(self, row: int, col: int) -> list[Cell]:
        """Window cells of the obstacles on the walk to (row, col), in walk order."""
        rows, cols = walk_cells(self.tx_cell, (row, col))
        return [(int(rows[i]), int(cols[i])) for i in self.obstacles_at(row, col)]

    @property
    def nlos_count(self) -> int:
        return len(self.obstacles)


def line_of_sight(
    dem: SubGrid,
    tx_cell: Cell,
    tx_height_m: float,
    rx_height_m: float,
    f_mhz: float,
    clearance: float = 1.0,
) -> LosMask:
    """Classify every cell of a DEM window as LOS or NLOS from the transmitter.

    Args:
        dem: Terrain window
        tx_cell: Transmitter cell (row, col) in window coordinates
        tx_height_m: Antenna height above ground
        rx_height_m: Receiver height above ground
        f_mhz: Frequency, fixing the Fresnel zone size
        clearance: Fraction of the first Fresnel radius that must stay clear

    Raises:
        DomainError: If ``tx_cell`` is outside the window or sits on nodata terrain
    """
    nrows, ncols = dem.shape
    tr, tc = tx_cell
    if not (0 <= tr < nrows and 0 <= tc < ncols):
        logger.error("Transmitter cell %s outside %dx%d window", tx_cell, nrows, ncols)
        raise DomainError(f"Transmitter cell {tx_cell} lies outside the {nrows}x{ncols} window")
    nodata = dem.grid.nodata
    if dem.grid.values[tr, tc] == nodata:
        raise DomainError(f"Transmitter cell {tx_cell} has no terrain data")

    los = np.ones((nrows, ncols), dtype=bool)
    obstacles: dict[Cell, tuple[int, ...]] = {}
    for row in range(nrows):
        for col in range(ncols):
            if (row, col) == tx_cell or dem.grid.values[row, col] == nodata:
                continue
            profile, _, _ = terrain_profile(dem, tx_cell, (row, col), tx_height_m, rx_height_m)
            blocked = obstructing_samples(profile, f_mhz, clearance, nodata)
            if blocked.size:
                los[row, col] = False
                obstacles[(row, col)] = tuple(int(i) for i in blocked)

    logger.debug("LOS walk over %dx%d window: %d NLOS cells", nrows, ncols, len(obstacles))
    return LosMask(tx_cell=tx_cell, los=los, obstacles=obstacles)
