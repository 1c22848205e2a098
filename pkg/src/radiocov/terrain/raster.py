"""Georeferenced regular square grids.

A raster is a row-major 2D matrix of float64 samples plus a header that places
it on the map. Row 0 is the northernmost row. The geographical location of a
cell is always derived from the header and the cell offset, never stored per
cell, so a whole DEM costs one float per pixel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from radiocov.errors import DomainError, RasterFormatError
from radiocov.logging import get_logger
from radiocov.types import GeoPoint

__all__ = [
    "DEFAULT_NODATA",
    "RasterHeader",
    "RasterGrid",
    "SubGrid",
    "extract_subgrid",
    "ensure_aligned",
]

logger = get_logger(__name__)

DEFAULT_NODATA = -9999.0

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class RasterHeader:
    """Placement of a raster on the map.

    Attributes:
        ncols: Number of columns
        nrows: Number of rows
        xll: Easting of the lower-left corner in meters
        yll: Northing of the lower-left corner in meters
        cellsize: Cell edge length in meters
        nodata: Sentinel value marking cells without data
    """

    ncols: int
    nrows: int
    xll: float
    yll: float
    cellsize: float
    nodata: float = DEFAULT_NODATA

    def __post_init__(self) -> None:
        if self.ncols < 1 or self.nrows < 1:
            raise DomainError(f"Raster must have at least one cell, got {self.nrows}x{self.ncols}")
        if not (math.isfinite(self.cellsize) and self.cellsize > 0):
            raise DomainError(f"cellsize must be positive, got {self.cellsize}")
        if not (math.isfinite(self.xll) and math.isfinite(self.yll)):
            raise DomainError(f"Lower-left corner must be finite, got ({self.xll}, {self.yll})")

    @property
    def shape(self) -> tuple[int, int]:
        """(nrows, ncols)."""
        return (self.nrows, self.ncols)

    @property
    def cell_count(self) -> int:
        """Total pixel count."""
        return self.nrows * self.ncols

    @property
    def xmax(self) -> float:
        return self.xll + self.ncols * self.cellsize

    @property
    def ymax(self) -> float:
        return self.yll + self.nrows * self.cellsize

    def cell_center(self, row: int, col: int) -> GeoPoint:
        """Map coordinates of the center of cell (row, col)."""
        return GeoPoint(
            easting=self.xll + (col + 0.5) * self.cellsize,
            northing=self.yll + (self.nrows - row - 0.5) * self.cellsize,
        )

    def cell_centers(self) -> tuple[FloatArray, FloatArray]:
        """Eastings and northings of every cell center, each shaped (nrows, ncols)."""
        cols = np.arange(self.ncols, dtype=np.float64)
        rows = np.arange(self.nrows, dtype=np.float64)
        eastings = self.xll + (cols + 0.5) * self.cellsize
        northings = self.yll + (self.nrows - rows - 0.5) * self.cellsize
        east_grid, north_grid = np.meshgrid(eastings, northings)
        return east_grid, north_grid

    def contains(self, point: GeoPoint) -> bool:
        """Whether the point lies inside the closed extent."""
        return self.xll <= point.easting <= self.xmax and self.yll <= point.northing <= self.ymax

    def cell_index(self, point: GeoPoint) -> tuple[int, int]:
        """(row, col) of the cell containing a point.

        Points on the eastern or southern-most boundary belong to the last cell.

        Raises:
            DomainError: If the point lies outside the extent
        """
        if not self.contains(point):
            raise DomainError(
                f"Point ({point.easting}, {point.northing}) lies outside the raster extent "
                f"[{self.xll}, {self.xmax}] x [{self.yll}, {self.ymax}]"
            )
        col = int(math.floor((point.easting - self.xll) / self.cellsize))
        row = int(math.floor((self.ymax - point.northing) / self.cellsize))
        return min(row, self.nrows - 1), min(col, self.ncols - 1)

    def same_lattice(self, other: RasterHeader) -> bool:
        """Whether two headers describe the same extent and resolution."""
        return (
            self.ncols == other.ncols
            and self.nrows == other.nrows
            and self.xll == other.xll
            and self.yll == other.yll
            and self.cellsize == other.cellsize
        )


@dataclass(frozen=True, slots=True, eq=False)
class RasterGrid:
    """Immutable georeferenced grid of float64 samples.

    The values array is copied on construction and made read-only, so a grid
    can be shared between threads or shipped to workers without copying again.

    Attributes:
        header: Placement of the grid
        values: (nrows, ncols) array, row 0 northernmost
    """

    header: RasterHeader
    values: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.shape != self.header.shape:
            raise RasterFormatError(
                f"Values shape {values.shape} does not match header shape {self.header.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def ncols(self) -> int:
        return self.header.ncols

    @property
    def nrows(self) -> int:
        return self.header.nrows

    @property
    def cellsize(self) -> float:
        return self.header.cellsize

    @property
    def nodata(self) -> float:
        return self.header.nodata

    def nodata_mask(self) -> npt.NDArray[np.bool_]:
        """True where a cell carries the nodata sentinel."""
        return np.asarray(self.values == self.header.nodata)

    def value_at(self, point: GeoPoint) -> float:
        """Sample of the cell containing a point."""
        row, col = self.header.cell_index(point)
        return float(self.values[row, col])

    def equals(self, other: RasterGrid, atol: float = 0.0) -> bool:
        """Header equality plus value equality within ``atol``."""
        if self.header != other.header:
            return False
        if atol == 0.0:
            return bool(np.array_equal(self.values, other.values))
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    @classmethod
    def filled(cls, header: RasterHeader, value: float | None = None) -> RasterGrid:
        """Grid of constant value; the nodata sentinel when ``value`` is None."""
        fill = header.nodata if value is None else value
        return cls(header=header, values=np.full(header.shape, fill, dtype=np.float64))


@dataclass(frozen=True, slots=True, eq=False)
class SubGrid:
    """A window of a master raster.

    Attributes:
        parent_offset: (row, col) of the window's first cell in the master grid
        grid: The window itself, georeferenced on its own header
    """

    parent_offset: tuple[int, int]
    grid: RasterGrid

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.header.shape

    def master_slices(self) -> tuple[slice, slice]:
        """Row and column slices selecting this window in the master grid."""
        row0, col0 = self.parent_offset
        nrows, ncols = self.shape
        return slice(row0, row0 + nrows), slice(col0, col0 + ncols)


def extract_subgrid(master: RasterGrid, center: GeoPoint, radius: float) -> SubGrid:
    """Cut the bounding square of a transmission radius out of a raster.

    Selects every cell whose center lies within ``radius`` of ``center`` along both
    axes, clamped to the map borders. The cell containing ``center`` is always
    included, so a radius below half a cell yields a 1x1 window. The circular
    radius test is left to the per-cell path-loss computation.

    Args:
        master: Raster to cut from
        center: Transmitter position
        radius: Transmission radius in meters

    Returns:
        The window and its offset in ``master``

    Raises:
        DomainError: If ``center`` is outside the extent or ``radius`` is not positive
    """
    header = master.header
    if not radius > 0:
        logger.error("Cannot extract sub-grid with non-positive radius %s", radius)
        raise DomainError(f"radius must be positive, got {radius}")
    if not header.contains(center):
        logger.error("Sub-grid center (%s, %s) outside master extent", center.easting, center.northing)
        raise DomainError(f"Center ({center.easting}, {center.northing}) lies outside the master extent")

    cs = header.cellsize
    center_row, center_col = header.cell_index(center)

    col_min = math.ceil((center.easting - radius - header.xll) / cs - 0.5)
    col_max = math.floor((center.easting + radius - header.xll) / cs - 0.5)
    row_min = math.ceil(header.nrows - 0.5 - (center.northing + radius - header.yll) / cs)
    row_max = math.floor(header.nrows - 0.5 - (center.northing - radius - header.yll) / cs)

    col_min = max(0, min(col_min, center_col))
    col_max = min(header.ncols - 1, max(col_max, center_col))
    row_min = max(0, min(row_min, center_row))
    row_max = min(header.nrows - 1, max(row_max, center_row))

    sub_header = RasterHeader(
        ncols=col_max - col_min + 1,
        nrows=row_max - row_min + 1,
        xll=header.xll + col_min * cs,
        yll=header.yll + (header.nrows - row_max - 1) * cs,
        cellsize=cs,
        nodata=header.nodata,
    )
    values = master.values[row_min : row_max + 1, col_min : col_max + 1]

    logger.debug(
        "Extracted %dx%d sub-grid at offset (%d, %d) for radius %.1f m",
        sub_header.nrows,
        sub_header.ncols,
        row_min,
        col_min,
        radius,
    )
    return SubGrid(parent_offset=(row_min, col_min), grid=RasterGrid(header=sub_header, values=values))


def ensure_aligned(dem: RasterGrid, clutter: RasterGrid) -> None:
    """Require DEM and clutter to cover the same area at the same resolution.

    Raises:
        RasterFormatError: If the lattices differ
    """
    if not dem.header.same_lattice(clutter.header):
        logger.error("DEM header %s does not match clutter header %s", dem.header, clutter.header)
        raise RasterFormatError(
            "DEM and clutter rasters must share extent and resolution: "
            f"DEM {dem.header.shape} at ({dem.header.xll}, {dem.header.yll}) cellsize {dem.header.cellsize}, "
            f"clutter {clutter.header.shape} at ({clutter.header.xll}, {clutter.header.yll}) "
            f"cellsize {clutter.header.cellsize}"
        )
