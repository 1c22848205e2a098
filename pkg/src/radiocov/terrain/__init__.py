"""Georeferenced rasters, ESRI ASCII I/O and sub-region extraction."""

from __future__ import annotations

from radiocov.terrain.esri import format_cell_value, load_ascii_grid, write_ascii_grid
from radiocov.terrain.raster import (
    DEFAULT_NODATA,
    RasterGrid,
    RasterHeader,
    SubGrid,
    ensure_aligned,
    extract_subgrid,
)

__all__ = [
    "DEFAULT_NODATA",
    "RasterHeader",
    "RasterGrid",
    "SubGrid",
    "extract_subgrid",
    "ensure_aligned",
    "load_ascii_grid",
    "write_ascii_grid",
    "format_cell_value",
]
