"""ESRI ASCII grid reader and writer.

Format:
    ncols         4
    nrows         3
    xllcorner     500000
    yllcorner     100000
    cellsize      25
    NODATA_value  -9999
    <nrows lines of ncols whitespace-separated numbers, northernmost row first>

Header keys are case-insensitive, ``xllcenter``/``yllcenter`` are accepted in
place of the corner keys, and ``NODATA_value`` is optional (default -9999).
Line endings may be LF or CRLF.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from radiocov.errors import RasterFormatError
from radiocov.logging import get_logger
from radiocov.terrain.raster import DEFAULT_NODATA, RasterGrid, RasterHeader

__all__ = ["load_ascii_grid", "write_ascii_grid", "format_cell_value"]

logger = get_logger(__name__)

_HEADER_KEYS = frozenset(
    {"ncols", "nrows", "xllcorner", "yllcorner", "xllcenter", "yllcenter", "cellsize", "nodata_value"}
)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _parse_int(key: str, raw: str) -> int:
    try:
        value = float(raw)
    except ValueError:
        raise RasterFormatError(f"Malformed header key '{key}': {raw!r} is not a number") from None
    if not value.is_integer():
        raise RasterFormatError(f"Malformed header key '{key}': {raw!r} is not an integer")
    return int(value)


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise RasterFormatError(f"Malformed header key '{key}': {raw!r} is not a number") from None


def load_ascii_grid(path: Path | str) -> RasterGrid:
    """Load an ESRI ASCII grid.

    Args:
        path: Grid file

    Returns:
        RasterGrid with the file's header and values; nodata cells carry the sentinel

    Raises:
        FileNotFoundError: If the file does not exist
        RasterFormatError: On a malformed header (the message names the key) or a
            wrong number of values (the message gives expected and found counts)
    """
    path = Path(path)
    logger.debug("Loading ESRI ASCII grid from %s", path)
    lines = path.read_text().splitlines()

    raw_header: dict[str, str] = {}
    body_start = 0
    for index, line in enumerate(lines):
        tokens = line.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        if key not in _HEADER_KEYS:
            if _is_number(tokens[0]):
                body_start = index
                break
            raise RasterFormatError(f"Unknown header key '{tokens[0]}' in {path}")
        if len(tokens) != 2:
            raise RasterFormatError(f"Malformed header key '{tokens[0]}': expected one value, found {len(tokens) - 1}")
        if key in raw_header:
            raise RasterFormatError(f"Duplicate header key '{tokens[0]}' in {path}")
        raw_header[key] = tokens[1]
    else:
        body_start = len(lines)

    for key in ("ncols", "nrows", "cellsize"):
        if key not in raw_header:
            raise RasterFormatError(f"Missing header key '{key}' in {path}")

    ncols = _parse_int("ncols", raw_header["ncols"])
    nrows = _parse_int("nrows", raw_header["nrows"])
    cellsize = _parse_float("cellsize", raw_header["cellsize"])
    nodata = DEFAULT_NODATA
    if "nodata_value" in raw_header:
        nodata = _parse_float("nodata_value", raw_header["nodata_value"])

    corner: dict[str, float] = {}
    for axis in ("x", "y"):
        corner_key, center_key = f"{axis}llcorner", f"{axis}llcenter"
        if corner_key in raw_header:
            corner[axis] = _parse_float(corner_key, raw_header[corner_key])
        elif center_key in raw_header:
            corner[axis] = _parse_float(center_key, raw_header[center_key]) - cellsize / 2.0
        else:
            raise RasterFormatError(f"Missing header key '{corner_key}' in {path}")

    if ncols < 1 or nrows < 1:
        raise RasterFormatError(f"Malformed header key '{'ncols' if ncols < 1 else 'nrows'}': must be at least 1")
    if not cellsize > 0:
        raise RasterFormatError(f"Malformed header key 'cellsize': must be positive, got {cellsize}")

    tokens = " ".join(lines[body_start:]).split()
    expected = ncols * nrows
    if len(tokens) != expected:
        logger.error("Grid %s has %d values, header requires %d", path, len(tokens), expected)
        raise RasterFormatError(f"expected {expected} values, found {len(tokens)}")
    try:
        values = np.array(tokens, dtype=np.float64).reshape(nrows, ncols)
    except ValueError as exc:
        raise RasterFormatError(f"Non-numeric value in grid body of {path}: {exc}") from None

    header = RasterHeader(ncols=ncols, nrows=nrows, xll=corner["x"], yll=corner["y"], cellsize=cellsize, nodata=nodata)
    logger.info("Loaded %dx%d grid from %s (cellsize %.3f m)", nrows, ncols, path, cellsize)
    return RasterGrid(header=header, values=values)


def format_cell_value(value: float) -> str:
    """Render a sample with up to 6 decimals and no trailing zeros."""
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def _format_header_float(value: float) -> str:
    return str(int(value)) if value.is_integer() else repr(value)


def write_ascii_grid(grid: RasterGrid, path: Path | str) -> None:
    """Write a grid as ESRI ASCII.

    Values are printed with up to 6 decimals; nodata cells print the sentinel.

    Args:
        grid: Grid to write
        path: Destination file

    Raises:
        OSError: If the path cannot be written
    """
    path = Path(path)
    header = grid.header
    lines = [
        f"ncols         {header.ncols}",
        f"nrows         {header.nrows}",
        f"xllcorner     {_format_header_float(header.xll)}",
        f"yllcorner     {_format_header_float(header.yll)}",
        f"cellsize      {_format_header_float(header.cellsize)}",
        f"NODATA_value  {_format_header_float(header.nodata)}",
    ]
    for row in grid.values:
        lines.append(" ".join(format_cell_value(float(v)) for v in row))

    path.write_text("\n".join(lines) + "\n")
    logger.info("Wrote %dx%d grid to %s", header.nrows, header.ncols, path)
