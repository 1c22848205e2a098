"""Transmitter network CSV files.

Expected header (column order is free, names are fixed)::

    id,easting,northing,height_agl_m,power_dbm,frequency_mhz,radius_km,
    azimuth_deg,mech_tilt_deg,elec_tilt_deg,diagram_id

(shown wrapped; the file carries it on one line)

Blank ``frequency_mhz``/``radius_km`` cells fall back to run-wide defaults;
blank azimuth and tilt cells default to 0.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable
from pathlib import Path

from radiocov.errors import TransmitterFormatError
from radiocov.logging import get_logger
from radiocov.types import AntennaMount, GeoPoint, TransmitterConfig

__all__ = ["TRANSMITTER_COLUMNS", "load_transmitters", "write_transmitters"]

logger = get_logger(__name__)

TRANSMITTER_COLUMNS = (
    "id",
    "easting",
    "northing",
    "height_agl_m",
    "power_dbm",
    "frequency_mhz",
    "radius_km",
    "azimuth_deg",
    "mech_tilt_deg",
    "elec_tilt_deg",
    "diagram_id",
)

_OPTIONAL_ZERO = ("azimuth_deg", "mech_tilt_deg", "elec_tilt_deg")


def _number(row: dict[str, str], column: str, lineno: int, default: float | None = None) -> float:
    text = (row.get(column) or "").strip()
    if not text:
        if default is None:
            raise TransmitterFormatError(f"line {lineno}: missing value for {column}")
        return default
    try:
        return float(text)
    except ValueError:
        raise TransmitterFormatError(f"line {lineno}: {column} is not a number: {text!r}") from None


def load_transmitters(
    path: Path | str,
    frequency_mhz: float | None = None,
    radius_km: float | None = None,
) -> list[TransmitterConfig]:
    """Read the transmitter network, in file order.

    Args:
        path: CSV file
        frequency_mhz: Default for blank ``frequency_mhz`` cells
        radius_km: Default for blank ``radius_km`` cells

    Raises:
        TransmitterFormatError: On missing columns, malformed values or duplicate ids
    """
    path = Path(path)
    transmitters: list[TransmitterConfig] = []
    seen: set[str] = set()

    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        header = [name.strip() for name in reader.fieldnames or []]
        missing = [column for column in TRANSMITTER_COLUMNS if column not in header and column not in _OPTIONAL_ZERO]
        if missing:
            logger.error("Transmitter file %s lacks columns %s", path, missing)
            raise TransmitterFormatError(f"{path}: missing columns {', '.join(missing)}")
        reader.fieldnames = header

        for lineno, row in enumerate(reader, start=2):
            tx_id = (row.get("id") or "").strip()
            if tx_id in seen:
                raise TransmitterFormatError(f"{path}:{lineno}: duplicate transmitter id {tx_id!r}")
            height = _number(row, "height_agl_m", lineno)
            try:
                mount = AntennaMount(
                    azimuth_deg=_number(row, "azimuth_deg", lineno, 0.0),
                    mech_tilt_deg=_number(row, "mech_tilt_deg", lineno, 0.0),
                    elec_tilt_deg=_number(row, "elec_tilt_deg", lineno, 0.0),
                    height_agl_m=height,
                )
                tx = TransmitterConfig(
                    id=tx_id,
                    position=GeoPoint(_number(row, "easting", lineno), _number(row, "northing", lineno)),
                    height_agl_m=height,
                    power_dbm=_number(row, "power_dbm", lineno),
                    frequency_mhz=_number(row, "frequency_mhz", lineno, frequency_mhz),
                    radius_km=_number(row, "radius_km", lineno, radius_km),
                    mount=mount,
                    diagram_id=(row.get("diagram_id") or "").strip(),
                )
            except TransmitterFormatError as exc:
                raise TransmitterFormatError(f"{path}:{exc}") from None
            except ValueError as exc:
                raise TransmitterFormatError(f"{path}:{lineno}: {exc}") from exc
            seen.add(tx_id)
            transmitters.append(tx)

    logger.info("Loaded %d transmitters from %s", len(transmitters), path)
    return transmitters


def write_transmitters(transmitters: Iterable[TransmitterConfig], path: Path | str) -> None:
    """Write a network back to CSV (round-trips through :func:`load_transmitters`)."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRANSMITTER_COLUMNS)
        for tx in transmitters:
            writer.writerow(
                [
                    tx.id,
                    repr(tx.position.easting),
                    repr(tx.position.northing),
                    repr(tx.height_agl_m),
                    repr(tx.power_dbm),
                    repr(tx.frequency_mhz),
                    repr(tx.radius_km),
                    repr(tx.mount.azimuth_deg),
                    repr(tx.mount.mech_tilt_deg),
                    repr(tx.mount.elec_tilt_deg),
                    tx.diagram_id,
                ]
            )
