"""Transmitter and antenna-mount definitions.

This module defines TransmitterConfig and AntennaMount with NO imports from
radiocov packages outside ``radiocov.types``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from radiocov.types.geometry import GeoPoint

__all__ = ["AntennaMount", "TransmitterConfig"]


@dataclass(frozen=True, slots=True)
class AntennaMount:
    """How an antenna is mounted on its mast.

    Attributes:
        azimuth_deg: Beam direction, clockwise from north, in [0, 360)
        mech_tilt_deg: Mechanical tilt, positive = downtilt, in [-90, 90]
        elec_tilt_deg: Electrical tilt, positive = downtilt, in [-90, 90]
        height_agl_m: Antenna height above ground level in meters
    """

    azimuth_deg: float = 0.0
    mech_tilt_deg: float = 0.0
    elec_tilt_deg: float = 0.0
    height_agl_m: float = 30.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ValueError(f"azimuth_deg must be in [0, 360), got {self.azimuth_deg}")
        for name in ("mech_tilt_deg", "elec_tilt_deg"):
            value = getattr(self, name)
            if not -90.0 <= value <= 90.0:
                raise ValueError(f"{name} must be in [-90, 90], got {value}")
        if not (math.isfinite(self.height_agl_m) and self.height_agl_m >= 0.0):
            raise ValueError(f"height_agl_m must be a non-negative number, got {self.height_agl_m}")

    @property
    def total_tilt_deg(self) -> float:
        """Combined downtilt; electrical tilt is a pure rotation of the vertical pattern."""
        return self.mech_tilt_deg + self.elec_tilt_deg


@dataclass(frozen=True, slots=True)
class TransmitterConfig:
    """One transmitter of the network.

    Attributes:
        id: Unique transmitter identifier (also the result-table name)
        position: Antenna position in map coordinates
        height_agl_m: Antenna height above ground level in meters
        power_dbm: Transmit power in dBm
        frequency_mhz: Carrier frequency in MHz
        radius_km: Transmission radius in kilometers
        mount: Azimuth and tilts of the antenna
        diagram_id: Name of the antenna diagram to apply
    """

    id: str
    position: GeoPoint
    height_agl_m: float
    power_dbm: float
    frequency_mhz: float
    radius_km: float
    mount: AntennaMount
    diagram_id: str

    def __post_init__(self) -> None:
        if not self.id or not self.id.strip():
            raise ValueError("Transmitter id cannot be empty")
        if any(ch in self.id for ch in "/\\\t\n") or self.id.startswith("."):
            raise ValueError(f"Transmitter id {self.id!r} cannot be used as a table name")
        if not self.radius_km > 0.0:
            raise ValueError(f"radius_km must be positive, got {self.radius_km} for transmitter {self.id!r}")
        if not self.frequency_mhz > 0.0:
            raise ValueError(f"frequency_mhz must be positive, got {self.frequency_mhz} for transmitter {self.id!r}")
        if not math.isfinite(self.power_dbm):
            raise ValueError(f"power_dbm must be finite for transmitter {self.id!r}")
        if not self.diagram_id:
            raise ValueError(f"diagram_id cannot be empty for transmitter {self.id!r}")
        if self.mount.height_agl_m != self.height_agl_m:
            raise ValueError(
                f"Mount height {self.mount.height_agl_m} m differs from antenna height "
                f"{self.height_agl_m} m for transmitter {self.id!r}"
            )

    @property
    def radius_m(self) -> float:
        """Transmission radius in meters."""
        return self.radius_km * 1000.0
