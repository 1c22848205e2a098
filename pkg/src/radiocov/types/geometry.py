"""Planar geometry value types."""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["GeoPoint"]


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """A point in the planar map coordinate system.

    Attributes:
        easting: Easting in meters
        northing: Northing in meters
    """

    easting: float
    northing: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.easting) and math.isfinite(self.northing)):
            raise ValueError(f"GeoPoint coordinates must be finite, got ({self.easting}, {self.northing})")

    def distance_to(self, other: GeoPoint) -> float:
        """Horizontal distance to another point in meters."""
        return math.hypot(other.easting - self.easting, other.northing - self.northing)
