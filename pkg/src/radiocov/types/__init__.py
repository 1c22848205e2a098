"""Pure type definitions with zero dependencies.

This package contains the value types shared by every other package.
It has NO dependencies on other radiocov packages to prevent circular imports.

Types exported:
- Geometry: GeoPoint
- Network: TransmitterConfig, AntennaMount
- Enums: RunMode, ScalingMode, MessageTag, Direction, ExitCode, TransportKind, MultiScreenModel
"""

from __future__ import annotations

from radiocov.types.common import (
    Direction,
    ExitCode,
    MessageTag,
    MultiScreenModel,
    RunMode,
    ScalingMode,
    TransportKind,
)
from radiocov.types.geometry import GeoPoint
from radiocov.types.transmitters import AntennaMount, TransmitterConfig

__all__ = [
    # Geometry
    "GeoPoint",
    # Network
    "TransmitterConfig",
    "AntennaMount",
    # Enums
    "RunMode",
    "ScalingMode",
    "MessageTag",
    "Direction",
    "ExitCode",
    "TransportKind",
    "MultiScreenModel",
]
