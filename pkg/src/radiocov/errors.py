"""Exception hierarchy for Radiocov.

Every class also derives from the builtin exception a caller would expect
(``ValueError`` for bad input, ``RuntimeError`` for protocol failures,
``OSError`` for storage), so generic handlers keep working.
"""

from __future__ import annotations

__all__ = [
    "RadiocovError",
    "DomainError",
    "ParseError",
    "RasterFormatError",
    "DiagramFormatError",
    "TransmitterFormatError",
    "ClutterTableFormatError",
    "FrameError",
    "ConfigError",
    "ConnectivityError",
    "ProtocolError",
    "WorkerLostError",
    "StoreError",
    "TableConflictError",
]


class RadiocovError(Exception):
    """Base class for all Radiocov errors."""


class DomainError(RadiocovError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ParseError(RadiocovError, ValueError):
    """An input file or buffer is malformed."""


class RasterFormatError(ParseError):
    """Malformed ESRI ASCII grid, or DEM/clutter rasters that do not align."""


class DiagramFormatError(ParseError):
    """Malformed antenna diagram file."""


class TransmitterFormatError(ParseError):
    """Malformed transmitter CSV."""


class ClutterTableFormatError(ParseError):
    """Malformed clutter-loss table."""


class FrameError(ParseError):
    """Malformed wire frame."""


class ConfigError(RadiocovError, ValueError):
    """Invalid run configuration."""


class ConnectivityError(RadiocovError, ConnectionError):
    """A master or worker endpoint could not be reached."""


class ProtocolError(RadiocovError, RuntimeError):
    """A peer broke the master/worker message pairing."""


class WorkerLostError(ProtocolError):
    """A worker disconnected before it was stopped."""


class StoreError(RadiocovError, OSError):
    """The result store could not complete an operation."""


class TableConflictError(StoreError):
    """A table for this transmitter id already exists."""
