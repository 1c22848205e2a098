"""Common enums used across Radiocov.

This module contains simple enums with NO imports from radiocov packages.
"""

from __future__ import annotations

from enum import Enum, IntEnum

__all__ = [
    "RunMode",
    "ScalingMode",
    "MessageTag",
    "Direction",
    "ExitCode",
    "TransportKind",
    "MultiScreenModel",
]


class RunMode(Enum):
    """Parallel execution strategy."""

    MW = "mw"  # Workers return results, master aggregates continuously
    MWD = "mwd"  # Workers persist results to the store, master scans at the end


class ScalingMode(Enum):
    """Benchmark sweep protocol."""

    STRONG = "strong"  # Fixed transmitter count, growing worker count
    WEAK = "weak"  # Transmitter count grows with worker count


class MessageTag(IntEnum):
    """Wire tag of each protocol message (one byte on the wire)."""

    METADATA = 1
    IDLE = 2
    KEEP_ALIVE = 3
    ASSIGNMENT = 4
    RESULT = 5
    STOP = 6


class Direction(Enum):
    """Direction of a recorded protocol message."""

    TO_WORKER = "master->worker"
    TO_MASTER = "worker->master"


class TransportKind(Enum):
    """How master and workers exchange messages."""

    CHANNEL = "channel"  # In-process queues
    TCP = "tcp"  # Length-prefixed frames over TCP


class ExitCode(IntEnum):
    """Process exit status of the command line."""

    OK = 0
    CONFIG = 2
    CONNECTIVITY = 3
    RUNTIME = 4


class MultiScreenModel(Enum):
    """How the multi-screen term of a non-line-of-sight cell is computed."""

    KNIFE_EDGE = "knife-edge"  # Sum of knife-edge losses over the terrain obstacles
    COST231 = "cost231"  # Closed form from building separation and heights
