"""Protocol messages exchanged between the master and its workers.

Every worker request is paired with a master reply::

    master                          worker
      | ---------- Metadata ---------> |
      | <------------ Idle ----------- |
      | -------- KeepAlive ----------> |   transmitters left
      | -------- Assignment ---------> |
      | <---------- Result ----------- |   MW only
      | <------------ Idle ----------- |
      | ----------- Stop ------------> |   nothing left

Result only flows worker -> master; KeepAlive and Stop only master -> worker.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from radiocov.antenna import DiagramSet
from radiocov.errors import DomainError
from radiocov.propagation import ClutterLossTable, PathLossField, PropagationParams
from radiocov.terrain import RasterHeader, SubGrid
from radiocov.types import Direction, MessageTag, TransmitterConfig

__all__ = [
    "Message",
    "Metadata",
    "Idle",
    "KeepAlive",
    "Assignment",
    "Result",
    "Stop",
    "DIRECTIONS",
]


@dataclass(frozen=True, slots=True)
class Metadata:
    """Run-wide data broadcast once to every worker.

    Attributes:
        worker_id: Identity the worker uses in its Idle messages
        params: Propagation parameters
        clutter_losses: Clutter code table
        diagrams: Every antenna diagram the network references
        extent: Header of the master rasters
    """

    tag: MessageTag = field(default=MessageTag.METADATA, init=False)
    worker_id: int
    params: PropagationParams
    clutter_losses: ClutterLossTable = field(repr=False)
    diagrams: DiagramSet = field(repr=False)
    extent: RasterHeader


@dataclass(frozen=True, slots=True)
class Idle:
    """Worker asks for work."""

    tag: MessageTag = field(default=MessageTag.IDLE, init=False)
    worker_id: int


@dataclass(frozen=True, slots=True)
class KeepAlive:
    """Master announces an Assignment."""

    tag: MessageTag = field(default=MessageTag.KEEP_ALIVE, init=False)


@dataclass(frozen=True, slots=True)
class Assignment:
    """One transmitter together with its DEM and clutter windows."""

    tag: MessageTag = field(default=MessageTag.ASSIGNMENT, init=False)
    tx: TransmitterConfig
    dem: SubGrid = field(repr=False)
    clutter: SubGrid = field(repr=False)

    def __post_init__(self) -> None:
        if self.dem.parent_offset != self.clutter.parent_offset or self.dem.shape != self.clutter.shape:
            raise DomainError(
                f"Assignment windows differ: DEM {self.dem.shape} at {self.dem.parent_offset}, "
                f"clutter {self.clutter.shape} at {self.clutter.parent_offset}"
            )


@dataclass(frozen=True, slots=True)
class Result:
    """Path-loss field of a finished transmitter (MW mode)."""

    tag: MessageTag = field(default=MessageTag.RESULT, init=False)
    tx_id: str
    path_loss: PathLossField = field(repr=False)

    def __post_init__(self) -> None:
        if not self.tx_id:
            raise DomainError("Result needs a transmitter id")


@dataclass(frozen=True, slots=True)
class Stop:
    """No transmitters left; the worker finishes and exits."""

    tag: MessageTag = field(default=MessageTag.STOP, init=False)


Message = Metadata | Idle | KeepAlive | Assignment | Result | Stop

# Permitted direction of every tag
DIRECTIONS: dict[MessageTag, Direction] = {
    MessageTag.METADATA: Direction.TO_WORKER,
    MessageTag.IDLE: Direction.TO_MASTER,
    MessageTag.KEEP_ALIVE: Direction.TO_WORKER,
    MessageTag.ASSIGNMENT: Direction.TO_WORKER,
    MessageTag.RESULT: Direction.TO_MASTER,
    MessageTag.STOP: Direction.TO_WORKER,
}
