"""Worker process of the parallel runtime.

A worker holds no raster of its own. It learns the run-wide data from the
Metadata broadcast, then repeatedly asks for work::

    send Idle -> Stop?      drain pending persistence, exit
              -> KeepAlive  receive Assignment, compute the field
                            MW:  send Result
                            MWD: hand the field to the persistence thread, send the next Idle

In MWD mode at most one table is being written at a time. A second finished
field waits until the previous write is done, so computation of transmitter
k+1 overlaps persistence of transmitter k.
"""

from __future__ import annotations

import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field

from radiocov.engine import predict_subgrid
from radiocov.errors import ConfigError, ProtocolError
from radiocov.logging import get_logger
from radiocov.propagation import PathLossField
from radiocov.runtime.messages import Assignment, Idle, KeepAlive, Metadata, Result, Stop
from radiocov.runtime.transport import WorkerLink
from radiocov.store import ResultStore
from radiocov.terrain import RasterHeader
from radiocov.types import RunMode

__all__ = ["AssignmentTiming", "WorkerReport", "WorkerOptions", "worker_run"]

logger = get_logger(__name__)


@dataclass(slots=True)
class AssignmentTiming:
    """Timestamps (``time.perf_counter``) of one assignment."""

    tx_id: str
    compute_start: float
    compute_end: float
    persist_start: float | None = None
    persist_end: float | None = None


@dataclass(slots=True)
class WorkerReport:
    """What a worker did during a run."""

    worker_id: int
    mode: RunMode
    started: float
    finished: float = 0.0
    idle_sent: int = 0
    assignments: list[AssignmentTiming] = field(default_factory=list)

    @property
    def wall_clock_s(self) -> float:
        return self.finished - self.started

    @property
    def tx_ids(self) -> list[str]:
        return [timing.tx_id for timing in self.assignments]


@dataclass(frozen=True, slots=True)
class WorkerOptions:
    """Worker knobs.

    Attributes:
        persist_delay_s: Extra latency per stored table (emulates a remote database)
        compute_delay_s: Extra latency per computed field (emulates heavier transmitters)
        recv_timeout_s: Give up when the master stays silent this long
    """

    persist_delay_s: float = 0.0
    compute_delay_s: float = 0.0
    recv_timeout_s: float | None = None


class _Persister:
    """Single-slot background writer."""

    def __init__(self, store: ResultStore, extent: RasterHeader, delay_s: float) -> None:
        self._store = store
        self._extent = extent
        self._delay_s = delay_s
        self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix="radiocov-persist")
        self._pending: Future[None] | None = None

    def _persist(self, timing: AssignmentTiming, path_loss: PathLossField) -> None:
        timing.persist_start = time.perf_counter()
        if self._delay_s > 0:
            time.sleep(self._delay_s)
        self._store.put_table(timing.tx_id, path_loss, self._extent)
        timing.persist_end = time.perf_counter()

    def submit(self, timing: AssignmentTiming, path_loss: PathLossField) -> None:
        self.wait()
        self._pending = self._executor.submit(self._persist, timing, path_loss)

    def wait(self) -> None:
        """Block until the in-flight write is done; re-raises its failure."""
        pending, self._pending = self._pending, None
        if pending is not None:
            pending.result()

    def shutdown(self) -> None:
        self._executor.shutdown(wait=True)


def worker_run(
    link: WorkerLink,
    mode: RunMode,
    store: ResultStore | None = None,
    options: WorkerOptions | None = None,
) -> WorkerReport:
    """Serve one master until it sends Stop.

    Args:
        link: Connection to the master
        mode: MW returns results, MWD writes them to ``store``
        store: Result store (required in MWD mode)
        options: Injection knobs and timeouts

    Returns:
        Per-assignment timestamps

    Raises:
        ConfigError: If MWD mode has no store
        ProtocolError: If the master breaks the message pairing
        StoreError: If persisting a table fails (raised after draining)
    """
    options = options or WorkerOptions()
    if mode is RunMode.MWD and store is None:
        raise ConfigError("MWD workers need a result store")
    timeout = options.recv_timeout_s

    metadata = link.recv(timeout)
    if not isinstance(metadata, Metadata):
        logger.error("Expected Metadata first, got %s", type(metadata).__name__)
        raise ProtocolError(f"Expected Metadata as first message, got {type(metadata).__name__}")
    worker_id = metadata.worker_id
    report = WorkerReport(worker_id=worker_id, mode=mode, started=time.perf_counter())
    logger.info("Worker %d started in %s mode", worker_id, mode.value)

    persister: _Persister | None = None
    if mode is RunMode.MWD and store is not None:
        persister = _Persister(store, metadata.extent, options.persist_delay_s)
    try:
        while True:
            link.send(Idle(worker_id=worker_id))
            report.idle_sent += 1
            reply = link.recv(timeout)
            if isinstance(reply, Stop):
                break
            if not isinstance(reply, KeepAlive):
                raise ProtocolError(f"Worker {worker_id}: expected KeepAlive or Stop, got {type(reply).__name__}")
            assignment = link.recv(timeout)
            if not isinstance(assignment, Assignment):
                raise ProtocolError(f"Worker {worker_id}: KeepAlive not followed by Assignment")

            tx = assignment.tx
            start = time.perf_counter()
            path_loss = predict_subgrid(
                assignment.dem,
                assignment.clutter,
                tx,
                metadata.diagrams[tx.diagram_id],
                metadata.params,
                metadata.clutter_losses,
            )
            if options.compute_delay_s > 0:
                time.sleep(options.compute_delay_s)
            timing = AssignmentTiming(tx_id=tx.id, compute_start=start, compute_end=time.perf_counter())
            report.assignments.append(timing)
            logger.debug("Worker %d computed %s in %.3fs", worker_id, tx.id, timing.compute_end - start)

            if persister is None:
                link.send(Result(tx_id=tx.id, path_loss=path_loss))
            else:
                persister.submit(timing, path_loss)

        if persister is not None:
            persister.wait()
    except Exception:
        logger.critical("Worker %d aborting", worker_id, exc_info=True)
        if persister is not None:
            try:
                persister.wait()
            except Exception:
                logger.error("Pending table write of worker %d failed too", worker_id)
        raise
    finally:
        if persister is not None:
            persister.shutdown()
        report.finished = time.perf_counter()

    logger.info("Worker %d stopped after %d assignments", worker_id, len(report.assignments))
    return report
