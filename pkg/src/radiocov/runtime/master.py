"""Master process of the parallel runtime.

The master owns the rasters and all protocol state in one control loop::

    broadcast Metadata
    while any worker is still on:
        (worker, msg) = next inbox item
        Idle:    transmitters left? KeepAlive + Assignment : Stop
        Result:  fold into the running maximum            (MW)
    MWD: scan the store's tables

Sub-grids are cut when a transmitter is assigned, not up front. The next idle
worker always gets the next transmitter, so faster workers receive more work.
"""

from __future__ import annotations

import queue
import time
from collections import deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from radiocov.antenna import AntennaDiagram, DiagramSet
from radiocov.engine import CoverageAccumulator, cut_subgrids, predict_serial, validate_network
from radiocov.errors import ConfigError, ProtocolError, StoreError, WorkerLostError
from radiocov.logging import get_logger
from radiocov.propagation import ClutterLossTable, PropagationParams
from radiocov.runtime.audit import MessageTrace
from radiocov.runtime.messages import Assignment, Idle, KeepAlive, Message, Metadata, Result, Stop
from radiocov.runtime.transport import Disconnected, MasterLink
from radiocov.store import ResultStore
from radiocov.terrain import RasterGrid, ensure_aligned
from radiocov.types import Direction, RunMode, TransmitterConfig

__all__ = ["RunInputs", "MasterOptions", "master_run"]

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True, eq=False)
class RunInputs:
    """Everything a prediction run reads.

    Attributes:
        dem: Terrain raster
        clutter: Clutter-code raster on the same lattice
        transmitters: Network, in processing order
        diagrams: Antenna diagrams by name
        params: Run-wide propagation parameters
        clutter_losses: Clutter code table
    """

    dem: RasterGrid
    clutter: RasterGrid
    transmitters: Sequence[TransmitterConfig]
    diagrams: Mapping[str, AntennaDiagram] = field(repr=False)
    params: PropagationParams = field(default_factory=PropagationParams)
    clutter_losses: ClutterLossTable = field(default_factory=ClutterLossTable, repr=False)

    def __post_init__(self) -> None:
        ensure_aligned(self.dem, self.clutter)
        object.__setattr__(self, "transmitters", tuple(self.transmitters))
        validate_network(self.dem.header, self.transmitters, self.diagrams)

    def serial(self) -> RasterGrid:
        """Coverage from the single-process engine."""
        return predict_serial(
            self.dem, self.clutter, self.transmitters, self.diagrams, self.params, self.clutter_losses
        )

    def with_transmitters(self, transmitters: Sequence[TransmitterConfig]) -> RunInputs:
        return RunInputs(
            dem=self.dem,
            clutter=self.clutter,
            transmitters=transmitters,
            diagrams=self.diagrams,
            params=self.params,
            clutter_losses=self.clutter_losses,
        )


@dataclass(frozen=True, slots=True)
class MasterOptions:
    """Master knobs.

    Attributes:
        master_delay_s: Extra service time per incoming Result (emulates a saturated master)
        idle_timeout_s: Abort when no worker message arrives for this long
    """

    master_delay_s: float = 0.0
    idle_timeout_s: float | None = None


def master_run(
    inputs: RunInputs,
    link: MasterLink,
    mode: RunMode,
    store: ResultStore | None = None,
    options: MasterOptions | None = None,
    trace: MessageTrace | None = None,
) -> RasterGrid:
    """Drive all workers until every transmitter is done and every worker stopped.

    Args:
        inputs: Rasters, network and parameters
        link: Connected workers
        mode: MW aggregates Results as they arrive, MWD scans ``store`` at the end
        store: Result store the workers write to (required in MWD mode)
        options: Injection knobs and watchdog
        trace: Receives every protocol message exchanged

    Returns:
        Coverage raster, bit-identical to :func:`radiocov.engine.predict_serial`

    Raises:
        ConfigError: If MWD mode has no store or the store already holds tables of this network
        WorkerLostError: If a worker disconnects before it was stopped
        ProtocolError: On an out-of-protocol message or a watchdog timeout
        StoreError: If tables are missing after all workers finished
    """
    options = options or MasterOptions()
    trace = trace if trace is not None else MessageTrace()
    if mode is RunMode.MWD:
        if store is None:
            raise ConfigError("MWD mode needs a result store")
        stale = set(store.table_ids()) & {tx.id for tx in inputs.transmitters}
        if stale:
            logger.error("Store already holds %d tables of this network", len(stale))
            raise ConfigError(f"Result store already holds tables for {sorted(stale)[:5]}; use a fresh store directory")

    worker_ids = link.worker_ids
    extent = inputs.dem.header
    diagrams = DiagramSet(inputs.diagrams)
    pending = deque(inputs.transmitters)
    by_id = {tx.id: tx for tx in inputs.transmitters}
    accumulator = CoverageAccumulator(extent)
    stopped: set[int] = set()
    closed: set[int] = set()
    started = time.perf_counter()

    def send(worker_id: int, msg: Message) -> None:
        trace.record(worker_id, Direction.TO_WORKER, msg)
        link.send(worker_id, msg)

    logger.info(
        "Master starting %s run: %d transmitters, %d workers", mode.value, len(pending), len(worker_ids)
    )
    for worker_id in worker_ids:
        send(
            worker_id,
            Metadata(
                worker_id=worker_id,
                params=inputs.params,
                clutter_losses=inputs.clutter_losses,
                diagrams=diagrams,
                extent=extent,
            ),
        )

    while len(closed) < len(worker_ids):
        try:
            worker_id, msg = link.inbox.get(timeout=options.idle_timeout_s)
        except queue.Empty:
            logger.critical(
                "No worker message for %ss; %d workers still on", options.idle_timeout_s, len(worker_ids) - len(stopped)
            )
            raise ProtocolError(f"No worker message within {options.idle_timeout_s}s") from None

        if isinstance(msg, Disconnected):
            if worker_id not in stopped:
                logger.critical("Worker %d lost before Stop: %s", worker_id, msg.reason)
                raise WorkerLostError(f"Worker {worker_id} disconnected mid-run: {msg.reason}")
            closed.add(worker_id)
            continue

        trace.record(worker_id, Direction.TO_MASTER, msg)
        if worker_id in stopped:
            raise ProtocolError(f"Worker {worker_id} sent {type(msg).__name__} after Stop")

        match msg:
            case Idle():
                if msg.worker_id != worker_id:
                    raise ProtocolError(f"Idle from link {worker_id} claims worker id {msg.worker_id}")
                if pending:
                    tx = pending.popleft()
                    dem_sub, clutter_sub = cut_subgrids(inputs.dem, inputs.clutter, tx)
                    send(worker_id, KeepAlive())
                    send(worker_id, Assignment(tx=tx, dem=dem_sub, clutter=clutter_sub))
                else:
                    send(worker_id, Stop())
                    stopped.add(worker_id)
            case Result():
                if mode is not RunMode.MW:
                    raise ProtocolError(f"Worker {worker_id} returned a Result in {mode.value} mode")
                tx = by_id.get(msg.tx_id)
                if tx is None:
                    raise ProtocolError(f"Result for unknown transmitter {msg.tx_id!r}")
                accumulator.add(tx.power_dbm, msg.path_loss)
                if options.master_delay_s > 0:
                    time.sleep(options.master_delay_s)
            case _:
                raise ProtocolError(f"Unexpected {type(msg).__name__} from worker {worker_id}")

    if mode is RunMode.MWD:
        assert store is not None
        missing = set(by_id) - set(store.table_ids())
        if missing:
            logger.critical("%d tables missing after the run", len(missing))
            raise StoreError(f"Tables missing after the run: {sorted(missing)[:5]}")
        coverage = store.scan_max(inputs.transmitters, extent)
    else:
        if accumulator.count != len(by_id):
            raise ProtocolError(f"Received {accumulator.count} results for {len(by_id)} transmitters")
        coverage = accumulator.to_raster()

    logger.info("Master finished in %.3fs", time.perf_counter() - started)
    return coverage
