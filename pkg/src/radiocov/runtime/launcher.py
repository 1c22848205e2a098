"""Run a master together with its workers.

:func:`run_local` starts the workers as threads, talking over in-process
channels or over loopback TCP.
:func:`run_tcp` dials workers that were started separately with
``radiocov worker``.
"""

from __future__ import annotations

import threading
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from radiocov.errors import ConfigError, ConnectivityError
from radiocov.logging import get_logger
from radiocov.runtime.audit import MessageTrace
from radiocov.runtime.master import MasterOptions, RunInputs, master_run
from radiocov.runtime.transport import ChannelHub, Endpoint, TcpMasterLink, TcpWorkerListener, WorkerLink
from radiocov.runtime.worker import WorkerOptions, WorkerReport, worker_run
from radiocov.store import ResultStore
from radiocov.terrain import RasterGrid
from radiocov.types import RunMode, TransportKind

__all__ = ["ParallelRun", "run_local", "run_tcp"]

logger = get_logger(__name__)

LOOPBACK = "127.0.0.1"
LOCAL_ACCEPT_TIMEOUT_S = 30.0


@dataclass(slots=True)
class ParallelRun:
    """Outcome of a parallel run.

    Attributes:
        coverage: Best-server received power raster
        wall_clock_s: Master start to coverage available
        trace: Every protocol message, in master order
        worker_reports: Per-worker timings (local runs only)
    """

    coverage: RasterGrid
    wall_clock_s: float
    trace: MessageTrace
    worker_reports: list[WorkerReport] = field(default_factory=list)


def run_local(
    inputs: RunInputs,
    workers: int,
    mode: RunMode,
    store: ResultStore | None = None,
    master_options: MasterOptions | None = None,
    worker_options: WorkerOptions | None = None,
    link_delay_s: float = 0.0,
    serialize: bool = False,
    trace: MessageTrace | None = None,
    transport: TransportKind = TransportKind.CHANNEL,
) -> ParallelRun:
    """Run ``workers`` worker threads and the master in this process.

    Args:
        inputs: Rasters, network and parameters
        workers: Number of workers (at least 1)
        mode: MW or MWD
        store: Result store shared by all workers (required in MWD mode)
        master_options: Master knobs
        worker_options: Knobs applied to every worker
        link_delay_s: Latency added to every message
        serialize: Push every channel message through the wire codec (TCP always does)
        trace: Receives the message trace; a fresh one is created otherwise
        transport: In-process channels, or TCP on loopback ports picked by the OS

    Raises:
        ConfigError: On a bad worker count or a missing MWD store
        ProtocolError, WorkerLostError, StoreError: As raised by the master
    """
    if mode is RunMode.MWD and store is None:
        raise ConfigError("MWD mode needs a result store")
    if workers < 1:
        raise ConfigError(f"At least one worker is required, got {workers}")
    trace = trace if trace is not None else MessageTrace()
    reports: list[WorkerReport | None] = [None] * workers

    def serve(worker_id: int, link: WorkerLink) -> None:
        try:
            with link:
                reports[worker_id] = worker_run(link, mode, store=store, options=worker_options)
        except Exception:
            logger.exception("Worker thread %d failed", worker_id)

    if transport is TransportKind.TCP:
        return _run_local_tcp(inputs, workers, mode, store, master_options, link_delay_s, trace, serve, reports)

    hub = ChannelHub(workers, link_delay_s=link_delay_s, serialize=serialize)
    threads = [
        threading.Thread(
            target=serve, args=(worker_id, hub.worker_link(worker_id)), name=f"radiocov-worker-{worker_id}", daemon=True
        )
        for worker_id in range(workers)
    ]
    for thread in threads:
        thread.start()

    started = time.perf_counter()
    try:
        coverage = master_run(inputs, hub.master, mode, store=store, options=master_options, trace=trace)
        wall_clock_s = time.perf_counter() - started
    finally:
        hub.master.close()
        for thread in threads:
            thread.join()

    logger.info("Local %s run with %d workers took %.3fs", mode.value, workers, wall_clock_s)
    return ParallelRun(
        coverage=coverage,
        wall_clock_s=wall_clock_s,
        trace=trace,
        worker_reports=[report for report in reports if report is not None],
    )


def _run_local_tcp(
    inputs: RunInputs,
    workers: int,
    mode: RunMode,
    store: ResultStore | None,
    master_options: MasterOptions | None,
    link_delay_s: float,
    trace: MessageTrace,
    serve: Callable[[int, WorkerLink], None],
    reports: list[WorkerReport | None],
) -> ParallelRun:
    listeners = [TcpWorkerListener(LOOPBACK, 0) for _ in range(workers)]

    def accept_and_serve(worker_id: int) -> None:
        with listeners[worker_id] as listener:
            try:
                link = listener.accept(timeout=LOCAL_ACCEPT_TIMEOUT_S, link_delay_s=link_delay_s)
            except ConnectivityError:
                logger.exception("Worker thread %d was never dialled", worker_id)
                return
        serve(worker_id, link)

    threads = [
        threading.Thread(target=accept_and_serve, args=(worker_id,), name=f"radiocov-worker-{worker_id}", daemon=True)
        for worker_id in range(workers)
    ]
    for thread in threads:
        thread.start()
    try:
        run = run_tcp(
            inputs,
            [listener.endpoint for listener in listeners],
            mode,
            store=store,
            master_options=master_options,
            link_delay_s=link_delay_s,
            trace=trace,
        )
    finally:
        for thread in threads:
            thread.join()
    run.worker_reports = [report for report in reports if report is not None]
    return run


def run_tcp(
    inputs: RunInputs,
    endpoints: Sequence[Endpoint],
    mode: RunMode,
    store: ResultStore | None = None,
    master_options: MasterOptions | None = None,
    connect_timeout: float = 5.0,
    link_delay_s: float = 0.0,
    trace: MessageTrace | None = None,
) -> ParallelRun:
    """Dial running workers and drive them as the master.

    In MWD mode ``store`` must be the same store the workers write to.

    Raises:
        ConnectivityError: If any endpoint cannot be reached
    """
    trace = trace if trace is not None else MessageTrace()
    with TcpMasterLink(endpoints, connect_timeout=connect_timeout, link_delay_s=link_delay_s) as link:
        started = time.perf_counter()
        coverage = master_run(inputs, link, mode, store=store, options=master_options, trace=trace)
        wall_clock_s = time.perf_counter() - started
    logger.info("TCP %s run with %d workers took %.3fs", mode.value, len(endpoints), wall_clock_s)
    return ParallelRun(coverage=coverage, wall_clock_s=wall_clock_s, trace=trace)
