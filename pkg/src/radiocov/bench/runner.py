"""Timed single runs of the parallel runtime."""

from __future__ import annotations

import tempfile
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

from radiocov.bench.metrics import RunRecord
from radiocov.logging import get_logger
from radiocov.runtime import MasterOptions, ParallelRun, RunInputs, WorkerOptions, run_local
from radiocov.store import FileResultStore, ResultStore
from radiocov.types import RunMode

__all__ = ["BenchKnobs", "run_once"]

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class BenchKnobs:
    """Bottleneck emulation applied to every benchmark run.

    Attributes:
        master_delay_s: Master service time per Result
        link_delay_s: Latency per message
        persist_delay_s: Extra write time per stored table
        compute_delay_s: Extra compute time per transmitter
    """

    master_delay_s: float = 0.0
    link_delay_s: float = 0.0
    persist_delay_s: float = 0.0
    compute_delay_s: float = 0.0

    def master_options(self) -> MasterOptions:
        return MasterOptions(master_delay_s=self.master_delay_s)

    def worker_options(self) -> WorkerOptions:
        return WorkerOptions(persist_delay_s=self.persist_delay_s, compute_delay_s=self.compute_delay_s)


def run_once(
    inputs: RunInputs,
    mode: RunMode,
    workers: int,
    knobs: BenchKnobs | None = None,
    store_root: Path | str | None = None,
    store_factory: Callable[[Path], ResultStore] = FileResultStore,
) -> tuple[RunRecord, ParallelRun]:
    """Run the network once on ``workers`` local workers and time the master.

    MWD runs write into a fresh store directory under ``store_root`` (the
    system temp dir by default) that is removed afterwards.
    """
    knobs = knobs or BenchKnobs()
    if store_root is not None:
        Path(store_root).mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix=f"radiocov-{mode.value}-np{workers}-", dir=store_root) as run_dir:
        store = store_factory(Path(run_dir)) if mode is RunMode.MWD else None
        run = run_local(
            inputs,
            workers,
            mode,
            store=store,
            master_options=knobs.master_options(),
            worker_options=knobs.worker_options(),
            link_delay_s=knobs.link_delay_s,
        )
    record = RunRecord(
        mode=mode,
        workers=workers,
        tx_count=len(inputs.transmitters),
        wall_clock_s=run.wall_clock_s,
    )
    logger.debug("%s NP=%d n=%d: %.4fs", mode.value, workers, record.tx_count, record.wall_clock_s)
    return record, run
