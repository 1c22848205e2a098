"""Strong and weak scaling sweeps.

For every (mode, NP) the network is run ``repetitions`` times; the best wall
time is the headline figure and the median is reported next to it.

Strong scaling keeps the network fixed. Weak scaling replicates the network
NP times, so every worker has the same amount of work at every NP; speedup is
only defined where the network matches the NP=1 base, i.e. at NP=1.
"""

from __future__ import annotations

import dataclasses
import statistics
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from radiocov.bench.metrics import RunRecord, efficiency, gain_pct, speedup
from radiocov.bench.runner import BenchKnobs, run_once
from radiocov.errors import ConfigError, RadiocovError
from radiocov.logging import get_logger
from radiocov.runtime import RunInputs
from radiocov.types import RunMode, ScalingMode, TransmitterConfig

__all__ = ["SweepRow", "ScalingReport", "replicate_network", "scaling_sweep", "fill_metrics"]

logger = get_logger(__name__)


@dataclass(slots=True)
class SweepRow:
    """One (mode, NP) cell of a sweep.

    Metrics are None where undefined: no NP=1 base, a different network size
    than the base, the other mode missing, or a failed run.
    """

    mode: RunMode
    np: int
    tx: int
    wall_times: list[float] = field(default_factory=list)
    speedup: float | None = None
    efficiency: float | None = None
    gain_pct: float | None = None
    error: str | None = None

    @property
    def best_s(self) -> float | None:
        return min(self.wall_times) if self.wall_times else None

    @property
    def median_s(self) -> float | None:
        return statistics.median(self.wall_times) if self.wall_times else None

    @property
    def ok(self) -> bool:
        return self.error is None and bool(self.wall_times)

    def best_record(self) -> RunRecord | None:
        best = self.best_s
        if not self.ok or best is None:
            return None
        return RunRecord(mode=self.mode, workers=self.np, tx_count=self.tx, wall_clock_s=best)


@dataclass(slots=True)
class ScalingReport:
    """All rows of a sweep, in (mode, NP) order."""

    scaling: ScalingMode
    repetitions: int
    rows: list[SweepRow] = field(default_factory=list)

    def row(self, mode: RunMode, np: int) -> SweepRow:
        for candidate in self.rows:
            if candidate.mode is mode and candidate.np == np:
                return candidate
        raise KeyError(f"No row for {mode.value} at NP={np}")

    def rows_for(self, mode: RunMode) -> list[SweepRow]:
        return sorted((row for row in self.rows if row.mode is mode), key=lambda row: row.np)

    @property
    def failures(self) -> list[SweepRow]:
        return [row for row in self.rows if row.error is not None]


def replicate_network(transmitters: Sequence[TransmitterConfig], copies: int) -> list[TransmitterConfig]:
    """The network repeated ``copies`` times; copy k > 0 gets ids suffixed ``-r<k>``."""
    if copies < 1:
        raise ConfigError(f"copies must be at least 1, got {copies}")
    replicated = list(transmitters)
    for k in range(1, copies):
        replicated.extend(dataclasses.replace(tx, id=f"{tx.id}-r{k}") for tx in transmitters)
    return replicated


def fill_metrics(report: ScalingReport) -> ScalingReport:
    """Derive speedup, efficiency and gain of every row from its wall times."""
    for row in report.rows:
        row.speedup = row.efficiency = row.gain_pct = None

    for mode in {row.mode for row in report.rows}:
        rows = report.rows_for(mode)
        base = next((row.best_record() for row in rows if row.np == 1), None)
        if base is None:
            continue
        for row in rows:
            record = row.best_record()
            if record is None or record.tx_count != base.tx_count:
                continue
            row.speedup = speedup(base, record)
            row.efficiency = efficiency(row.speedup, row.np)

    by_np: dict[int, dict[RunMode, SweepRow]] = {}
    for row in report.rows:
        by_np.setdefault(row.np, {})[row.mode] = row
    for pair in by_np.values():
        mw, mwd = pair.get(RunMode.MW), pair.get(RunMode.MWD)
        if mw is None or mwd is None or not (mw.ok and mwd.ok):
            continue
        assert mw.best_s is not None and mwd.best_s is not None
        gain = gain_pct(mw.best_s, mwd.best_s)
        mw.gain_pct = mwd.gain_pct = gain
    return report


def scaling_sweep(
    inputs: RunInputs,
    modes: Sequence[RunMode],
    np_list: Sequence[int],
    repetitions: int = 1,
    scaling: ScalingMode = ScalingMode.STRONG,
    knobs: BenchKnobs | None = None,
    store_root: Path | str | None = None,
) -> ScalingReport:
    """Time every (mode, NP) combination.

    A failing run does not abort the sweep: its row keeps the error message
    and carries no metrics.

    Raises:
        ConfigError: On an empty mode or NP list, NP < 1 or repetitions < 1
    """
    if repetitions < 1:
        raise ConfigError(f"repetitions must be at least 1, got {repetitions}")
    if not modes or not np_list:
        raise ConfigError("A sweep needs at least one mode and one worker count")
    if min(np_list) < 1:
        raise ConfigError(f"Worker counts must be at least 1, got {sorted(np_list)}")

    report = ScalingReport(scaling=scaling, repetitions=repetitions)
    for mode in modes:
        for np in sorted(set(np_list)):
            if scaling is ScalingMode.WEAK:
                instance = inputs.with_transmitters(replicate_network(inputs.transmitters, np))
            else:
                instance = inputs
            row = SweepRow(mode=mode, np=np, tx=len(instance.transmitters))
            for repetition in range(repetitions):
                try:
                    record, _ = run_once(instance, mode, np, knobs=knobs, store_root=store_root)
                except RadiocovError as exc:
                    logger.error("%s NP=%d repetition %d failed: %s", mode.value, np, repetition + 1, exc)
                    row.error = f"{type(exc).__name__}: {exc}"
                    break
                row.wall_times.append(record.wall_clock_s)
            report.rows.append(row)
            if row.ok:
                logger.info(
                    "%s NP=%d n=%d: best %.4fs, median %.4fs", mode.value, np, row.tx, row.best_s, row.median_s
                )
    return fill_metrics(report)
