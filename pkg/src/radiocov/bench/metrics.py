"""Scalability metrics.

- Speedup: wall time of the parallel run on one worker over wall time on NP workers
- Efficiency: speedup per worker
- Gain: relative saving of MWD over MW at the same worker count, in percent

The base case of a speedup is always the parallel implementation on one
worker, never the serial engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.types import RunMode

__all__ = ["RunRecord", "speedup", "efficiency", "gain_pct"]

logger = get_logger(__name__)


@dataclass(frozen=True, slots=True)
class RunRecord:
    """Timing of one parallel run.

    Attributes:
        mode: MW or MWD
        workers: Number of worker processes (NP)
        tx_count: Number of transmitters predicted
        wall_clock_s: Master start to master end, in seconds
    """

    mode: RunMode
    workers: int
    tx_count: int
    wall_clock_s: float

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise DomainError(f"workers must be at least 1, got {self.workers}")
        if self.tx_count < 0:
            raise DomainError(f"tx_count cannot be negative, got {self.tx_count}")
        if not (math.isfinite(self.wall_clock_s) and self.wall_clock_s > 0.0):
            raise DomainError(f"wall_clock_s must be positive, got {self.wall_clock_s}")


def speedup(base: RunRecord, run: RunRecord) -> float:
    """``base.wall_clock_s / run.wall_clock_s``.

    Raises:
        DomainError: If ``base`` is not a one-worker run of the same mode and network size
    """
    if base.workers != 1:
        logger.error("Speedup base has %d workers", base.workers)
        raise DomainError(f"Speedup base must run on 1 worker, got {base.workers}")
    if base.mode is not run.mode or base.tx_count != run.tx_count:
        logger.error("Speedup instance mismatch: %s vs %s", base, run)
        raise DomainError(
            f"Speedup needs the same instance: base {base.mode.value}/{base.tx_count} tx, "
            f"run {run.mode.value}/{run.tx_count} tx"
        )
    return base.wall_clock_s / run.wall_clock_s


def efficiency(s: float, np: int) -> float:
    """Parallel efficiency ``s / np``."""
    if np < 1:
        raise DomainError(f"np must be at least 1, got {np}")
    return s / np


def gain_pct(mw_s: float, mwd_s: float) -> float:
    """``(MW - MWD) / MW * 100``; positive when MWD is faster."""
    if not mw_s > 0.0:
        raise DomainError(f"MW wall time must be positive, got {mw_s}")
    return (mw_s - mwd_s) / mw_s * 100.0
