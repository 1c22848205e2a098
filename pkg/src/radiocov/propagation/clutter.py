"""Clutter category to signal-loss mapping.

The clutter raster stores land-usage category codes. A plain-text table maps
each code to an additional loss in dB:

    # code  loss_db
    1       0.0      # open land
    2       6.0      # suburban
    3       12.5     # dense urban

Codes missing from the table contribute 0 dB; each one is reported once.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Mapping
from pathlib import Path

import numpy as np
import numpy.typing as npt

from radiocov.errors import ClutterTableFormatError
from radiocov.logging import get_logger

__all__ = ["ClutterLossTable", "load_clutter_losses"]

logger = get_logger(__name__)


class ClutterLossTable:
    """Lookup from clutter category code to loss in dB.

    Example:
        >>> table = ClutterLossTable({1: 0.0, 2: 6.0})
        >>> table.loss_for(2)
        6.0
        >>> table.loss_for(9)  # unknown, warns once
        0.0
    """

    def __init__(self, losses: Mapping[int, float] | None = None) -> None:
        self._losses: dict[int, float] = {int(code): float(loss) for code, loss in (losses or {}).items()}
        for code, loss in self._losses.items():
            if not math.isfinite(loss):
                raise ClutterTableFormatError(f"Loss for clutter code {code} must be finite, got {loss}")
        self._warned: set[int] = set()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._losses)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ClutterLossTable):
            return NotImplemented
        return self._losses == other._losses

    def __repr__(self) -> str:
        return f"ClutterLossTable({self._losses!r})"

    def as_dict(self) -> dict[int, float]:
        """Copy of the code-to-loss mapping."""
        return dict(self._losses)

    def _warn_unknown(self, code: int) -> None:
        with self._lock:
            if code in self._warned:
                return
            self._warned.add(code)
        logger.warning("Unknown clutter code %d, assuming 0 dB loss", code)

    def loss_for(self, code: float) -> float:
        """Loss for one clutter sample (rounded to the nearest integer code)."""
        key = int(round(code))
        loss = self._losses.get(key)
        if loss is None:
            self._warn_unknown(key)
            return 0.0
        return loss

    def lookup(self, codes: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Vectorized :meth:`loss_for` over an array of clutter samples."""
        keys = np.rint(codes).astype(np.int64)
        result = np.zeros(codes.shape, dtype=np.float64)
        for key in np.unique(keys):
            code = int(key)
            loss = self._losses.get(code)
            if loss is None:
                self._warn_unknown(code)
                continue
            result[keys == key] = loss
        return result


def load_clutter_losses(path: Path | str) -> ClutterLossTable:
    """Load a clutter-loss table.

    Lines hold ``code loss_db``; ``#`` starts a comment.

    Raises:
        ClutterTableFormatError: On malformed lines or duplicate codes
    """
    path = Path(path)
    losses: dict[int, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ClutterTableFormatError(f"{path}:{lineno}: expected 'code loss_db', got {raw!r}")
        try:
            code = int(parts[0])
            loss = float(parts[1])
        except ValueError:
            raise ClutterTableFormatError(f"{path}:{lineno}: expected 'code loss_db', got {raw!r}") from None
        if code in losses:
            raise ClutterTableFormatError(f"{path}:{lineno}: duplicate clutter code {code}")
        losses[code] = loss

    logger.info("Loaded %d clutter codes from %s", len(losses), path)
    return ClutterLossTable(losses)
