"""Antenna radiation diagrams.

Diagrams are read from MSI-style text files:

    NAME sector65
    FREQUENCY 1843          # ignored
    GAIN 18.0 dBi           # dBd is accepted and converted (+2.15)
    HORIZONTAL 360
    0 0.0
    1 0.01
    ...
    VERTICAL 360
    0 0.0
    ...

Each plane holds one attenuation sample in dB per integer degree, with the main
lobe at 0 degrees. At load time each plane is shifted so that sample 0 is 0 dB;
a plane that attenuates less anywhere else is rejected.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.typing as npt

from radiocov.errors import DiagramFormatError
from radiocov.logging import get_logger

__all__ = [
    "PATTERN_SAMPLES",
    "DBD_TO_DBI",
    "AntennaDiagram",
    "DiagramSet",
    "pattern_lookup",
    "load_diagram",
    "load_diagram_dir",
]

logger = get_logger(__name__)

PATTERN_SAMPLES = 360
DBD_TO_DBI = 2.15

DIAGRAM_SUFFIXES = (".msi", ".txt", ".pln")

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, slots=True, eq=False)
class AntennaDiagram:
    """Horizontal and vertical attenuation patterns plus gain.

    Attributes:
        name: Identifier referenced by transmitters' ``diagram_id``
        gain_dbi: Main-lobe gain relative to an isotropic radiator
        horizontal: 360 samples, degrees clockwise from the beam direction
        vertical: 360 samples, degrees of depression from the beam axis
    """

    name: str
    gain_dbi: float
    horizontal: FloatArray = field(repr=False)
    vertical: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise DiagramFormatError("Diagram name must be non-empty")
        if not math.isfinite(self.gain_dbi):
            raise DiagramFormatError(f"Diagram {self.name}: gain must be finite, got {self.gain_dbi}")
        for plane in ("horizontal", "vertical"):
            samples = np.array(getattr(self, plane), dtype=np.float64, copy=True)
            if samples.shape != (PATTERN_SAMPLES,):
                raise DiagramFormatError(
                    f"Diagram {self.name}: {plane.upper()} needs {PATTERN_SAMPLES} samples, got {samples.size}"
                )
            if not np.all(np.isfinite(samples)) or np.any(samples < 0):
                raise DiagramFormatError(f"Diagram {self.name}: {plane.upper()} samples must be finite and >= 0")
            samples.flags.writeable = False
            object.__setattr__(self, plane, samples)

    @classmethod
    def isotropic(cls, name: str = "isotropic", gain_dbi: float = 0.0) -> AntennaDiagram:
        """Diagram with flat patterns."""
        zeros = np.zeros(PATTERN_SAMPLES, dtype=np.float64)
        return cls(name=name, gain_dbi=gain_dbi, horizontal=zeros, vertical=zeros)

    @property
    def is_isotropic(self) -> bool:
        return bool(not self.horizontal.any() and not self.vertical.any())

    def horizontal_at(self, angle_deg: float) -> float:
        return float(pattern_lookup(self.horizontal, angle_deg))

    def vertical_at(self, angle_deg: float) -> float:
        return float(pattern_lookup(self.vertical, angle_deg))

    def equals(self, other: AntennaDiagram) -> bool:
        return (
            self.name == other.name
            and self.gain_dbi == other.gain_dbi
            and bool(np.array_equal(self.horizontal, other.horizontal))
            and bool(np.array_equal(self.vertical, other.vertical))
        )


class DiagramSet(Mapping[str, AntennaDiagram]):
    """Diagrams keyed by name."""

    def __init__(self, diagrams: Mapping[str, AntennaDiagram] | None = None) -> None:
        self._diagrams: dict[str, AntennaDiagram] = dict(diagrams or {})

    def __getitem__(self, name: str) -> AntennaDiagram:
        try:
            return self._diagrams[name]
        except KeyError:
            raise KeyError(f"Unknown antenna diagram {name!r}; known: {sorted(self._diagrams)}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._diagrams)

    def __len__(self) -> int:
        return len(self._diagrams)

    def __repr__(self) -> str:
        return f"DiagramSet({sorted(self._diagrams)})"

    def add(self, diagram: AntennaDiagram) -> None:
        if diagram.name in self._diagrams:
            raise DiagramFormatError(f"Duplicate antenna diagram name {diagram.name!r}")
        self._diagrams[diagram.name] = diagram


def pattern_lookup(samples: FloatArray, angle_deg: float | FloatArray) -> FloatArray:
    """Linear interpolation between integer-degree samples, wrapping 359 -> 0.

    Works on scalars and arrays alike.

    Example:
        >>> s = np.zeros(360); s[359] = 2.0
        >>> float(pattern_lookup(s, 359.5))
        1.0
    """
    angle = np.mod(np.asarray(angle_deg, dtype=np.float64), 360.0)
    base = np.floor(angle)
    frac = angle - base
    i0 = base.astype(np.int64) % PATTERN_SAMPLES
    i1 = (i0 + 1) % PATTERN_SAMPLES
    return np.asarray(samples[i0] + frac * (samples[i1] - samples[i0]))


def _normalize(path: Path, name: str, plane: str, samples: FloatArray) -> FloatArray:
    """Shift a plane so the main-lobe sample at 0 degrees is 0 dB.

    Raises:
        DiagramFormatError: If another sample attenuates less than the main lobe
    """
    reference = float(samples[0])
    floor = int(np.argmin(samples))
    lowest = float(samples[floor])
    if lowest < reference:
        logger.error("Diagram %s: %s minimum is at %d degrees, not at 0", name, plane, floor)
        raise DiagramFormatError(
            f"{path}: {plane.upper()} main lobe must be at 0 degrees, but {floor} degrees attenuates "
            f"{lowest!r} dB against {reference!r} dB at 0"
        )
    return samples - reference


def _parse_gain(path: Path, lineno: int, tokens: list[str]) -> float:
    try:
        value = float(tokens[1])
    except (IndexError, ValueError):
        raise DiagramFormatError(f"{path}:{lineno}: GAIN needs a numeric value") from None
    unit = tokens[2].lower() if len(tokens) > 2 else "dbi"
    if unit == "dbi":
        return value
    if unit == "dbd":
        return value + DBD_TO_DBI
    raise DiagramFormatError(f"{path}:{lineno}: unknown GAIN unit {tokens[2]!r}, expected dBi or dBd")


def _parse_block(path: Path, block: str, lines: list[tuple[int, str]], start: int) -> tuple[FloatArray, int]:
    """Read one HORIZONTAL/VERTICAL block; returns samples and the index after it."""
    samples = np.full(PATTERN_SAMPLES, np.nan)
    seen = 0
    index = start
    while index < len(lines) and seen < PATTERN_SAMPLES:
        lineno, text = lines[index]
        tokens = text.split()
        if tokens[0].upper() in ("HORIZONTAL", "VERTICAL"):
            break
        try:
            degree = int(float(tokens[0]))
            value = float(tokens[1])
        except (IndexError, ValueError):
            raise DiagramFormatError(
                f"{path}:{lineno}: {block} sample must be '<deg> <att_db>', got {text!r}"
            ) from None
        if not 0 <= degree < PATTERN_SAMPLES:
            raise DiagramFormatError(f"{path}:{lineno}: {block} degree {degree} outside [0, 359]")
        if not math.isnan(samples[degree]):
            raise DiagramFormatError(f"{path}:{lineno}: {block} degree {degree} given twice")
        samples[degree] = value
        seen += 1
        index += 1
    if seen != PATTERN_SAMPLES:
        raise DiagramFormatError(f"{path}: {block} block has {seen} samples, expected {PATTERN_SAMPLES}")
    return samples, index


def load_diagram(path: Path | str) -> AntennaDiagram:
    """Load and normalize one diagram file.

    Raises:
        DiagramFormatError: On a missing NAME/block, a wrong sample count or a main lobe
            away from 0 degrees
    """
    path = Path(path)
    lines = [
        (lineno, stripped)
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1)
        if (stripped := raw.split("#", 1)[0].strip())
    ]

    name: str | None = None
    gain = 0.0
    planes: dict[str, FloatArray] = {}
    index = 0
    while index < len(lines):
        lineno, text = lines[index]
        tokens = text.split()
        key = tokens[0].upper()
        if key == "NAME":
            name = text.split(None, 1)[1].strip() if len(tokens) > 1 else ""
            index += 1
        elif key == "GAIN":
            gain = _parse_gain(path, lineno, tokens)
            index += 1
        elif key in ("HORIZONTAL", "VERTICAL"):
            if key in planes:
                raise DiagramFormatError(f"{path}:{lineno}: {key} block given twice")
            declared = tokens[1] if len(tokens) > 1 else str(PATTERN_SAMPLES)
            if declared != str(PATTERN_SAMPLES):
                raise DiagramFormatError(f"{path}:{lineno}: {key} block declares {declared} samples, expected 360")
            planes[key], index = _parse_block(path, key, lines, index + 1)
        elif key.isalpha():
            # other MSI header keys (FREQUENCY, TILT, COMMENT, ...)
            index += 1
        else:
            raise DiagramFormatError(f"{path}:{lineno}: unexpected line {text!r} outside a pattern block")

    if not name:
        raise DiagramFormatError(f"{path}: missing NAME")
    for block in ("HORIZONTAL", "VERTICAL"):
        if block not in planes:
            raise DiagramFormatError(f"{path}: missing {block} block")

    diagram = AntennaDiagram(
        name=name,
        gain_dbi=gain,
        horizontal=_normalize(path, name, "horizontal", planes["HORIZONTAL"]),
        vertical=_normalize(path, name, "vertical", planes["VERTICAL"]),
    )
    logger.debug("Loaded diagram %s (gain %.2f dBi) from %s", name, gain, path)
    return diagram


def load_diagram_dir(path: Path | str) -> DiagramSet:
    """Load every diagram file (``*.msi``, ``*.txt``, ``*.pln``) of a directory, keyed by NAME.

    Raises:
        DiagramFormatError: On a malformed file or two files with the same NAME
    """
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"Diagram directory not found: {path}")
    diagrams = DiagramSet()
    for file in sorted(p for p in path.iterdir() if p.suffix.lower() in DIAGRAM_SUFFIXES):
        diagrams.add(load_diagram(file))
    logger.info("Loaded %d antenna diagrams from %s", len(diagrams), path)
    return diagrams
