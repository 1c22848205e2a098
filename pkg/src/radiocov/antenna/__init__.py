"""Antenna radiation diagrams and their influence on path loss."""

from __future__ import annotations

from radiocov.antenna.diagram import (
    DBD_TO_DBI,
    PATTERN_SAMPLES,
    AntennaDiagram,
    DiagramSet,
    load_diagram,
    load_diagram_dir,
    pattern_lookup,
)
from radiocov.antenna.influence import angles_to, apply_antenna

__all__ = [
    "PATTERN_SAMPLES",
    "DBD_TO_DBI",
    "AntennaDiagram",
    "DiagramSet",
    "pattern_lookup",
    "load_diagram",
    "load_diagram_dir",
    "angles_to",
    "apply_antenna",
]
