"""Radiocov: terrain-aware radio coverage prediction.

Radiocov predicts the best-server received power of a transmitter network
with the COST-231 Walfisch-Ikegami model over a terrain raster, and runs the
same computation on a master-worker runtime that either returns every result
to the master (MW) or lets workers persist them to a result store (MWD).

Key Features:
    - Terrain line-of-sight with Fresnel clearance, knife-edge diffraction for NLOS
    - Clutter losses and per-transmitter antenna diagrams with azimuth and tilt
    - Parallel runs bit-identical to the serial engine
    - In-process channel or TCP transport, one wire format
    - Strong and weak scaling benchmarks with speedup, efficiency and MWD gain

Quick Start:
    >>> from radiocov import (
    ...     RunInputs, RunMode, FileResultStore, load_ascii_grid, load_diagram_dir,
    ...     load_transmitters, run_local,
    ... )
    >>>
    >>> inputs = RunInputs(
    ...     dem=load_ascii_grid("dem.asc"),
    ...     clutter=load_ascii_grid("clutter.asc"),
    ...     transmitters=load_transmitters("network.csv"),
    ...     diagrams=load_diagram_dir("diagrams/"),
    ... )
    >>> serial = inputs.serial()
    >>> run = run_local(inputs, workers=4, mode=RunMode.MWD, store=FileResultStore("run-001"))
    >>> assert run.coverage.equals(serial)
"""

__version__ = "0.1.0b1"
__author__ = "Radiocov Contributors"

import radiocov.logging

# Antenna diagrams
from radiocov.antenna import AntennaDiagram, DiagramSet, apply_antenna, load_diagram, load_diagram_dir

# Benchmarks
from radiocov.bench import BenchKnobs, RunRecord, efficiency, scaling_sweep, speedup

# Serial engine
from radiocov.engine import CoverageAccumulator, aggregate, predict_serial, predict_subgrid, predict_transmitter

# Errors
from radiocov.errors import (
    ConfigError,
    ConnectivityError,
    DomainError,
    ParseError,
    ProtocolError,
    RadiocovError,
    StoreError,
)

# Propagation model
from radiocov.propagation import (
    ClutterLossTable,
    PathLossField,
    PropagationParams,
    free_space_loss,
    line_of_sight,
    load_clutter_losses,
    los_loss,
    nlos_loss,
    path_loss_field,
)

# Parallel runtime
from radiocov.runtime import (
    MasterOptions,
    RunInputs,
    WorkerOptions,
    master_run,
    pair_audit,
    run_local,
    run_tcp,
    worker_run,
)

# Result store
from radiocov.store import FileResultStore, ResultStore

# Rasters
from radiocov.terrain import RasterGrid, RasterHeader, SubGrid, extract_subgrid, load_ascii_grid, write_ascii_grid
from radiocov.transmitters import load_transmitters, write_transmitters

# Value types
from radiocov.types import AntennaMount, GeoPoint, RunMode, ScalingMode, TransmitterConfig

__all__ = [
    "__version__",
    # Rasters
    "RasterHeader",
    "RasterGrid",
    "SubGrid",
    "extract_subgrid",
    "load_ascii_grid",
    "write_ascii_grid",
    # Value types
    "GeoPoint",
    "TransmitterConfig",
    "AntennaMount",
    "RunMode",
    "ScalingMode",
    "load_transmitters",
    "write_transmitters",
    # Propagation
    "PropagationParams",
    "ClutterLossTable",
    "load_clutter_losses",
    "PathLossField",
    "free_space_loss",
    "los_loss",
    "nlos_loss",
    "line_of_sight",
    "path_loss_field",
    # Antenna
    "AntennaDiagram",
    "DiagramSet",
    "load_diagram",
    "load_diagram_dir",
    "apply_antenna",
    # Engine
    "predict_subgrid",
    "predict_transmitter",
    "predict_serial",
    "aggregate",
    "CoverageAccumulator",
    # Runtime
    "RunInputs",
    "MasterOptions",
    "WorkerOptions",
    "master_run",
    "worker_run",
    "run_local",
    "run_tcp",
    "pair_audit",
    # Store
    "ResultStore",
    "FileResultStore",
    # Bench
    "BenchKnobs",
    "RunRecord",
    "speedup",
    "efficiency",
    "scaling_sweep",
    # Errors
    "RadiocovError",
    "DomainError",
    "ParseError",
    "ConfigError",
    "ConnectivityError",
    "ProtocolError",
    "StoreError",
]
