"""Synthetic terrain, clutter, diagrams and networks shared by the tests."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from radiocov.antenna import PATTERN_SAMPLES, AntennaDiagram, DiagramSet
from radiocov.propagation import ClutterLossTable, PropagationParams
from radiocov.runtime import RunInputs
from radiocov.terrain import RasterGrid, RasterHeader, write_ascii_grid
from radiocov.transmitters import write_transmitters
from radiocov.types import AntennaMount, GeoPoint, TransmitterConfig

CLUTTER_LOSSES = {1: 0.0, 2: 3.5, 3: 8.0, 4: 12.5}


def make_header(nrows: int = 20, ncols: int = 24, cellsize: float = 25.0) -> RasterHeader:
    return RasterHeader(ncols=ncols, nrows=nrows, xll=500000.0, yll=100000.0, cellsize=cellsize)


def hilly_dem(header: RasterHeader, seed: int = 0) -> RasterGrid:
    """Rolling hills with one east-west ridge, so both LOS and NLOS cells occur."""
    rng = np.random.default_rng(seed)
    east, north = header.cell_centers()
    x = east - header.xll
    y = north - header.yll
    z = 200.0 + 25.0 * np.sin(x / 90.0) + 15.0 * np.cos(y / 110.0) + rng.uniform(0.0, 4.0, size=header.shape)
    z[header.nrows // 2, :] += 45.0
    return RasterGrid(header=header, values=np.round(z, 3))


def clutter_codes(header: RasterHeader, seed: int = 0) -> RasterGrid:
    rng = np.random.default_rng(seed + 1000)
    return RasterGrid(header=header, values=rng.integers(1, 5, size=header.shape).astype(np.float64))


def sector_diagram(name: str = "sector65", gain_dbi: float = 15.0) -> AntennaDiagram:
    """65 degree horizontal, 10 degree vertical beam, 0 dB at boresight."""
    degrees = np.arange(PATTERN_SAMPLES, dtype=np.float64)
    offset = np.minimum(degrees, 360.0 - degrees)
    horizontal = np.minimum(12.0 * (offset / 65.0) ** 2, 25.0)
    vertical = np.minimum(12.0 * (offset / 10.0) ** 2, 20.0)
    return AntennaDiagram(name=name, gain_dbi=gain_dbi, horizontal=horizontal, vertical=vertical)


def make_diagrams() -> DiagramSet:
    return DiagramSet({"isotropic": AntennaDiagram.isotropic(), "sector65": sector_diagram()})


def make_network(
    header: RasterHeader,
    count: int,
    seed: int = 0,
    radius_km: float = 0.1,
    prefix: str = "tx",
) -> list[TransmitterConfig]:
    rng = np.random.default_rng(seed + 2000)
    transmitters = []
    for index in range(count):
        height = float(rng.choice([20.0, 30.0, 40.0]))
        transmitters.append(
            TransmitterConfig(
                id=f"{prefix}{index:03d}",
                position=GeoPoint(
                    header.xll + float(rng.uniform(0.05, 0.95)) * header.ncols * header.cellsize,
                    header.yll + float(rng.uniform(0.05, 0.95)) * header.nrows * header.cellsize,
                ),
                height_agl_m=height,
                power_dbm=float(rng.uniform(38.0, 46.0)),
                frequency_mhz=float(rng.choice([900.0, 1843.0, 2100.0])),
                radius_km=radius_km,
                mount=AntennaMount(
                    azimuth_deg=float(rng.integers(0, 36)) * 10.0,
                    mech_tilt_deg=float(rng.integers(0, 4)),
                    elec_tilt_deg=float(rng.integers(0, 3)),
                    height_agl_m=height,
                ),
                diagram_id="sector65" if index % 3 else "isotropic",
            )
        )
    return transmitters


def build_inputs(count: int, seed: int = 0, nrows: int = 20, ncols: int = 24, radius_km: float = 0.1) -> RunInputs:
    header = make_header(nrows, ncols)
    return RunInputs(
        dem=hilly_dem(header, seed),
        clutter=clutter_codes(header, seed),
        transmitters=make_network(header, count, seed, radius_km),
        diagrams=make_diagrams(),
        params=PropagationParams(),
        clutter_losses=ClutterLossTable(CLUTTER_LOSSES),
    )


def write_msi(diagram: AntennaDiagram, path: Path, gain_unit: str = "dBi") -> Path:
    gain = diagram.gain_dbi - 2.15 if gain_unit.lower() == "dbd" else diagram.gain_dbi
    lines = [f"NAME {diagram.name}", "FREQUENCY 1843", f"GAIN {gain!r} {gain_unit}", "HORIZONTAL 360"]
    lines += [f"{deg} {value!r}" for deg, value in enumerate(diagram.horizontal.tolist())]
    lines.append("VERTICAL 360")
    lines += [f"{deg} {value!r}" for deg, value in enumerate(diagram.vertical.tolist())]
    path.write_text("\n".join(lines) + "\n")
    return path


@dataclass(frozen=True)
class FixtureFiles:
    dem: Path
    clutter: Path
    clutter_losses: Path
    transmitters: Path
    diagrams: Path

    def flags(self) -> list[str]:
        return [
            "--dem", str(self.dem),
            "--clutter", str(self.clutter),
            "--clutter-losses", str(self.clutter_losses),
            "--transmitters", str(self.transmitters),
            "--diagrams", str(self.diagrams),
        ]


def write_fixture_files(inputs: RunInputs, directory: Path) -> FixtureFiles:
    directory.mkdir(parents=True, exist_ok=True)
    diagram_dir = directory / "diagrams"
    diagram_dir.mkdir(exist_ok=True)
    for diagram in inputs.diagrams.values():
        write_msi(diagram, diagram_dir / f"{diagram.name}.msi")
    table = directory / "clutter.tbl"
    table.write_text(
        "# code loss_db\n" + "".join(f"{code} {loss!r}\n" for code, loss in inputs.clutter_losses.as_dict().items())
    )
    files = FixtureFiles(
        dem=directory / "dem.asc",
        clutter=directory / "clutter.asc",
        clutter_losses=table,
        transmitters=directory / "network.csv",
        diagrams=diagram_dir,
    )
    write_ascii_grid(inputs.dem, files.dem)
    write_ascii_grid(inputs.clutter, files.clutter)
    write_transmitters(inputs.transmitters, files.transmitters)
    return files


@pytest.fixture
def header() -> RasterHeader:
    return make_header()


@pytest.fixture
def dem(header: RasterHeader) -> RasterGrid:
    return hilly_dem(header)


@pytest.fixture
def clutter(header: RasterHeader) -> RasterGrid:
    return clutter_codes(header)


@pytest.fixture
def diagrams() -> DiagramSet:
    return make_diagrams()


@pytest.fixture
def clutter_losses() -> ClutterLossTable:
    return ClutterLossTable(CLUTTER_LOSSES)


@pytest.fixture
def make_inputs() -> Callable[..., RunInputs]:
    return build_inputs


@pytest.fixture
def small_inputs() -> RunInputs:
    return build_inputs(6, seed=3)


@pytest.fixture
def fixture_files(tmp_path: Path) -> FixtureFiles:
    return write_fixture_files(build_inputs(5, seed=7), tmp_path / "inputs")
