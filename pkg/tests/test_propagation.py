"""Tests for line of sight, the Walfisch-Ikegami loss terms and clutter."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from radiocov.errors import ClutterTableFormatError, DomainError
from radiocov.propagation import (
    SPEED_OF_LIGHT_MHZ_M,
    ClutterLossTable,
    PropagationParams,
    TerrainProfile,
    cell_path_loss,
    free_space_loss,
    fresnel_radius,
    knife_edge_loss,
    line_of_sight,
    load_clutter_losses,
    los_loss,
    multi_screen_loss,
    nlos_loss,
    path_loss_field,
    rooftop_to_street_loss,
    slant_distances_km,
    street_orientation_loss,
    terrain_profile,
    walk_offsets,
)
from radiocov.terrain import RasterGrid, RasterHeader, SubGrid
from radiocov.types import AntennaMount, GeoPoint, MultiScreenModel, TransmitterConfig

Cell = tuple[int, int]


def _window(values: np.ndarray, cellsize: float = 25.0) -> SubGrid:
    nrows, ncols = values.shape
    header = RasterHeader(ncols=ncols, nrows=nrows, xll=0.0, yll=0.0, cellsize=cellsize)
    return SubGrid(parent_offset=(0, 0), grid=RasterGrid(header=header, values=values))


def _entry_time(drow: int, dcol: int, row: int, col: int) -> Fraction | None:
    """Parameter where the segment (0,0)->(dcol,drow) enters the closed unit square of a cell, or None."""
    t0, t1 = Fraction(0), Fraction(1)
    half = Fraction(1, 2)
    for p, q in (
        (-dcol, -(col - half)),
        (dcol, col + half),
        (-drow, -(row - half)),
        (drow, row + half),
    ):
        if p == 0:
            if q < 0:
                return None
            continue
        t = Fraction(q) / p
        if p < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
    return t0 if t0 <= t1 else None


def _touched_cells(drow: int, dcol: int) -> dict[Cell, Fraction]:
    touched = {}
    for row in range(min(0, drow) - 1, max(0, drow) + 2):
        for col in range(min(0, dcol) - 1, max(0, dcol) + 2):
            entry = _entry_time(drow, dcol, row, col)
            if entry is not None:
                touched[(row, col)] = entry
    return touched


def _oracle_los(dem: SubGrid, tx_cell: Cell, tx_height: float, rx_height: float, f_mhz: float) -> np.ndarray:
    values = dem.grid.values
    cs = dem.grid.cellsize
    wavelength = SPEED_OF_LIGHT_MHZ_M / f_mhz
    tip = values[tx_cell] + tx_height
    los = np.ones(dem.shape, dtype=bool)
    for row in range(dem.shape[0]):
        for col in range(dem.shape[1]):
            drow, dcol = row - tx_cell[0], col - tx_cell[1]
            if (drow, dcol) == (0, 0):
                continue
            total = math.hypot(drow, dcol) * cs
            rx_point = values[row, col] + rx_height
            for (r, c) in _touched_cells(drow, dcol):
                if (r, c) in ((0, 0), (drow, dcol)):
                    continue
                t = min(max((r * drow + c * dcol) / (drow * drow + dcol * dcol), 0.0), 1.0)
                d1 = t * total
                sightline = tip + t * (rx_point - tip)
                radius = math.sqrt(max(wavelength * d1 * (total - d1) / total, 0.0))
                if values[tx_cell[0] + r, tx_cell[1] + c] > sightline - radius:
                    los[row, col] = False
                    break
    return los


# Walk


@given(drow=st.integers(-12, 12), dcol=st.integers(-12, 12))
def test_walk_is_the_segment_supercover(drow: int, dcol: int) -> None:
    rows, cols = walk_offsets(drow, dcol)
    walk = list(zip(rows.tolist(), cols.tolist(), strict=True))
    touched = _touched_cells(drow, dcol)

    assert walk[0] == (0, 0)
    assert walk[-1] == (drow, dcol)
    assert len(set(walk)) == len(walk)
    assert set(walk) == set(touched)
    entries = [touched[cell] for cell in walk]
    assert entries == sorted(entries)


def test_diagonal_walk_visits_corner_cells() -> None:
    rows, cols = walk_offsets(2, 2)
    assert set(zip(rows.tolist(), cols.tolist(), strict=True)) == {
        (0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2),
    }


# Line of sight


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_line_of_sight_matches_exhaustive_oracle(seed: int) -> None:
    rng = np.random.default_rng(seed)
    values = np.round(rng.uniform(100.0, 160.0, size=(16, 16)), 2)
    dem = _window(values)
    tx_cell = (int(rng.integers(0, 16)), int(rng.integers(0, 16)))
    tx_height = float(rng.choice([10.0, 30.0]))

    mask = line_of_sight(dem, tx_cell, tx_height, 1.5, 1843.0)

    expected = _oracle_los(dem, tx_cell, tx_height, 1.5, 1843.0)
    assert np.array_equal(mask.los, expected)
    assert set(mask.obstacles) == {(int(r), int(c)) for r, c in zip(*np.nonzero(~expected), strict=True)}


def test_flat_terrain_is_line_of_sight() -> None:
    mask = line_of_sight(_window(np.full((9, 9), 50.0)), (4, 4), 30.0, 1.5, 900.0)
    assert mask.los.all()
    assert mask.nlos_count == 0


def test_ridge_blocks_cells_behind_it() -> None:
    values = np.full((9, 9), 50.0)
    values[3, :] = 120.0
    mask = line_of_sight(_window(values), (6, 4), 20.0, 1.5, 1843.0)
    assert not mask.los[0:3, :].any()
    assert mask.los[5:, :].all()
    assert mask.obstacle_cells(0, 4) == [(3, 4)]


def test_nodata_samples_never_obstruct() -> None:
    values = np.full((5, 5), 50.0)
    values[2, :] = -9999.0
    mask = line_of_sight(_window(values), (4, 2), 10.0, 1.5, 1843.0)
    assert mask.los[0, 2]


def test_line_of_sight_rejects_bad_transmitter_cell() -> None:
    values = np.full((4, 4), 10.0)
    values[1, 1] = -9999.0
    with pytest.raises(DomainError):
        line_of_sight(_window(values), (4, 0), 10.0, 1.5, 1843.0)
    with pytest.raises(DomainError, match="no terrain data"):
        line_of_sight(_window(values), (1, 1), 10.0, 1.5, 1843.0)


def test_lower_clearance_unblocks_grazing_paths() -> None:
    values = np.full((1, 9), 0.0)
    # 2 m below the straight ray; the first Fresnel radius there is about 2.85 m at 1843 MHz
    values[0, 4] = 28.0
    dem = _window(values)
    full = line_of_sight(dem, (0, 0), 30.0, 30.0, 1843.0, clearance=1.0)
    half = line_of_sight(dem, (0, 0), 30.0, 30.0, 1843.0, clearance=0.5)
    assert not full.los[0, 8]
    assert half.los[0, 8]


# Loss terms


def test_reference_losses_at_one_km_and_one_mhz() -> None:
    assert free_space_loss(1.0, 1.0) == pytest.approx(32.45, abs=1e-9)
    assert los_loss(1.0, 1.0) == pytest.approx(42.64, abs=1e-9)


@pytest.mark.parametrize(
    ("loss", "d", "f", "expected"),
    [
        (free_space_loss, 2.0, 1.0, 38.4706),
        (free_space_loss, 1.0, 1843.0, 97.7605),
        (los_loss, 10.0, 1.0, 68.64),
        (los_loss, 1.0, 1000.0, 102.64),
    ],
)
def test_hand_computed_losses(loss: Callable[[float, float], float], d: float, f: float, expected: float) -> None:
    assert loss(d, f) == pytest.approx(expected, abs=1e-3)


@given(
    d=st.floats(0.001, 50.0),
    f=st.floats(800.0, 2600.0),
    factor=st.floats(1.01, 10.0),
)
def test_losses_grow_with_distance_and_frequency(d: float, f: float, factor: float) -> None:
    assert free_space_loss(d * factor, f) > free_space_loss(d, f)
    assert los_loss(d * factor, f) > los_loss(d, f)
    assert free_space_loss(d, f * factor) > free_space_loss(d, f)
    assert los_loss(d, f * factor) > los_loss(d, f)


def test_losses_are_monotone_over_ten_thousand_samples() -> None:
    rng = np.random.default_rng(7)
    distances = rng.uniform(0.001, 50.0, 10_000)
    frequencies = rng.uniform(800.0, 2600.0, 10_000)
    factors = rng.uniform(1.001, 4.0, 10_000)
    for d, f, k in zip(distances.tolist(), frequencies.tolist(), factors.tolist(), strict=True):
        assert free_space_loss(d * k, f) > free_space_loss(d, f)
        assert los_loss(d, f * k) > los_loss(d, f)


@pytest.mark.parametrize(("d", "f"), [(0.0, 900.0), (-1.0, 900.0), (1.0, 0.0)])
def test_losses_reject_non_positive_arguments(d: float, f: float) -> None:
    with pytest.raises(DomainError):
        free_space_loss(d, f)
    with pytest.raises(DomainError):
        los_loss(d, f)


def test_knife_edge_loss() -> None:
    assert knife_edge_loss(0.0) == pytest.approx(6.03, abs=0.01)
    assert knife_edge_loss(-0.7) == 0.0
    assert knife_edge_loss(-3.0) == 0.0
    assert knife_edge_loss(2.4) > 20.0


@given(a=st.floats(-5.0, 20.0), b=st.floats(-5.0, 20.0))
def test_knife_edge_loss_is_monotone_and_non_negative(a: float, b: float) -> None:
    low, high = sorted((a, b))
    assert 0.0 <= knife_edge_loss(low) <= knife_edge_loss(high)


def test_fresnel_radius() -> None:
    wavelength = SPEED_OF_LIGHT_MHZ_M / 900.0
    assert fresnel_radius(500.0, 500.0, 900.0) == pytest.approx(math.sqrt(wavelength * 250.0))
    assert fresnel_radius(0.0, 1000.0, 900.0) == 0.0


def test_street_orientation_loss_branches() -> None:
    assert street_orientation_loss(0.0) == pytest.approx(-10.0)
    assert street_orientation_loss(40.0) == pytest.approx(2.875)
    assert street_orientation_loss(90.0) == pytest.approx(0.01)


def test_rooftop_to_street_loss_with_defaults() -> None:
    params = PropagationParams()
    expected = (
        -16.9 - 10.0 * math.log10(25.0) + 10.0 * math.log10(1843.0) + 20.0 * math.log10(13.5) + 0.01
    )
    assert rooftop_to_street_loss(params) == pytest.approx(expected)
    assert rooftop_to_street_loss(params, 900.0) < rooftop_to_street_loss(params)


def test_nlos_loss_sums_knife_edges() -> None:
    profile = TerrainProfile(
        distances_m=np.array([100.0, 200.0]),
        heights_m=np.array([60.0, 40.0]),
        tx_tip_m=50.0,
        rx_point_m=20.0,
        total_m=300.0,
    )
    params = PropagationParams()
    single = nlos_loss(profile, [0], 0.3, 1843.0, params)
    both = nlos_loss(profile, [0, 1], 0.3, 1843.0, params)
    assert single >= 0.0
    assert both > single
    with pytest.raises(DomainError, match="at least one obstacle"):
        nlos_loss(profile, [], 0.3, 1843.0, params)


def test_multi_screen_loss_above_the_roofs() -> None:
    params = PropagationParams(building_separation_m=40.0)
    kf = -4.0 + 0.7 * (1843.0 / 925.0 - 1.0)
    expected = (
        -18.0 * math.log10(16.0)
        + 54.0
        + 18.0 * math.log10(0.8)
        + kf * math.log10(1843.0)
        - 9.0 * math.log10(40.0)
    )
    assert multi_screen_loss(0.8, 1843.0, 30.0, params) == pytest.approx(expected, abs=1e-9)


def test_multi_screen_loss_below_the_roofs_near_the_mast() -> None:
    params = PropagationParams()
    kf = -4.0 + 0.7 * (900.0 / 925.0 - 1.0)
    # 5 m under the roofs, 250 m away: ka = 54 + 0.8 * 5 * 0.5, kd = 18 + 15 * 5 / 15
    expected = 56.0 + 23.0 * math.log10(0.25) + kf * math.log10(900.0) - 9.0 * math.log10(50.0)
    assert multi_screen_loss(0.25, 900.0, 10.0, params) == pytest.approx(expected, abs=1e-9)


def test_denser_buildings_lose_more() -> None:
    sparse = PropagationParams(building_separation_m=80.0)
    dense = sparse.replace(building_separation_m=20.0)
    assert multi_screen_loss(1.0, 1843.0, 30.0, dense) - multi_screen_loss(1.0, 1843.0, 30.0, sparse) == (
        pytest.approx(9.0 * math.log10(4.0))
    )


def test_closed_multi_screen_form_in_nlos_loss() -> None:
    profile = TerrainProfile(
        distances_m=np.array([100.0]), heights_m=np.array([60.0]), tx_tip_m=50.0, rx_point_m=20.0, total_m=300.0
    )
    params = PropagationParams(multi_screen=MultiScreenModel.COST231)
    expected = rooftop_to_street_loss(params) + multi_screen_loss(0.3, 1843.0, 30.0, params)
    assert nlos_loss(profile, [0], 0.3, 1843.0, params, tx_height_m=30.0) == pytest.approx(max(0.0, expected))
    with pytest.raises(DomainError, match="antenna height"):
        nlos_loss(profile, [0], 0.3, 1843.0, params)


def test_params_validation() -> None:
    assert PropagationParams().frequency_mhz == 1843.0
    with pytest.raises(ValidationError):
        PropagationParams(frequency_mhz=700.0)
    with pytest.raises(ValidationError):
        PropagationParams(roof_height_m=1.0, rx_height_m=1.5)
    with pytest.raises(ValidationError):
        PropagationParams().replace(street_orientation_deg=120.0)


# Field


def test_path_loss_field_matches_scalar_composition() -> None:
    values = np.full((5, 5), 100.0)
    values[1, :] = 140.0
    values[3, 4] = 104.0
    dem = _window(values)
    clutter = _window(np.array([[1.0, 2.0, 3.0, 4.0, 9.0]] * 5))
    table = ClutterLossTable({1: 0.0, 2: 3.5, 3: 8.0, 4: 12.5})
    params = PropagationParams()
    tx = TransmitterConfig(
        id="center",
        position=dem.grid.header.cell_center(2, 2),
        height_agl_m=5.0,
        power_dbm=43.0,
        frequency_mhz=1843.0,
        radius_km=1.0,
        mount=AntennaMount(azimuth_deg=0.0, mech_tilt_deg=0.0, elec_tilt_deg=0.0, height_agl_m=5.0),
        diagram_id="isotropic",
    )
    mask = line_of_sight(dem, (2, 2), 5.0, params.rx_height_m, 1843.0)
    assert mask.nlos_count > 0

    field = path_loss_field(dem, clutter, mask, tx, params, table)

    tip = values[2, 2] + 5.0
    for row in range(5):
        for col in range(5):
            centre = dem.grid.header.cell_center(row, col)
            horizontal = math.hypot(centre.easting - tx.position.easting, centre.northing - tx.position.northing)
            d_km = max(math.hypot(horizontal, values[row, col] + 1.5 - tip) / 1000.0, 0.001)
            if mask.is_los(row, col):
                branch = los_loss(d_km, 1843.0)
            else:
                profile, _, _ = terrain_profile(dem, (2, 2), (row, col), 5.0, 1.5)
                obstructed = nlos_loss(profile, mask.obstacles_at(row, col), d_km, 1843.0, params)
                branch = max(los_loss(d_km, 1843.0), obstructed)
            expected = cell_path_loss(d_km, 1843.0, table.loss_for(clutter.grid.values[row, col]), branch)
            assert field.loss_db[row, col] == pytest.approx(expected, abs=1e-9)


def test_path_loss_field_marks_out_of_range_cells(dem: RasterGrid) -> None:
    window = SubGrid(parent_offset=(0, 0), grid=RasterGrid(header=dem.header, values=dem.values))
    clutter = SubGrid(parent_offset=(0, 0), grid=RasterGrid.filled(dem.header, 1.0))
    tx = TransmitterConfig(
        id="corner",
        position=GeoPoint(dem.header.xll + 10.0, dem.header.ymax - 10.0),
        height_agl_m=30.0,
        power_dbm=43.0,
        frequency_mhz=900.0,
        radius_km=0.1,
        mount=AntennaMount(azimuth_deg=0.0, mech_tilt_deg=0.0, elec_tilt_deg=0.0, height_agl_m=30.0),
        diagram_id="isotropic",
    )
    mask = line_of_sight(window, (0, 0), 30.0, 1.5, 900.0)
    field = path_loss_field(window, clutter, mask, tx, PropagationParams())
    assert field.loss_db[0, 0] != dem.nodata
    assert field.loss_db[10, 10] == dem.nodata
    assert 0 < field.valid_count < dem.header.cell_count


def _mast(dem: SubGrid, cell: Cell, height: float = 30.0, radius_km: float = 1.0) -> TransmitterConfig:
    return TransmitterConfig(
        id="mast",
        position=dem.grid.header.cell_center(*cell),
        height_agl_m=height,
        power_dbm=43.0,
        frequency_mhz=1843.0,
        radius_km=radius_km,
        mount=AntennaMount(height_agl_m=height),
        diagram_id="isotropic",
    )


def _flat_field(size: int, radius_km: float = 1.0) -> np.ndarray:
    dem = _window(np.full((size, size), 50.0))
    clutter = _window(np.ones((size, size)))
    center = (size // 2, size // 2)
    mask = line_of_sight(dem, center, 30.0, 1.5, 1843.0)
    return path_loss_field(dem, clutter, mask, _mast(dem, center, radius_km=radius_km), PropagationParams()).loss_db


def test_flat_terrain_field_is_radially_symmetric() -> None:
    loss = _flat_field(11)
    assert np.allclose(loss, loss[::-1, :], rtol=0.0, atol=1e-9)
    assert np.allclose(loss, loss[:, ::-1], rtol=0.0, atol=1e-9)
    assert np.allclose(loss, loss.T, rtol=0.0, atol=1e-9)
    # a (3, 4) cell offset lies 125 m out, like a 5 cell step along a row
    assert loss[8, 9] == pytest.approx(loss[0, 5], abs=1e-9)
    assert loss[2, 1] == pytest.approx(loss[5, 10], abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(radius_km=st.floats(0.02, 0.25))
def test_only_cells_within_the_radius_carry_a_loss(radius_km: float) -> None:
    size = 17
    loss = _flat_field(size, radius_km)
    header = _window(np.zeros((size, size))).grid.header
    eastings, northings = header.cell_centers()
    centre = header.cell_center(size // 2, size // 2)
    inside = np.hypot(eastings - centre.easting, northings - centre.northing) <= radius_km * 1000.0

    assert np.array_equal(loss != header.nodata, inside)
    assert np.isfinite(loss[inside]).all()
    assert (loss[inside] > 0.0).all()


def test_obstructed_cells_never_lose_less_than_line_of_sight() -> None:
    values = np.full((11, 11), 50.0)
    values[3, :] = 130.0
    dem = _window(values)
    clutter = _window(np.ones((11, 11)))
    tx = _mast(dem, (8, 5), height=20.0)
    mask = line_of_sight(dem, (8, 5), 20.0, 1.5, 1843.0)
    assert mask.nlos_count > 0

    field = path_loss_field(dem, clutter, mask, tx, PropagationParams())

    _, d_km = slant_distances_km(dem, tx, 1.5)
    for row, col in mask.obstacles:
        floor = free_space_loss(float(d_km[row, col]), 1843.0) + los_loss(float(d_km[row, col]), 1843.0)
        assert field.loss_db[row, col] >= floor - 1e-9


def test_closed_multi_screen_form_leaves_clear_cells_alone() -> None:
    values = np.full((11, 11), 50.0)
    values[3, :] = 130.0
    dem = _window(values)
    clutter = _window(np.ones((11, 11)))
    tx = _mast(dem, (8, 5), height=20.0)
    mask = line_of_sight(dem, (8, 5), 20.0, 1.5, 1843.0)

    edges = path_loss_field(dem, clutter, mask, tx, PropagationParams())
    closed = path_loss_field(dem, clutter, mask, tx, PropagationParams(multi_screen=MultiScreenModel.COST231))

    assert np.array_equal(edges.loss_db[mask.los], closed.loss_db[mask.los])
    assert closed.valid_count == edges.valid_count


# Clutter


def test_load_clutter_losses(tmp_path: Path) -> None:
    path = tmp_path / "clutter.tbl"
    path.write_text("# code loss\n1 0.0\n\n2 6.0  # suburban\n3 12.5\n")
    table = load_clutter_losses(path)
    assert table.as_dict() == {1: 0.0, 2: 6.0, 3: 12.5}
    assert np.array_equal(table.lookup(np.array([[1.0, 3.0], [2.0, 2.0]])), np.array([[0.0, 12.5], [6.0, 6.0]]))


@pytest.mark.parametrize("body", ["1 0.0\n1 2.0\n", "1\n", "one 2.0\n", "1 2.0 3.0\n"])
def test_malformed_clutter_table(tmp_path: Path, body: str) -> None:
    path = tmp_path / "clutter.tbl"
    path.write_text(body)
    with pytest.raises(ClutterTableFormatError, match=":1:|:2:"):
        load_clutter_losses(path)


def test_unknown_clutter_code_warns_once(caplog: pytest.LogCaptureFixture) -> None:
    table = ClutterLossTable({1: 4.0})
    with caplog.at_level(logging.WARNING, logger="radiocov"):
        assert table.loss_for(7) == 0.0
        assert table.lookup(np.array([7.0, 7.0, 1.0])).tolist() == [0.0, 0.0, 4.0]
    warnings = [record for record in caplog.records if "Unknown clutter code 7" in record.getMessage()]
    assert len(warnings) == 1
