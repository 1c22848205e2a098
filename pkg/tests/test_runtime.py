"""Tests for the master-worker runtime: codec, transports, protocol and equivalence with the serial path."""

from __future__ import annotations

import random
import socket
import struct
import threading
from functools import cache
from pathlib import Path

import numpy as np
import pytest
from conftest import build_inputs

from radiocov.engine import cut_subgrids, predict_subgrid
from radiocov.errors import ConfigError, ConnectivityError, FrameError, ProtocolError, WorkerLostError
from radiocov.propagation import ClutterLossTable, PathLossField
from radiocov.runtime import (
    TRANSPORT_ENV,
    Assignment,
    ChannelHub,
    Endpoint,
    Idle,
    KeepAlive,
    MasterOptions,
    MessageTrace,
    Metadata,
    Result,
    RunInputs,
    Stop,
    TcpMasterLink,
    TcpWorkerListener,
    WorkerOptions,
    decode_frame,
    encode_frame,
    master_run,
    pair_audit,
    parse_endpoint,
    parse_endpoints,
    resolve_transport,
    run_local,
    worker_run,
)
from radiocov.store import FileResultStore
from radiocov.terrain import RasterGrid
from radiocov.types import Direction, MessageTag, MultiScreenModel, RunMode, TransportKind


@cache
def network(count: int) -> tuple[RunInputs, RasterGrid]:
    inputs = build_inputs(count, seed=count)
    return inputs, inputs.serial()


def _assert_sound(inputs: RunInputs, trace: MessageTrace) -> None:
    assert pair_audit(trace) == []
    assignments = trace.assignments()
    assert sorted(assignments) == sorted(tx.id for tx in inputs.transmitters)
    assert set(assignments.values()) <= {1}
    for worker_id in trace.worker_ids():
        assert trace.tags(worker_id)[0] is MessageTag.METADATA


# Codec


def test_assignment_frame_preserves_windows_bit_for_bit(small_inputs: RunInputs) -> None:
    tx = small_inputs.transmitters[1]
    dem_sub, clutter_sub = cut_subgrids(small_inputs.dem, small_inputs.clutter, tx)

    decoded = decode_frame(encode_frame(Assignment(tx=tx, dem=dem_sub, clutter=clutter_sub)))

    assert isinstance(decoded, Assignment)
    assert decoded.tx == tx
    assert decoded.dem.parent_offset == dem_sub.parent_offset
    assert decoded.dem.grid.header == dem_sub.grid.header
    assert decoded.dem.grid.values.tobytes() == dem_sub.grid.values.tobytes()
    assert decoded.clutter.grid.values.tobytes() == clutter_sub.grid.values.tobytes()


def test_result_frame_preserves_losses_bit_for_bit(small_inputs: RunInputs) -> None:
    tx = small_inputs.transmitters[0]
    dem_sub, clutter_sub = cut_subgrids(small_inputs.dem, small_inputs.clutter, tx)
    path_loss = predict_subgrid(
        dem_sub, clutter_sub, tx, small_inputs.diagrams[tx.diagram_id], small_inputs.params, small_inputs.clutter_losses
    )

    decoded = decode_frame(encode_frame(Result(tx_id=tx.id, path_loss=path_loss)))

    assert isinstance(decoded, Result)
    assert decoded.tx_id == tx.id
    assert decoded.path_loss.equals(path_loss)
    assert decoded.path_loss.loss_db.tobytes() == path_loss.loss_db.tobytes()


def test_metadata_frame(small_inputs: RunInputs) -> None:
    msg = Metadata(
        worker_id=3,
        params=small_inputs.params.replace(street_width_m=18.5),
        clutter_losses=small_inputs.clutter_losses,
        diagrams=small_inputs.diagrams,
        extent=small_inputs.dem.header,
    )
    decoded = decode_frame(encode_frame(msg))
    assert isinstance(decoded, Metadata)
    assert decoded.worker_id == 3
    assert decoded.params == msg.params
    assert decoded.clutter_losses == msg.clutter_losses
    assert decoded.extent == msg.extent
    assert sorted(decoded.diagrams) == sorted(msg.diagrams)
    for name, diagram in msg.diagrams.items():
        assert decoded.diagrams[name].equals(diagram)


@pytest.mark.parametrize("msg", [Idle(worker_id=7), KeepAlive(), Stop()])
def test_small_frames(msg: Idle | KeepAlive | Stop) -> None:
    assert decode_frame(encode_frame(msg)) == msg


def test_metadata_frame_carries_the_multi_screen_model(small_inputs: RunInputs) -> None:
    msg = Metadata(
        worker_id=0,
        params=small_inputs.params.replace(multi_screen=MultiScreenModel.COST231, building_separation_m=35.0),
        clutter_losses=small_inputs.clutter_losses,
        diagrams=small_inputs.diagrams,
        extent=small_inputs.dem.header,
    )
    decoded = decode_frame(encode_frame(msg))
    assert isinstance(decoded, Metadata)
    assert decoded.params.multi_screen is MultiScreenModel.COST231
    assert decoded.params.building_separation_m == 35.0


def test_unencodable_clutter_code_is_a_frame_error(small_inputs: RunInputs) -> None:
    msg = Metadata(
        worker_id=0,
        params=small_inputs.params,
        clutter_losses=ClutterLossTable({2**31: 4.0}),
        diagrams=small_inputs.diagrams,
        extent=small_inputs.dem.header,
    )
    with pytest.raises(FrameError, match="Cannot encode"):
        encode_frame(msg)


def test_malformed_frames() -> None:
    idle = encode_frame(Idle(worker_id=1))
    with pytest.raises(FrameError, match="too short"):
        decode_frame(idle[:4])
    with pytest.raises(FrameError, match="length field"):
        decode_frame(idle + b"\x00")
    with pytest.raises(FrameError, match="Unknown message tag"):
        decode_frame(struct.pack("<IB", 1, 99))
    with pytest.raises(FrameError):
        decode_frame(struct.pack("<IB", 3, MessageTag.IDLE) + b"\x01\x00")
    with pytest.raises(FrameError):
        decode_frame(struct.pack("<IB", 6, MessageTag.IDLE) + b"\x01\x00\x00\x00\xff")


# Equivalence with the serial path


@pytest.mark.parametrize("count", [3, 16, 64])
@pytest.mark.parametrize("workers", [1, 2, 4, 8])
@pytest.mark.parametrize("mode", [RunMode.MW, RunMode.MWD])
def test_parallel_equals_serial(tmp_path: Path, count: int, workers: int, mode: RunMode) -> None:
    inputs, serial = network(count)
    store = FileResultStore(tmp_path / "store") if mode is RunMode.MWD else None

    run = run_local(inputs, workers, mode, store=store)

    assert run.coverage.equals(serial)
    _assert_sound(inputs, run.trace)
    assert sum(len(report.assignments) for report in run.worker_reports) == count
    assert len(run.worker_reports) == workers
    if store is not None:
        assert store.table_ids() == sorted(tx.id for tx in inputs.transmitters)


@pytest.mark.parametrize("mode", [RunMode.MW, RunMode.MWD])
def test_serialized_channels_equal_serial(tmp_path: Path, mode: RunMode) -> None:
    inputs, serial = network(16)
    store = FileResultStore(tmp_path) if mode is RunMode.MWD else None
    run = run_local(inputs, 4, mode, store=store, serialize=True)
    assert run.coverage.equals(serial)


@pytest.mark.integration
@pytest.mark.parametrize("mode", [RunMode.MW, RunMode.MWD])
def test_loopback_tcp_equals_serial(tmp_path: Path, mode: RunMode) -> None:
    inputs, serial = network(16)
    store = FileResultStore(tmp_path) if mode is RunMode.MWD else None
    run = run_local(inputs, 3, mode, store=store, transport=TransportKind.TCP)
    assert run.coverage.equals(serial)
    _assert_sound(inputs, run.trace)
    assert len(run.worker_reports) == 3


@pytest.mark.parametrize(
    ("mode", "per_transmitter"),
    [
        (RunMode.MWD, [MessageTag.IDLE, MessageTag.KEEP_ALIVE, MessageTag.ASSIGNMENT]),
        (RunMode.MW, [MessageTag.IDLE, MessageTag.KEEP_ALIVE, MessageTag.ASSIGNMENT, MessageTag.RESULT]),
    ],
)
def test_single_worker_trace_for_three_transmitters(
    tmp_path: Path, mode: RunMode, per_transmitter: list[MessageTag]
) -> None:
    inputs = build_inputs(3, seed=11, nrows=12, ncols=12, radius_km=0.05)
    store = FileResultStore(tmp_path / "store") if mode is RunMode.MWD else None

    run = run_local(inputs, 1, mode, store=store)

    expected = [MessageTag.METADATA, *per_transmitter * 3, MessageTag.IDLE, MessageTag.STOP]
    assert run.trace.tags(0) == expected
    assert pair_audit(run.trace) == []


def test_empty_network_stops_every_worker(small_inputs: RunInputs) -> None:
    inputs = small_inputs.with_transmitters([])
    run = run_local(inputs, 3, RunMode.MW)
    assert run.coverage.nodata_mask().all()
    assert pair_audit(run.trace) == []
    for worker_id in range(3):
        assert run.trace.tags(worker_id) == [MessageTag.METADATA, MessageTag.IDLE, MessageTag.STOP]
    assert all(report.assignments == [] for report in run.worker_reports)


def test_randomized_delays_always_terminate(tmp_path: Path) -> None:
    inputs = build_inputs(4, seed=42, nrows=12, ncols=12, radius_km=0.05)
    serial = inputs.serial()
    rng = random.Random(2024)
    for index in range(100):
        mode = rng.choice([RunMode.MW, RunMode.MWD])
        store = FileResultStore(tmp_path / f"run{index}") if mode is RunMode.MWD else None
        run = run_local(
            inputs,
            rng.randint(1, 4),
            mode,
            store=store,
            master_options=MasterOptions(master_delay_s=rng.uniform(0.0, 0.001), idle_timeout_s=10.0),
            worker_options=WorkerOptions(
                compute_delay_s=rng.uniform(0.0, 0.001),
                persist_delay_s=rng.uniform(0.0, 0.001),
                recv_timeout_s=10.0,
            ),
            link_delay_s=rng.uniform(0.0, 0.001),
        )
        assert run.coverage.equals(serial), f"run {index} ({mode.value})"
        assert pair_audit(run.trace) == [], f"run {index} ({mode.value})"


@pytest.mark.slow
def test_persisting_overlaps_the_next_computation(tmp_path: Path) -> None:
    inputs = build_inputs(6, seed=5, radius_km=0.05)
    run = run_local(
        inputs,
        1,
        RunMode.MWD,
        store=FileResultStore(tmp_path),
        worker_options=WorkerOptions(compute_delay_s=0.1, persist_delay_s=0.1),
    )
    (report,) = run.worker_reports
    timings = report.assignments
    assert len(timings) == 6

    compute = sum(t.compute_end - t.compute_start for t in timings)
    persist = sum(t.persist_end - t.persist_start for t in timings)  # type: ignore[operator]
    assert report.wall_clock_s <= 0.75 * (compute + persist)
    for current, following in zip(timings, timings[1:], strict=False):
        assert current.persist_start is not None
        assert current.persist_start < following.compute_end


# Failures


def test_worker_lost_before_stop(small_inputs: RunInputs) -> None:
    hub = ChannelHub(1)

    def vanish() -> None:
        link = hub.worker_link(0)
        link.recv(timeout=5.0)
        link.close()

    thread = threading.Thread(target=vanish, daemon=True)
    thread.start()
    with pytest.raises(WorkerLostError, match="Worker 0"):
        master_run(small_inputs, hub.master, RunMode.MW, options=MasterOptions(idle_timeout_s=5.0))
    thread.join()


def test_idle_with_foreign_worker_id_is_rejected(small_inputs: RunInputs) -> None:
    hub = ChannelHub(1)

    def impostor() -> None:
        link = hub.worker_link(0)
        link.recv(timeout=5.0)
        link.send(Idle(worker_id=5))

    thread = threading.Thread(target=impostor, daemon=True)
    thread.start()
    with pytest.raises(ProtocolError, match="claims worker id 5"):
        master_run(small_inputs, hub.master, RunMode.MW, options=MasterOptions(idle_timeout_s=5.0))
    thread.join()


def test_result_in_mwd_mode_is_rejected(small_inputs: RunInputs, tmp_path: Path) -> None:
    hub = ChannelHub(1)
    stray = PathLossField(parent_offset=(0, 0), loss_db=np.full((2, 2), 90.0), nodata=-9999.0)

    def chatty() -> None:
        link = hub.worker_link(0)
        link.recv(timeout=5.0)
        link.send(Result(tx_id=small_inputs.transmitters[0].id, path_loss=stray))

    thread = threading.Thread(target=chatty, daemon=True)
    thread.start()
    with pytest.raises(ProtocolError, match="Result in mwd mode"):
        master_run(
            small_inputs,
            hub.master,
            RunMode.MWD,
            store=FileResultStore(tmp_path),
            options=MasterOptions(idle_timeout_s=5.0),
        )
    thread.join()


def test_silent_workers_trip_the_watchdog(small_inputs: RunInputs) -> None:
    hub = ChannelHub(2)
    trace = MessageTrace()
    with pytest.raises(ProtocolError, match="No worker message"):
        master_run(small_inputs, hub.master, RunMode.MW, options=MasterOptions(idle_timeout_s=0.2), trace=trace)
    assert [entry.direction for entry in trace.entries] == [Direction.TO_WORKER, Direction.TO_WORKER]


def test_worker_requires_metadata_first() -> None:
    hub = ChannelHub(1)
    hub.master.send(0, Stop())
    with pytest.raises(ProtocolError, match="Metadata"):
        worker_run(hub.worker_link(0), RunMode.MW, options=WorkerOptions(recv_timeout_s=1.0))


def test_worker_gives_up_on_a_silent_master() -> None:
    hub = ChannelHub(1)
    with pytest.raises(ConnectivityError, match="within 0.1s"):
        worker_run(hub.worker_link(0), RunMode.MW, options=WorkerOptions(recv_timeout_s=0.1))


def test_mwd_needs_a_fresh_store(small_inputs: RunInputs, tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="result store"):
        run_local(small_inputs, 2, RunMode.MWD)

    store = FileResultStore(tmp_path)
    tx = small_inputs.transmitters[0]
    stale = PathLossField(parent_offset=(0, 0), loss_db=np.full((1, 1), 80.0), nodata=-9999.0)
    store.put_table(tx.id, stale, small_inputs.dem.header)
    with pytest.raises(ConfigError, match="fresh store"):
        run_local(small_inputs, 2, RunMode.MWD, store=store)


def test_worker_count_must_be_positive(small_inputs: RunInputs) -> None:
    with pytest.raises(ConfigError):
        run_local(small_inputs, 0, RunMode.MW)
    with pytest.raises(ConfigError):
        ChannelHub(0)


def test_pair_audit_reports_violations() -> None:
    trace = MessageTrace()
    trace.append(0, Direction.TO_WORKER, MessageTag.METADATA)
    trace.append(0, Direction.TO_MASTER, MessageTag.IDLE)
    trace.append(0, Direction.TO_WORKER, MessageTag.KEEP_ALIVE)
    trace.append(0, Direction.TO_WORKER, MessageTag.STOP)
    trace.append(1, Direction.TO_WORKER, MessageTag.ASSIGNMENT, "a")
    trace.append(2, Direction.TO_WORKER, MessageTag.KEEP_ALIVE)
    trace.append(2, Direction.TO_WORKER, MessageTag.ASSIGNMENT, "a")

    violations = pair_audit(trace)

    assert any("KeepAlive at message 2 has no Assignment" in v for v in violations)
    assert any(v.startswith("worker 1") and "Stop" in v for v in violations)
    assert any("'a'" in v for v in violations)


# Transport


def test_parse_endpoints() -> None:
    assert parse_endpoint("node-1:9000") == Endpoint("node-1", 9000)
    assert parse_endpoint("[::1]:7000") == Endpoint("::1", 7000)
    assert parse_endpoints("a:1, b:2") == [Endpoint("a", 1), Endpoint("b", 2)]
    for text in ["nohost", ":80", "h:x", "h:70000"]:
        with pytest.raises(ConfigError):
            parse_endpoint(text)
    with pytest.raises(ConfigError):
        parse_endpoints(" , ")


def test_resolve_transport(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(TRANSPORT_ENV, raising=False)
    assert resolve_transport() is TransportKind.CHANNEL
    monkeypatch.setenv(TRANSPORT_ENV, "TCP")
    assert resolve_transport() is TransportKind.TCP
    assert resolve_transport("channel") is TransportKind.CHANNEL
    with pytest.raises(ConfigError, match="Unknown transport"):
        resolve_transport("carrier-pigeon")


def test_unreachable_worker_endpoint() -> None:
    with socket.create_server(("127.0.0.1", 0)) as server:
        port = server.getsockname()[1]
    with pytest.raises(ConnectivityError, match=f"127.0.0.1:{port}"):
        TcpMasterLink([Endpoint("127.0.0.1", port)], connect_timeout=1.0)


def test_listener_times_out_without_a_master() -> None:
    with TcpWorkerListener("127.0.0.1", 0) as listener:
        assert listener.endpoint.port > 0
        with pytest.raises(ConnectivityError, match="No master connected"):
            listener.accept(timeout=0.1)
