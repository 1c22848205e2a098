"""Binary wire format of protocol messages.

Frame layout (all integers little-endian)::

    +----------------+-----------+-----------------+
    | length: uint32 | tag: u8   | payload         |
    +----------------+-----------+-----------------+

``length`` counts the tag byte plus the payload. Payload fields follow a fixed
order per message; scalars are ``uint32``/``int32``/``float64``, strings are a
``uint32`` byte count followed by UTF-8, and matrices are ``uint32`` rows,
``uint32`` cols and row-major ``float64`` values. Floats travel as raw IEEE
doubles, so decoded values are bit-identical to the encoded ones.
"""

from __future__ import annotations

import struct
from collections.abc import Callable
from typing import Any

import numpy as np
import numpy.typing as npt

from radiocov.antenna import PATTERN_SAMPLES, AntennaDiagram, DiagramSet
from radiocov.errors import FrameError
from radiocov.propagation import ClutterLossTable, PathLossField, PropagationParams
from radiocov.runtime.messages import Assignment, Idle, KeepAlive, Message, Metadata, Result, Stop
from radiocov.terrain import RasterGrid, RasterHeader, SubGrid
from radiocov.types import AntennaMount, GeoPoint, MessageTag, MultiScreenModel, TransmitterConfig

__all__ = [
    "FRAME_HEADER",
    "MAX_FRAME_BYTES",
    "PayloadWriter",
    "PayloadReader",
    "encode_message",
    "decode_message",
    "encode_frame",
    "decode_frame",
]

FRAME_HEADER = struct.Struct("<I")
TAG = struct.Struct("<B")
MAX_FRAME_BYTES = 1 << 30

_U32 = struct.Struct("<I")
_I32 = struct.Struct("<i")
_F64 = struct.Struct("<d")
_WIRE_FLOAT = np.dtype("<f8")

# PropagationParams fields in wire order
_PARAM_FIELDS = (
    "frequency_mhz",
    "rx_height_m",
    "radius_m",
    "roof_height_m",
    "street_width_m",
    "building_separation_m",
    "street_orientation_deg",
    "fresnel_clearance",
)


class PayloadWriter:
    """Accumulates payload fields."""

    def __init__(self) -> None:
        self._parts: list[bytes] = []

    def _pack(self, fmt: struct.Struct, value: float) -> None:
        try:
            self._parts.append(fmt.pack(value))
        except struct.error as exc:
            raise FrameError(f"Cannot encode {value!r} as {fmt.format}: {exc}") from None

    def u32(self, value: int) -> None:
        self._pack(_U32, value)

    def i32(self, value: int) -> None:
        self._pack(_I32, value)

    def f64(self, value: float) -> None:
        self._pack(_F64, value)

    def text(self, value: str) -> None:
        raw = value.encode("utf-8")
        self.u32(len(raw))
        self._parts.append(raw)

    def matrix(self, values: npt.NDArray[np.float64]) -> None:
        nrows, ncols = values.shape
        self.u32(nrows)
        self.u32(ncols)
        self._parts.append(np.ascontiguousarray(values, dtype=_WIRE_FLOAT).tobytes())

    def vector(self, values: npt.NDArray[np.float64]) -> None:
        self.u32(values.shape[0])
        self._parts.append(np.ascontiguousarray(values, dtype=_WIRE_FLOAT).tobytes())

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class PayloadReader:
    """Reads payload fields in order; running past the end raises FrameError."""

    def __init__(self, payload: bytes) -> None:
        self._view = memoryview(payload)
        self._offset = 0

    def _take(self, size: int) -> memoryview:
        end = self._offset + size
        if end > len(self._view):
            raise FrameError(f"Payload truncated: needed {size} bytes at offset {self._offset}, have {len(self._view)}")
        chunk = self._view[self._offset : end]
        self._offset = end
        return chunk

    def u32(self) -> int:
        return int(_U32.unpack(self._take(_U32.size))[0])

    def i32(self) -> int:
        return int(_I32.unpack(self._take(_I32.size))[0])

    def f64(self) -> float:
        return float(_F64.unpack(self._take(_F64.size))[0])

    def text(self) -> str:
        size = self.u32()
        try:
            return bytes(self._take(size)).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FrameError(f"Invalid UTF-8 string in payload: {exc}") from None

    def matrix(self) -> npt.NDArray[np.float64]:
        nrows = self.u32()
        ncols = self.u32()
        raw = self._take(nrows * ncols * _WIRE_FLOAT.itemsize)
        return np.frombuffer(raw, dtype=_WIRE_FLOAT).astype(np.float64).reshape(nrows, ncols)

    def vector(self) -> npt.NDArray[np.float64]:
        size = self.u32()
        raw = self._take(size * _WIRE_FLOAT.itemsize)
        return np.frombuffer(raw, dtype=_WIRE_FLOAT).astype(np.float64)

    def finish(self) -> None:
        if self._offset != len(self._view):
            raise FrameError(f"{len(self._view) - self._offset} trailing bytes after payload")


# Building blocks


def _write_header(w: PayloadWriter, header: RasterHeader) -> None:
    w.u32(header.ncols)
    w.u32(header.nrows)
    w.f64(header.xll)
    w.f64(header.yll)
    w.f64(header.cellsize)
    w.f64(header.nodata)


def _read_header(r: PayloadReader) -> RasterHeader:
    return RasterHeader(ncols=r.u32(), nrows=r.u32(), xll=r.f64(), yll=r.f64(), cellsize=r.f64(), nodata=r.f64())


def _write_subgrid(w: PayloadWriter, sub: SubGrid) -> None:
    w.u32(sub.parent_offset[0])
    w.u32(sub.parent_offset[1])
    _write_header(w, sub.grid.header)
    w.matrix(sub.grid.values)


def _read_subgrid(r: PayloadReader) -> SubGrid:
    offset = (r.u32(), r.u32())
    header = _read_header(r)
    return SubGrid(parent_offset=offset, grid=RasterGrid(header=header, values=r.matrix()))


def _write_params(w: PayloadWriter, params: PropagationParams) -> None:
    for name in _PARAM_FIELDS:
        w.f64(getattr(params, name))
    w.text(params.multi_screen.value)


def _read_params(r: PayloadReader) -> PropagationParams:
    values: dict[str, Any] = {name: r.f64() for name in _PARAM_FIELDS}
    raw = r.text()
    try:
        values["multi_screen"] = MultiScreenModel(raw)
    except ValueError:
        raise FrameError(f"Unknown multi-screen model {raw!r}") from None
    return PropagationParams(**values)


def _write_transmitter(w: PayloadWriter, tx: TransmitterConfig) -> None:
    w.text(tx.id)
    w.f64(tx.position.easting)
    w.f64(tx.position.northing)
    w.f64(tx.height_agl_m)
    w.f64(tx.power_dbm)
    w.f64(tx.frequency_mhz)
    w.f64(tx.radius_km)
    w.f64(tx.mount.azimuth_deg)
    w.f64(tx.mount.mech_tilt_deg)
    w.f64(tx.mount.elec_tilt_deg)
    w.text(tx.diagram_id)


def _read_transmitter(r: PayloadReader) -> TransmitterConfig:
    tx_id = r.text()
    position = GeoPoint(r.f64(), r.f64())
    height = r.f64()
    power = r.f64()
    frequency = r.f64()
    radius = r.f64()
    mount = AntennaMount(azimuth_deg=r.f64(), mech_tilt_deg=r.f64(), elec_tilt_deg=r.f64(), height_agl_m=height)
    return TransmitterConfig(
        id=tx_id,
        position=position,
        height_agl_m=height,
        power_dbm=power,
        frequency_mhz=frequency,
        radius_km=radius,
        mount=mount,
        diagram_id=r.text(),
    )


def _write_diagram(w: PayloadWriter, diagram: AntennaDiagram) -> None:
    w.text(diagram.name)
    w.f64(diagram.gain_dbi)
    w.vector(diagram.horizontal)
    w.vector(diagram.vertical)


def _read_diagram(r: PayloadReader) -> AntennaDiagram:
    name = r.text()
    gain = r.f64()
    horizontal = r.vector()
    vertical = r.vector()
    if horizontal.size != PATTERN_SAMPLES or vertical.size != PATTERN_SAMPLES:
        raise FrameError(f"Diagram {name!r} has {horizontal.size}/{vertical.size} samples, expected {PATTERN_SAMPLES}")
    return AntennaDiagram(name=name, gain_dbi=gain, horizontal=horizontal, vertical=vertical)


# Messages


def _encode_metadata(w: PayloadWriter, msg: Metadata) -> None:
    w.u32(msg.worker_id)
    _write_params(w, msg.params)
    table = msg.clutter_losses.as_dict()
    w.u32(len(table))
    for code, loss in table.items():
        w.i32(code)
        w.f64(loss)
    w.u32(len(msg.diagrams))
    for name in msg.diagrams:
        _write_diagram(w, msg.diagrams[name])
    _write_header(w, msg.extent)


def _decode_metadata(r: PayloadReader) -> Metadata:
    worker_id = r.u32()
    params = _read_params(r)
    table = {r.i32(): r.f64() for _ in range(r.u32())}
    diagrams = DiagramSet()
    for _ in range(r.u32()):
        diagrams.add(_read_diagram(r))
    return Metadata(
        worker_id=worker_id,
        params=params,
        clutter_losses=ClutterLossTable(table),
        diagrams=diagrams,
        extent=_read_header(r),
    )


def _encode_assignment(w: PayloadWriter, msg: Assignment) -> None:
    _write_transmitter(w, msg.tx)
    _write_subgrid(w, msg.dem)
    _write_subgrid(w, msg.clutter)


def _decode_assignment(r: PayloadReader) -> Assignment:
    return Assignment(tx=_read_transmitter(r), dem=_read_subgrid(r), clutter=_read_subgrid(r))


def _encode_result(w: PayloadWriter, msg: Result) -> None:
    w.text(msg.tx_id)
    w.u32(msg.path_loss.parent_offset[0])
    w.u32(msg.path_loss.parent_offset[1])
    w.f64(msg.path_loss.nodata)
    w.matrix(msg.path_loss.loss_db)


def _decode_result(r: PayloadReader) -> Result:
    tx_id = r.text()
    offset = (r.u32(), r.u32())
    nodata = r.f64()
    return Result(tx_id=tx_id, path_loss=PathLossField(parent_offset=offset, loss_db=r.matrix(), nodata=nodata))


_DECODERS: dict[MessageTag, Callable[[PayloadReader], Message]] = {
    MessageTag.METADATA: _decode_metadata,
    MessageTag.IDLE: lambda r: Idle(worker_id=r.u32()),
    MessageTag.KEEP_ALIVE: lambda r: KeepAlive(),
    MessageTag.ASSIGNMENT: _decode_assignment,
    MessageTag.RESULT: _decode_result,
    MessageTag.STOP: lambda r: Stop(),
}


def encode_message(msg: Message) -> tuple[MessageTag, bytes]:
    """Tag and payload bytes of a message."""
    w = PayloadWriter()
    match msg:
        case Metadata():
            _encode_metadata(w, msg)
        case Idle():
            w.u32(msg.worker_id)
        case Assignment():
            _encode_assignment(w, msg)
        case Result():
            _encode_result(w, msg)
        case KeepAlive() | Stop():
            pass
        case _:
            raise FrameError(f"Cannot encode {type(msg).__name__}")
    return msg.tag, w.getvalue()


def decode_message(tag: int, payload: bytes) -> Message:
    """Rebuild a message from its tag and payload.

    Raises:
        FrameError: On an unknown tag or a malformed payload
    """
    try:
        message_tag = MessageTag(tag)
    except ValueError:
        raise FrameError(f"Unknown message tag {tag}") from None
    r = PayloadReader(payload)
    try:
        msg = _DECODERS[message_tag](r)
    except FrameError:
        raise
    except ValueError as exc:
        raise FrameError(f"Invalid {message_tag.name} payload: {exc}") from exc
    r.finish()
    return msg


def encode_frame(msg: Message) -> bytes:
    """Complete frame: length prefix, tag byte, payload."""
    tag, payload = encode_message(msg)
    body = TAG.pack(tag) + payload
    if len(body) > MAX_FRAME_BYTES:
        raise FrameError(f"Frame of {len(body)} bytes exceeds the {MAX_FRAME_BYTES} byte limit")
    return FRAME_HEADER.pack(len(body)) + body


def decode_frame(frame: bytes) -> Message:
    """Inverse of :func:`encode_frame` for one complete frame."""
    if len(frame) < FRAME_HEADER.size + TAG.size:
        raise FrameError(f"Frame too short: {len(frame)} bytes")
    (length,) = FRAME_HEADER.unpack_from(frame)
    if length != len(frame) - FRAME_HEADER.size:
        raise FrameError(f"Frame length field says {length} bytes, frame carries {len(frame) - FRAME_HEADER.size}")
    (tag,) = TAG.unpack_from(frame, FRAME_HEADER.size)
    return decode_message(tag, frame[FRAME_HEADER.size + TAG.size :])
