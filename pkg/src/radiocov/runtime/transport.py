"""Message transports between the master and its workers.

Two interchangeable implementations sit behind :class:`MasterLink` and
:class:`WorkerLink`:

- channels: in-process queues, for deterministic tests and ``--local-workers``
- TCP: length-prefixed frames (see :mod:`radiocov.runtime.codec`); every
  worker listens on its ``host:port`` and the master dials all of them

On the master side every message, from any worker, lands in one inbox queue
as ``(worker_id, message)``. A worker whose link goes away shows up there as
:class:`Disconnected`.
"""

from __future__ import annotations

import os
import queue
import socket
import threading
import time
from abc import ABC, abstractmethod
from collections.abc import Sequence
from dataclasses import dataclass
from types import TracebackType
try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from radiocov.errors import ConfigError, ConnectivityError, FrameError
from radiocov.logging import get_logger
from radiocov.runtime.codec import FRAME_HEADER, MAX_FRAME_BYTES, TAG, decode_frame, decode_message, encode_frame
from radiocov.runtime.messages import Message
from radiocov.types import TransportKind

__all__ = [
    "TRANSPORT_ENV",
    "Endpoint",
    "Disconnected",
    "InboxItem",
    "MasterLink",
    "WorkerLink",
    "ChannelHub",
    "TcpMasterLink",
    "TcpWorkerLink",
    "TcpWorkerListener",
    "parse_endpoint",
    "parse_endpoints",
    "resolve_transport",
    "send_frame",
    "recv_frame",
]

logger = get_logger(__name__)

TRANSPORT_ENV = "RADIOCOV_TRANSPORT"


@dataclass(frozen=True, slots=True)
class Endpoint:
    host: str
    port: int

    def __str__(self) -> str:
        return f"{self.host}:{self.port}"


@dataclass(frozen=True, slots=True)
class Disconnected:
    """Inbox marker for a worker whose link closed."""

    reason: str


InboxItem = tuple[int, Message | Disconnected]


def parse_endpoint(text: str) -> Endpoint:
    """Parse ``host:port``.

    Raises:
        ConfigError: If the text is not a valid endpoint
    """
    host, sep, port_text = text.strip().rpartition(":")
    if not sep or not host:
        raise ConfigError(f"Endpoint {text!r} must look like host:port")
    try:
        port = int(port_text)
    except ValueError:
        raise ConfigError(f"Endpoint {text!r} has a non-numeric port") from None
    if not 0 <= port <= 65535:
        raise ConfigError(f"Endpoint {text!r} has port outside 0-65535")
    return Endpoint(host=host.strip("[]"), port=port)


def parse_endpoints(text: str) -> list[Endpoint]:
    """Parse a comma-separated ``host:port`` list."""
    endpoints = [parse_endpoint(part) for part in text.split(",") if part.strip()]
    if not endpoints:
        raise ConfigError("At least one worker endpoint is required")
    return endpoints


def resolve_transport(flag: str | None = None) -> TransportKind:
    """Transport chosen by the flag, else ``RADIOCOV_TRANSPORT``, else channels."""
    choice = flag or os.environ.get(TRANSPORT_ENV) or TransportKind.CHANNEL.value
    try:
        return TransportKind(choice.strip().lower())
    except ValueError:
        known = ", ".join(kind.value for kind in TransportKind)
        raise ConfigError(f"Unknown transport {choice!r}; expected one of {known}") from None


class MasterLink(ABC):
    """Master end of the links to all workers."""

    def __init__(self) -> None:
        self.inbox: queue.Queue[InboxItem] = queue.Queue()

    @property
    @abstractmethod
    def worker_ids(self) -> list[int]:
        """Identities of the connected workers."""
        ...

    @abstractmethod
    def send(self, worker_id: int, msg: Message) -> None:
        """Deliver one message to one worker."""
        ...

    @abstractmethod
    def close(self) -> None:
        """Release every link; idempotent."""
        ...

    def __enter__(self) -> Self:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()


class WorkerLink(ABC):
    """Worker end of the link to the master."""

    @abstractmethod
    def send(self, msg: Message) -> None: ...

    @abstractmethod
    def recv(self, timeout: float | None = None) -> Message:
        """Next message from the master.

        Raises:
            ConnectivityError: If the master went away or nothing arrived in time
        """
        ...

    @abstractmethod
    def close(self) -> None: ...

    def __enter__(self) -> Self:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()


# In-process channels

_CLOSED = object()


class ChannelHub:
    """Queues connecting one master with ``workers`` in-process workers.

    Args:
        workers: Number of worker links
        link_delay_s: Latency added to every message, both directions
        serialize: Push every message through the wire codec
    """

    def __init__(self, workers: int, link_delay_s: float = 0.0, serialize: bool = False) -> None:
        if workers < 1:
            raise ConfigError(f"At least one worker is required, got {workers}")
        self.link_delay_s = link_delay_s
        self.serialize = serialize
        self.master = _ChannelMasterLink(self, workers)
        self._workers = [_ChannelWorkerLink(self, worker_id) for worker_id in range(workers)]

    def worker_link(self, worker_id: int) -> WorkerLink:
        return self._workers[worker_id]

    def deliver(self, msg: Message) -> Message:
        if self.link_delay_s > 0:
            time.sleep(self.link_delay_s)
        if self.serialize:
            return decode_frame(encode_frame(msg))
        return msg


class _ChannelMasterLink(MasterLink):
    def __init__(self, hub: ChannelHub, workers: int) -> None:
        super().__init__()
        self._hub = hub
        self.outboxes: list[queue.Queue[object]] = [queue.Queue() for _ in range(workers)]

    @property
    def worker_ids(self) -> list[int]:
        return list(range(len(self.outboxes)))

    def send(self, worker_id: int, msg: Message) -> None:
        self.outboxes[worker_id].put(self._hub.deliver(msg))

    def close(self) -> None:
        for outbox in self.outboxes:
            outbox.put(_CLOSED)


class _ChannelWorkerLink(WorkerLink):
    def __init__(self, hub: ChannelHub, worker_id: int) -> None:
        self._hub = hub
        self._worker_id = worker_id
        self._closed = False

    def send(self, msg: Message) -> None:
        if self._closed:
            raise ConnectivityError(f"Channel of worker {self._worker_id} is closed")
        self._hub.master.inbox.put((self._worker_id, self._hub.deliver(msg)))

    def recv(self, timeout: float | None = None) -> Message:
        try:
            item = self._hub.master.outboxes[self._worker_id].get(timeout=timeout)
        except queue.Empty:
            raise ConnectivityError(f"No message from the master within {timeout}s") from None
        if item is _CLOSED:
            raise ConnectivityError("Master closed the channel")
        return item  # type: ignore[return-value]

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._hub.master.inbox.put((self._worker_id, Disconnected("worker closed its channel")))


# TCP


def _recv_exact(sock: socket.socket, size: int) -> bytes | None:
    buf = bytearray()
    while len(buf) < size:
        chunk = sock.recv(size - len(buf))
        if not chunk:
            if buf:
                raise FrameError(f"Connection closed mid-frame after {len(buf)} of {size} bytes")
            return None
        buf.extend(chunk)
    return bytes(buf)


def send_frame(sock: socket.socket, msg: Message) -> None:
    sock.sendall(encode_frame(msg))


def recv_frame(sock: socket.socket) -> Message | None:
    """Read one frame; None on a clean close between frames."""
    header = _recv_exact(sock, FRAME_HEADER.size)
    if header is None:
        return None
    (length,) = FRAME_HEADER.unpack(header)
    if length < TAG.size or length > MAX_FRAME_BYTES:
        raise FrameError(f"Bad frame length {length}")
    body = _recv_exact(sock, length)
    if body is None:
        raise FrameError("Connection closed after a frame header")
    (tag,) = TAG.unpack_from(body)
    return decode_message(tag, body[TAG.size :])


class TcpMasterLink(MasterLink):
    """Master dialling every worker endpoint.

    One reader thread per connection feeds the shared inbox.

    Raises:
        ConnectivityError: Listing every endpoint that could not be reached
    """

    def __init__(self, endpoints: Sequence[Endpoint], connect_timeout: float = 5.0, link_delay_s: float = 0.0) -> None:
        super().__init__()
        self.link_delay_s = link_delay_s
        self._sockets: list[socket.socket] = []
        self._send_locks: list[threading.Lock] = []
        self._closed = False

        failures: list[str] = []
        for endpoint in endpoints:
            try:
                sock = socket.create_connection((endpoint.host, endpoint.port), timeout=connect_timeout)
            except OSError as exc:
                failures.append(f"{endpoint} ({exc.strerror or exc})")
                continue
            sock.settimeout(None)
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._sockets.append(sock)
            self._send_locks.append(threading.Lock())
        if failures:
            self.close()
            logger.error("Unreachable worker endpoints: %s", ", ".join(failures))
            raise ConnectivityError(f"Cannot reach worker endpoints: {', '.join(failures)}")

        self._readers = [
            threading.Thread(
                target=self._read_loop,
                args=(worker_id, sock),
                name=f"radiocov-reader-{worker_id}",
                daemon=True,
            )
            for worker_id, sock in enumerate(self._sockets)
        ]
        for reader in self._readers:
            reader.start()
        logger.info("Connected to %d workers", len(self._sockets))

    @property
    def worker_ids(self) -> list[int]:
        return list(range(len(self._sockets)))

    def _read_loop(self, worker_id: int, sock: socket.socket) -> None:
        try:
            while True:
                msg = recv_frame(sock)
                if msg is None:
                    self.inbox.put((worker_id, Disconnected("connection closed")))
                    return
                self.inbox.put((worker_id, msg))
        except (OSError, FrameError) as exc:
            if not self._closed:
                logger.warning("Link to worker %d failed: %s", worker_id, exc)
            self.inbox.put((worker_id, Disconnected(str(exc))))

    def send(self, worker_id: int, msg: Message) -> None:
        if self.link_delay_s > 0:
            time.sleep(self.link_delay_s)
        frame = encode_frame(msg)
        with self._send_locks[worker_id]:
            try:
                self._sockets[worker_id].sendall(frame)
            except OSError as exc:
                raise ConnectivityError(f"Cannot send to worker {worker_id}: {exc}") from exc

    def close(self) -> None:
        self._closed = True
        for sock in self._sockets:
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            sock.close()


class TcpWorkerLink(WorkerLink):
    """Worker end of an accepted master connection."""

    def __init__(self, sock: socket.socket, link_delay_s: float = 0.0) -> None:
        self._sock = sock
        self.link_delay_s = link_delay_s

    def send(self, msg: Message) -> None:
        if self.link_delay_s > 0:
            time.sleep(self.link_delay_s)
        try:
            send_frame(self._sock, msg)
        except OSError as exc:
            raise ConnectivityError(f"Cannot send to the master: {exc}") from exc

    def recv(self, timeout: float | None = None) -> Message:
        self._sock.settimeout(timeout)
        try:
            msg = recv_frame(self._sock)
        except TimeoutError:
            raise ConnectivityError(f"No message from the master within {timeout}s") from None
        except OSError as exc:
            raise ConnectivityError(f"Connection to the master failed: {exc}") from exc
        if msg is None:
            raise ConnectivityError("Master closed the connection")
        return msg

    def close(self) -> None:
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


class TcpWorkerListener:
    """Listening socket of a worker waiting for its master.

    Binding port 0 picks a free port; :attr:`endpoint` reports the real one.
    """

    def __init__(self, host: str, port: int) -> None:
        try:
            self._server = socket.create_server((host, port))
        except OSError as exc:
            raise ConnectivityError(f"Cannot listen on {host}:{port}: {exc}") from exc
        bound_host, bound_port = self._server.getsockname()[:2]
        self.endpoint = Endpoint(host=host, port=int(bound_port))
        logger.info("Worker listening on %s (bound %s)", self.endpoint, bound_host)

    def accept(self, timeout: float | None = None, link_delay_s: float = 0.0) -> TcpWorkerLink:
        """Wait for the master to connect.

        Raises:
            ConnectivityError: If no master connects within ``timeout`` seconds
        """
        self._server.settimeout(timeout)
        try:
            sock, peer = self._server.accept()
        except TimeoutError:
            logger.error("No master connected to %s within %ss", self.endpoint, timeout)
            raise ConnectivityError(f"No master connected to {self.endpoint} within {timeout}s") from None
        sock.settimeout(None)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        logger.info("Master connected from %s:%s", peer[0], peer[1])
        return TcpWorkerLink(sock, link_delay_s=link_delay_s)

    def close(self) -> None:
        self._server.close()

    def __enter__(self) -> Self:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()
