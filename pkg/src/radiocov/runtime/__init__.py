"""Master-worker runtime.

Modules:
- messages: Protocol messages
- codec: Binary wire format
- transport: In-process channels and TCP links
- master / worker: The two sides of the protocol
- audit: Message traces and the pairing audit
- launcher: Master plus workers in one call
"""

from __future__ import annotations

from radiocov.runtime.audit import MessageTrace, TraceEntry, pair_audit
from radiocov.runtime.codec import decode_frame, decode_message, encode_frame, encode_message
from radiocov.runtime.launcher import ParallelRun, run_local, run_tcp
from radiocov.runtime.master import MasterOptions, RunInputs, master_run
from radiocov.runtime.messages import DIRECTIONS, Assignment, Idle, KeepAlive, Message, Metadata, Result, Stop
from radiocov.runtime.transport import (
    TRANSPORT_ENV,
    ChannelHub,
    Disconnected,
    Endpoint,
    MasterLink,
    TcpMasterLink,
    TcpWorkerLink,
    TcpWorkerListener,
    WorkerLink,
    parse_endpoint,
    parse_endpoints,
    resolve_transport,
)
from radiocov.runtime.worker import AssignmentTiming, WorkerOptions, WorkerReport, worker_run

__all__ = [
    # Messages
    "Message",
    "Metadata",
    "Idle",
    "KeepAlive",
    "Assignment",
    "Result",
    "Stop",
    "DIRECTIONS",
    # Codec
    "encode_message",
    "decode_message",
    "encode_frame",
    "decode_frame",
    # Transport
    "TRANSPORT_ENV",
    "Endpoint",
    "Disconnected",
    "MasterLink",
    "WorkerLink",
    "ChannelHub",
    "TcpMasterLink",
    "TcpWorkerLink",
    "TcpWorkerListener",
    "parse_endpoint",
    "parse_endpoints",
    "resolve_transport",
    # Master / worker
    "RunInputs",
    "MasterOptions",
    "master_run",
    "WorkerOptions",
    "WorkerReport",
    "AssignmentTiming",
    "worker_run",
    # Audit
    "MessageTrace",
    "TraceEntry",
    "pair_audit",
    # Launcher
    "ParallelRun",
    "run_local",
    "run_tcp",
]
