"""Recorded message traces and the request/reply pairing audit."""

from __future__ import annotations

import threading
from collections import Counter, defaultdict
from dataclasses import dataclass

from radiocov.runtime.messages import DIRECTIONS, Assignment, Message, Result
from radiocov.types import Direction, MessageTag

__all__ = ["TraceEntry", "MessageTrace", "pair_audit"]


@dataclass(frozen=True, slots=True)
class TraceEntry:
    """One protocol message as seen by the master.

    Attributes:
        index: Position in the whole trace
        worker_id: Worker on the other end
        direction: Who sent it
        tag: Message kind
        tx_id: Transmitter for Assignment and Result messages
    """

    index: int
    worker_id: int
    direction: Direction
    tag: MessageTag
    tx_id: str | None = None


class MessageTrace:
    """Thread-safe, append-only record of a run's messages."""

    def __init__(self) -> None:
        self._entries: list[TraceEntry] = []
        self._lock = threading.Lock()

    def record(self, worker_id: int, direction: Direction, msg: Message) -> None:
        tx_id: str | None = None
        if isinstance(msg, Assignment):
            tx_id = msg.tx.id
        elif isinstance(msg, Result):
            tx_id = msg.tx_id
        self.append(worker_id, direction, msg.tag, tx_id)

    def append(self, worker_id: int, direction: Direction, tag: MessageTag, tx_id: str | None = None) -> None:
        with self._lock:
            self._entries.append(TraceEntry(len(self._entries), worker_id, direction, tag, tx_id))

    @property
    def entries(self) -> list[TraceEntry]:
        with self._lock:
            return list(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def for_worker(self, worker_id: int) -> list[TraceEntry]:
        return [entry for entry in self.entries if entry.worker_id == worker_id]

    def tags(self, worker_id: int) -> list[MessageTag]:
        """Message kinds exchanged with one worker, in order."""
        return [entry.tag for entry in self.for_worker(worker_id)]

    def worker_ids(self) -> list[int]:
        return sorted({entry.worker_id for entry in self.entries})

    def assignments(self) -> Counter[str]:
        """How many times each transmitter id was assigned."""
        return Counter(
            entry.tx_id for entry in self.entries if entry.tag is MessageTag.ASSIGNMENT and entry.tx_id is not None
        )


def pair_audit(trace: MessageTrace | list[TraceEntry]) -> list[str]:
    """Check that every worker request was paired with exactly one reply.

    Per worker: Idle count equals KeepAlive plus Stop; exactly one Stop, sent as
    the last master message; every KeepAlive is directly followed (among master
    messages) by one Assignment and every Assignment is preceded by a KeepAlive.
    Across workers each transmitter is assigned at most once.

    Returns:
        Violations, each naming the offending message index; empty when the trace is sound
    """
    entries = trace.entries if isinstance(trace, MessageTrace) else list(trace)
    violations: list[str] = []

    by_worker: defaultdict[int, list[TraceEntry]] = defaultdict(list)
    for entry in entries:
        by_worker[entry.worker_id].append(entry)

    for worker_id in sorted(by_worker):
        worker_entries = by_worker[worker_id]
        counts = Counter(entry.tag for entry in worker_entries)
        replies = counts[MessageTag.KEEP_ALIVE] + counts[MessageTag.STOP]
        if counts[MessageTag.IDLE] != replies:
            violations.append(
                f"worker {worker_id}: {counts[MessageTag.IDLE]} Idle but {replies} KeepAlive/Stop replies"
            )

        to_worker = [entry for entry in worker_entries if entry.direction is Direction.TO_WORKER]
        stops = [entry for entry in to_worker if entry.tag is MessageTag.STOP]
        if len(stops) != 1:
            violations.append(f"worker {worker_id}: expected exactly one Stop, found {len(stops)}")
        elif to_worker[-1].tag is not MessageTag.STOP:
            violations.append(
                f"worker {worker_id}: message {to_worker[-1].index} ({to_worker[-1].tag.name}) sent after Stop"
            )

        for position, entry in enumerate(to_worker):
            if entry.tag is MessageTag.KEEP_ALIVE:
                following = to_worker[position + 1] if position + 1 < len(to_worker) else None
                if following is None or following.tag is not MessageTag.ASSIGNMENT:
                    violations.append(f"worker {worker_id}: KeepAlive at message {entry.index} has no Assignment")
            elif entry.tag is MessageTag.ASSIGNMENT:
                previous = to_worker[position - 1] if position > 0 else None
                if previous is None or previous.tag is not MessageTag.KEEP_ALIVE:
                    violations.append(f"worker {worker_id}: Assignment at message {entry.index} has no KeepAlive")

        for entry in worker_entries:
            if entry.direction is not DIRECTIONS[entry.tag]:
                violations.append(
                    f"worker {worker_id}: {entry.tag.name} at message {entry.index} flows {entry.direction.value}"
                )

    assigned = Counter(
        entry.tx_id for entry in entries if entry.tag is MessageTag.ASSIGNMENT and entry.tx_id is not None
    )
    for tx_id, count in sorted(assigned.items()):
        if count > 1:
            violations.append(f"transmitter {tx_id!r} assigned {count} times")

    return violations
