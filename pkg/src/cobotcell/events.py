"""Append-only structured run log.

Every state-changing moment of a run is recorded as an `Event` with a
strictly increasing sequence number, the simulation clock, a kind tag, and a
JSON-serializable payload that always embeds a full post-event snapshot of
the scheduling state.  Serialization is canonical (sorted keys, compact
separators), so identical runs produce byte-identical logs and a log can be
replayed into the exact same sequence of states it was recorded from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterator


class EventKind(str, Enum):
    RUN_STARTED = "run-started"
    GATE_OPENED = "gate-opened"
    TASK_STARTED = "task-started"
    TASK_COMPLETED = "task-completed"
    TASK_ABORTED = "task-aborted"
    TASK_FAILED = "task-failed"
    ROBOT_FAILURE_INJECTED = "robot-failure-injected"
    RESCHEDULE_APPLIED = "reschedule-applied"
    MESSAGE_RECEIVED = "message-received"
    MESSAGE_REJECTED = "message-rejected"
    HOMING_INSERTED = "homing-inserted"
    ROBOT_HELD = "robot-held"
    SPEED_CHANGED = "speed-changed"
    RUN_COMPLETED = "run-completed"


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, no whitespace, NaN/Inf rejected."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


@dataclass(frozen=True, slots=True)
class Event:
    seq: int
    clock: float
    kind: str
    payload: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"seq": self.seq, "clock": self.clock, "kind": self.kind, "payload": self.payload}

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Event":
        return cls(
            seq=int(data["seq"]),
            clock=float(data["clock"]),
            kind=str(data["kind"]),
            payload=dict(data["payload"]),
        )


class EventLog:
    """Ordered, append-only collection of events, sequence-numbered from 1."""

    def __init__(self) -> None:
        self._events: list[Event] = []

    def __len__(self) -> int:
        return len(self._events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self._events)

    def __getitem__(self, idx: int) -> Event:
        return self._events[idx]

    @property
    def last_seq(self) -> int:
        return self._events[-1].seq if self._events else 0

    def append(self, kind: EventKind | str, clock: float, payload: dict[str, Any]) -> Event:
        kind_str = kind.value if isinstance(kind, EventKind) else str(kind)
        event = Event(seq=self.last_seq + 1, clock=clock, kind=kind_str, payload=payload)
        # Canonicalization doubles as an eager serializability check.
        canonical_json(payload)
        self._events.append(event)
        return event

    def since(self, seq: int) -> list[Event]:
        """Events with sequence number >= seq (for stream resumption)."""
        return [e for e in self._events if e.seq >= seq]

    def of_kind(self, kind: EventKind | str) -> list[Event]:
        kind_str = kind.value if isinstance(kind, EventKind) else str(kind)
        return [e for e in self._events if e.kind == kind_str]

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self._events)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "EventLog":
        log = cls()
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            event = Event.from_dict(json.loads(line))
            if event.seq != log.last_seq + 1:
                raise ValueError(
                    f"{path}:{lineno}: sequence {event.seq} breaks the run order "
                    f"(expected {log.last_seq + 1})"
                )
            log._events.append(event)
        return log
