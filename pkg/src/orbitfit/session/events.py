"""Append-only session event log (newline-delimited JSON records).

Replaying a log from the initial case state reproduces the final
placements exactly; recorded timestamps are reused during replay so
placement histories round-trip bit for bit.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import ParseError


@dataclass(frozen=True)
class SessionEvent:
    timestamp: float
    actor: str
    action: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "timestamp": self.timestamp,
                "actor": self.actor,
                "action": self.action,
                "payload": self.payload,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "SessionEvent":
        doc = json.loads(line)
        return cls(
            timestamp=float(doc["timestamp"]),
            actor=str(doc.get("actor", "")),
            action=str(doc["action"]),
            payload=dict(doc.get("payload", {})),
        )


def make_event(action, payload, actor="local", timestamp=None) -> SessionEvent:
    return SessionEvent(
        timestamp=float(time.time() if timestamp is None else timestamp),
        actor=actor,
        action=action,
        payload=payload,
    )


def write_events(events, path) -> None:
    Path(path).write_text("".join(e.to_json() + "\n" for e in events))


def read_events(path):
    path = Path(path)
    if not path.exists():
        return []
    events = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(SessionEvent.from_json(line))
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise ParseError(path, f"bad event record: {exc}", line=lineno)
    return events
