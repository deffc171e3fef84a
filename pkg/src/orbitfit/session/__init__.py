"""Case persistence, session engine, HTTP service, and the CLI."""

from .case import (
    CASE_SCHEMA_VERSION,
    Case,
    create_case,
    load_case_state,
    save_case_state,
)
from .engine import (
    CaseSession,
    RankingUnavailableError,
    StaleRevisionError,
    replay_events,
)
from .events import SessionEvent, make_event, read_events, write_events
from .service import create_app

__all__ = [
    "CASE_SCHEMA_VERSION",
    "Case",
    "CaseSession",
    "RankingUnavailableError",
    "SessionEvent",
    "StaleRevisionError",
    "create_app",
    "create_case",
    "load_case_state",
    "make_event",
    "read_events",
    "replay_events",
    "save_case_state",
    "write_events",
]
