"""Wire protocol: JSON text frames over the /ws WebSocket endpoint.

Every frame is an envelope:

    {"type": ..., "session_id": ..., "sender_id": ..., "event_id": ...,
     "ts_ms": ..., "payload": {...}}

Client -> server types: join, audio_chunk, text_message, request_summary,
replay_request, set_prefs.
Server -> client types: joined, presence, transcript, translation,
emotion, sign_sequence, summary, error.

Sender ts_ms is client-side display sync only; all KPI timing uses server
monotonic clocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import PipelineError
from .ids import new_id

CLIENT_TYPES = frozenset(
    {"join", "audio_chunk", "text_message", "request_summary", "replay_request", "set_prefs"}
)
SERVER_TYPES = frozenset(
    {"joined", "presence", "transcript", "translation", "emotion", "sign_sequence", "summary", "error"}
)
MESSAGE_TYPES = CLIENT_TYPES | SERVER_TYPES

# error codes that travel in error envelopes
UNKNOWN_TYPE = "UNKNOWN_TYPE"
MALFORMED_PAYLOAD = "MALFORMED_PAYLOAD"
REORDER_ERROR = "REORDER_ERROR"
JOIN_TIMEOUT = "JOIN_TIMEOUT"
SLOW_CONSUMER = "SLOW_CONSUMER"
NOT_JOINED = "NOT_JOINED"


@dataclass
class Envelope:
    type: str
    session_id: str = ""
    sender_id: str = ""
    event_id: str = field(default_factory=lambda: new_id("evt-"))
    ts_ms: float = 0.0
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(
            {
                "type": self.type,
                "session_id": self.session_id,
                "sender_id": self.sender_id,
                "event_id": self.event_id,
                "ts_ms": self.ts_ms,
                "payload": self.payload,
            },
            separators=(",", ":"),
        )


class ProtocolViolation(PipelineError):
    code = MALFORMED_PAYLOAD


def parse_envelope(raw: str | bytes) -> Envelope:
    """Parse and validate one wire frame; raises ProtocolViolation."""
    try:
        doc = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise ProtocolViolation(f"frame is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProtocolViolation("envelope must be a JSON object")
    mtype = doc.get("type")
    if not isinstance(mtype, str) or not mtype:
        raise ProtocolViolation("envelope missing 'type'")
    if mtype not in MESSAGE_TYPES:
        raise ProtocolViolation(f"unknown message type '{mtype}'", code=UNKNOWN_TYPE)
    payload = doc.get("payload", {})
    if not isinstance(payload, dict):
        raise ProtocolViolation("'payload' must be an object")
    ts_ms = doc.get("ts_ms", 0.0)
    if not isinstance(ts_ms, (int, float)):
        raise ProtocolViolation("'ts_ms' must be a number")
    for key in ("session_id", "sender_id", "event_id"):
        if key in doc and not isinstance(doc[key], str):
            raise ProtocolViolation(f"'{key}' must be a string")
    return Envelope(
        type=mtype,
        session_id=doc.get("session_id", ""),
        sender_id=doc.get("sender_id", ""),
        event_id=doc.get("event_id") or new_id("evt-"),
        ts_ms=float(ts_ms),
        payload=payload,
    )


def error_envelope(code: str, message: str, session_id: str = "", ref_event: str = "") -> Envelope:
    return Envelope(
        type="error",
        session_id=session_id,
        payload={"code": code, "message": message, "ref_event": ref_event},
    )
