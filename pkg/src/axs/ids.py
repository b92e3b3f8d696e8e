"""Sortable opaque event ids (ULID-style: time prefix + random suffix)."""

from __future__ import annotations

import secrets
import time

_last = 0


def new_id(prefix: str = "") -> str:
    """Return a lexically sortable opaque id.

    Monotonic within a process even when the clock granularity is coarse.
    """
    global _last
    now = time.time_ns()
    if now <= _last:
        now = _last + 1
    _last = now
    return f"{prefix}{now:016x}{secrets.token_hex(4)}"
