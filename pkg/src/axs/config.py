"""Gateway configuration: defaults < JSON config file < AXS_* env vars
< CLI flags."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import InvalidParams

ENV_PREFIX = "AXS_"


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    dictionary: str = ""  # compiled sign dictionary artifact; required to serve
    recognizer: str = "mock"  # mock | external
    recognizer_endpoint: str = ""
    log_level: str = "info"
    queue_bound: int = 64
    slow_consumer_grace: int = 32
    chunk_len_ms: int = 1000
    overlap_ms: int = 500
    silence_gap_ms: int = 1500
    summary_interval_s: float = 900.0
    summary_k: int = 5
    transition_frames: int = 5
    join_timeout_s: float = 5.0
    intake_wait_ms: int = 2000  # how long a reader may hold a full intake queue
    translation_lexicon: str = ""  # bundled en->fr lexicon when empty
    emotion_lexicon: str = ""  # bundled lexicon when empty
    decision_cues: list[str] = field(default_factory=list)
    action_cues: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.queue_bound <= 0 or self.slow_consumer_grace <= 0:
            raise InvalidParams("queue_bound and slow_consumer_grace must be > 0")
        if self.recognizer not in ("mock", "external"):
            raise InvalidParams(f"unknown recognizer backend: {self.recognizer}")


def _coerce(value: str, target_type):
    if target_type is bool:
        return value.lower() in ("1", "true", "yes", "on")
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    if target_type == list[str]:
        return [v.strip() for v in value.split(",") if v.strip()]
    return value


def load_config(
    config_file: str | Path | None = None, env: dict | None = None, **overrides
) -> GatewayConfig:
    values: dict = {}
    if config_file:
        doc = json.loads(Path(config_file).read_text(encoding="utf-8"))
        if not isinstance(doc, dict):
            raise InvalidParams(f"{config_file}: config must be a JSON object")
        values.update(doc)
    env = os.environ if env is None else env
    for f in fields(GatewayConfig):
        env_key = ENV_PREFIX + f.name.upper()
        if env_key in env:
            ftype = f.type if not isinstance(f.type, str) else {
                "str": str, "int": int, "float": float, "bool": bool, "list[str]": list[str]
            }.get(f.type, str)
            values[f.name] = _coerce(env[env_key], ftype)
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(GatewayConfig)}
    unknown = set(values) - known
    if unknown:
        raise InvalidParams(f"unknown config keys: {sorted(unknown)}")
    return GatewayConfig(**values)
