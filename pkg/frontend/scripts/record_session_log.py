#!/usr/bin/env python3
"""Record a wire-protocol session log for the web-client conformance tests.

Starts a local gateway with a synthetic sign dictionary, joins a viewer
(inline frames, French captions) and a speaker, drives a short scripted
meeting — including signing-speed changes — and writes the first 100
envelopes the viewer receives, in arrival order, to
test/fixtures/session-log.json.

Usage: python3 scripts/record_session_log.py
"""

import asyncio
import contextlib
import json
import socket
import tempfile
from pathlib import Path

import websockets

from axs.config import load_config
from axs.gateway import GatewayApp, run_server
from axs.landmarks import compile_dictionary
from axs.protocol import Envelope
from axs.synth import write_synthetic_corpus

OUT = Path(__file__).resolve().parent.parent / "test" / "fixtures" / "session-log.json"
TARGET_ENVELOPES = 100

GLOSSES = [
    "HELLO", "TEAM", "GOOD", "MORNING", "EVERYONE", "WELCOME", "PLAN",
    "AGREE", "REVIEW", "BUDGET", "PROJECT", "REPORT", "TODAY", "READY",
    "HAPPY", "START", "FINISH", "QUESTION", "IDEA", "TIME",
]

SCRIPT = [
    "hello team",
    "good morning",
    "so happy today",
    "budget plan",
    "report ready",
    "we agree",
    "terrible delay",
    "welcome everyone",
    "start now",
    "good idea",
    "finish today",
    "any question",
    "plan good",
    "happy start",
    "project budget",
    "everyone agree",
    "welcome team",
    "morning review",
    "good progress",
    "ready finish",
    "review time",
    "team idea",
]


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


async def join(url, session_id, pid, prefs=None, role="speaker"):
    ws = await websockets.connect(url, max_size=16 * 1024 * 1024)
    payload = {"participant_id": pid, "display_name": pid, "role": role}
    if prefs:
        payload["prefs"] = prefs
    await ws.send(Envelope(type="join", session_id=session_id, payload=payload).to_json())
    return ws


async def record(url: str) -> list[dict]:
    session = "demo"
    viewer = await join(
        url, session, "viewer", prefs={"sign_inline": True, "language": "fr"}
    )
    received: list[dict] = []

    async def drain(min_count: int, timeout: float = 10.0):
        while len(received) < min_count:
            raw = await asyncio.wait_for(viewer.recv(), timeout)
            received.append(json.loads(raw))

    await drain(2)  # joined + own presence
    speaker = await join(url, session, "speaker", prefs={"signing_enabled": False})
    await drain(3)  # speaker presence

    def count(mtype: str) -> int:
        return sum(1 for d in received if d["type"] == mtype)

    async def say(text: str):
        """Each utterance fans out transcript/translation/emotion/sign;
        wait until this utterance's sign_sequence lands."""
        seqs_before = count("sign_sequence")
        await speaker.send(Envelope(type="text_message", payload={"text": text}).to_json())
        while count("sign_sequence") == seqs_before:
            raw = await asyncio.wait_for(viewer.recv(), 10)
            received.append(json.loads(raw))

    # one utterance at each signing speed for the slider round-trip check
    await say(SCRIPT[0])
    await viewer.send(Envelope(type="set_prefs", payload={"signing_speed": 0.5}).to_json())
    await drain(len(received) + 1)  # presence ack
    await say(SCRIPT[0])
    await viewer.send(Envelope(type="set_prefs", payload={"signing_speed": 2.0}).to_json())
    await drain(len(received) + 1)
    await say(SCRIPT[0])
    await viewer.send(Envelope(type="set_prefs", payload={"signing_speed": 1.0}).to_json())
    await drain(len(received) + 1)

    for line in SCRIPT[1:]:
        await say(line)
        if len(received) >= TARGET_ENVELOPES:
            break

    await viewer.close()
    await speaker.close()
    return received[:TARGET_ENVELOPES]


async def main():
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "landmarks"
        src.mkdir()
        write_synthetic_corpus(src, glosses=GLOSSES, seed=7)
        dict_path = Path(tmp) / "signs.dict"
        compile_dictionary(src, dict_path)

        cfg = load_config(
            env={}, host="127.0.0.1", port=free_port(), dictionary=str(dict_path)
        )
        app = GatewayApp(cfg)
        ready = asyncio.Event()
        server = asyncio.create_task(run_server(app, ready))
        await asyncio.wait_for(ready.wait(), 5)
        try:
            log = await record(f"ws://{cfg.host}:{cfg.port}/ws")
        finally:
            server.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await server

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(log, separators=(",", ":")), encoding="utf-8")
    by_type: dict[str, int] = {}
    for env in log:
        by_type[env["type"]] = by_type.get(env["type"], 0) + 1
    print(f"wrote {len(log)} envelopes to {OUT}")
    print(f"envelope types: {by_type}")
    speeds = [e["payload"]["speed"] for e in log if e["type"] == "sign_sequence"]
    print(f"sign sequence speeds: {speeds}")


if __name__ == "__main__":
    asyncio.run(main())
