"""Load harness: many scripted WebSocket clients, end-to-end latency and
correctness measurement, KPI threshold checking, optional client-count
sweep."""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import time
from dataclasses import dataclass, field

import httpx
from websockets.asyncio.client import connect as ws_connect
from websockets.exceptions import ConnectionClosed

from .chunker import punctuate, script_to_chunks
from .errors import InvalidParams, NoSamples
from .kpi import percentile
from .protocol import Envelope, parse_envelope

ROOM_SIZE = 8
DEFAULT_SCRIPT = [
    "good morning everyone",
    "let us review the project budget today",
    "we agreed to ship the report by friday",
    "the new plan looks ready",
]

DEFAULT_SWEEP = [10, 100, 250, 500, 1000]

REALTIME, MAX_RATE = "realtime", "max"


@dataclass
class LoadProfile:
    clients: int = 1
    ramp_s: float = 0.0
    msgs_per_client: int = 1
    pacing: str = REALTIME
    script: list[str] = field(default_factory=lambda: list(DEFAULT_SCRIPT))
    settle_timeout_s: float = 30.0
    session_prefix: str = "load"

    def __post_init__(self):
        if self.clients < 1 or self.msgs_per_client < 1:
            raise InvalidParams("clients and msgs_per_client must be >= 1")
        if self.pacing not in (REALTIME, MAX_RATE):
            raise InvalidParams(f"unknown pacing: {self.pacing}")
        if not self.script:
            raise InvalidParams("script must not be empty")


@dataclass
class ClientLog:
    client_id: int
    connected: bool = False
    sent: int = 0
    received: int = 0
    errors: int = 0
    mismatches: int = 0
    e2e_ms: list[float] = field(default_factory=list)
    error_codes: dict[str, int] = field(default_factory=dict)


@dataclass
class LoadReport:
    clients: int
    connected: int
    duration_s: float
    sent: int
    received: int
    errors: int
    mismatches: int
    throughput_rps: float
    latency_ms: dict[str, float]
    stage_metrics: dict
    kpi_verdict: dict[str, bool]
    samples: list[float] = field(default_factory=list)
    error_codes: dict[str, int] = field(default_factory=dict)


DEFAULT_THRESHOLDS = {
    "e2e_p95_ms": 2000.0,
    "emotion_p99_ms": 200.0,
    "transcription_p95_ms": 2000.0,
    "translation_p95_ms": 2000.0,
    "max_error_rate": 0.0,
    "min_throughput_rps": 900.0,
}


async def simulate_client(
    url: str,
    client_id: int,
    profile: LoadProfile,
    level_tag: str = "",
    inject_reorder: bool = False,
) -> ClientLog:
    """One scripted speaker: joins a room, streams oracle-text chunks, and
    verifies its own transcript round trip."""
    logrec = ClientLog(client_id=client_id)
    room = f"{profile.session_prefix}{level_tag}-room-{client_id // ROOM_SIZE}"
    participant_id = f"{profile.session_prefix}{level_tag}-c{client_id}"
    expected: list[str] = []  # punctuated texts in send order
    finish_times: list[float] = []  # per utterance: send time of its final chunk
    pending_send_ms: dict[str, float] = {}  # utterance_id -> finish send time
    done = asyncio.Event()
    expected_signs = profile.msgs_per_client

    try:
        ws = await ws_connect(url, open_timeout=20, max_size=16 * 1024 * 1024)
    except Exception:
        return logrec  # CONNECT_FAILED: connected stays False
    logrec.connected = True

    async def receiver():
        signs_seen = 0
        transcripts_seen = 0
        try:
            async for raw in ws:
                env = parse_envelope(raw)
                logrec.received += 1
                if env.type == "error":
                    logrec.errors += 1
                    code = env.payload.get("code", "?")
                    logrec.error_codes[code] = logrec.error_codes.get(code, 0) + 1
                elif env.type == "transcript" and env.payload.get("final"):
                    if env.payload.get("speaker_id") != participant_id:
                        continue
                    if transcripts_seen < len(expected):
                        if env.payload.get("text") != expected[transcripts_seen]:
                            logrec.mismatches += 1
                        pending_send_ms[env.payload.get("utterance_id", "")] = finish_times[
                            transcripts_seen
                        ]
                    transcripts_seen += 1
                elif env.type == "sign_sequence":
                    utt_id = env.payload.get("utterance_id", "")
                    sent_at = pending_send_ms.pop(utt_id, None)
                    if sent_at is not None:
                        logrec.e2e_ms.append(time.monotonic() * 1000 - sent_at)
                        signs_seen += 1
                        if signs_seen >= expected_signs and transcripts_seen >= expected_signs:
                            done.set()
        except (ConnectionClosed, asyncio.CancelledError):
            pass

    recv_task = asyncio.create_task(receiver())
    try:
        join = Envelope(
            type="join",
            session_id=room,
            payload={
                "participant_id": participant_id,
                "display_name": f"client {client_id}",
                "role": "speaker",
                "prefs": {"sign_inline": False, "language": "en"},
                "settings": {"emit_partials": False},
            },
        )
        await ws.send(join.to_json())
        logrec.sent += 1

        seq = 0
        t_base = 0.0
        for m in range(profile.msgs_per_client):
            sentence = profile.script[m % len(profile.script)]
            expected.append(punctuate(sentence.split()))
            chunks = script_to_chunks(
                sentence, session_id=room, speaker_id=participant_id,
                seq_base=seq, time_base=t_base,
            )
            if inject_reorder and m == 0 and len(chunks) >= 2:
                chunks[0], chunks[1] = chunks[1], chunks[0]
            for ci, chunk in enumerate(chunks):
                env = Envelope(
                    type="audio_chunk",
                    session_id=room,
                    sender_id=participant_id,
                    ts_ms=time.monotonic() * 1000,
                    payload={
                        "seq": chunk.seq,
                        "start_time": chunk.start_time,
                        "duration": chunk.duration,
                        "oracle_text": chunk.oracle_text,
                    },
                )
                if ci == len(chunks) - 1:
                    finish_times.append(time.monotonic() * 1000)
                await ws.send(env.to_json())
                logrec.sent += 1
                if profile.pacing == REALTIME:
                    await asyncio.sleep(0.5)
            seq += len(chunks)
            t_base = chunks[-1].start_time + chunks[-1].duration

        try:
            await asyncio.wait_for(done.wait(), timeout=profile.settle_timeout_s)
        except asyncio.TimeoutError:
            pass
    except ConnectionClosed:
        logrec.errors += 1
    finally:
        recv_task.cancel()
        try:
            await ws.close()
        except Exception:
            pass
    return logrec


def _fetch_stage_metrics(gateway_url: str) -> dict:
    http_url = gateway_url.replace("ws://", "http://").replace("/ws", "/metrics")
    try:
        return httpx.get(http_url, timeout=5.0).json()
    except Exception:
        return {}


def _verdict(report_args: dict, thresholds: dict, realtime: bool = True) -> dict[str, bool]:
    stages = report_args["stage_metrics"].get("stages", {})
    lat = report_args["latency_ms"]
    sent = report_args["sent"]
    verdict = {
        "error_rate_zero": report_args["errors"] <= thresholds["max_error_rate"] * max(sent, 1),
        "mismatches_zero": report_args["mismatches"] == 0,
    }
    if not realtime:
        # stage/e2e latency budgets apply to the realtime-pacing profile;
        # max-rate runs are judged on errors, mismatches, and throughput
        return verdict
    verdict["e2e_p95_within_budget"] = lat.get("p95", 0.0) < thresholds["e2e_p95_ms"]
    if "emotion" in stages and stages["emotion"]["count"]:
        verdict["emotion_p99_within_budget"] = (
            stages["emotion"]["p99_ms"] < thresholds["emotion_p99_ms"]
        )
    if "transcription" in stages and stages["transcription"]["count"]:
        verdict["transcription_p95_within_budget"] = (
            stages["transcription"]["p95_ms"] < thresholds["transcription_p95_ms"]
        )
    if "translation" in stages and stages["translation"]["count"]:
        verdict["translation_p95_within_budget"] = (
            stages["translation"]["p95_ms"] < thresholds["translation_p95_ms"]
        )
    return verdict


async def run_load(
    profile: LoadProfile,
    gateway_url: str,
    thresholds: dict | None = None,
    level_tag: str = "",
    check_throughput: bool = False,
) -> LoadReport:
    """Open profile.clients connections over ramp_s, stream scripts, and
    aggregate a LoadReport. Aborts only when under half the clients connect."""
    thresholds = {**DEFAULT_THRESHOLDS, **(thresholds or {})}
    start = time.monotonic()

    async def delayed(i: int):
        if profile.ramp_s > 0:
            await asyncio.sleep(profile.ramp_s * i / max(profile.clients, 1))
        return await simulate_client(gateway_url, i, profile, level_tag=level_tag)

    logs = await asyncio.gather(*[delayed(i) for i in range(profile.clients)])
    duration = time.monotonic() - start
    connected = sum(1 for c in logs if c.connected)
    if connected < profile.clients / 2:
        raise InvalidParams(
            f"aborting: only {connected}/{profile.clients} clients connected"
        )
    samples = [ms for c in logs for ms in c.e2e_ms]
    sent = sum(c.sent for c in logs)
    lat = {}
    if samples:
        lat = {
            "p50": percentile(samples, 50),
            "p95": percentile(samples, 95),
            "p99": percentile(samples, 99),
            "max": max(samples),
        }
    args = {
        "clients": profile.clients,
        "connected": connected,
        "duration_s": duration,
        "sent": sent,
        "received": sum(c.received for c in logs),
        "errors": sum(c.errors for c in logs) + (profile.clients - connected),
        "mismatches": sum(c.mismatches for c in logs),
        # aggregate envelopes through the gateway: chunks in + envelopes out
        "throughput_rps": (sent + sum(c.received for c in logs)) / duration
        if duration > 0
        else 0.0,
        "latency_ms": lat,
        "stage_metrics": _fetch_stage_metrics(gateway_url),
    }
    codes: dict[str, int] = {}
    for c in logs:
        for code, n in c.error_codes.items():
            codes[code] = codes.get(code, 0) + n
    args["error_codes"] = codes
    verdict = _verdict(args, thresholds, realtime=profile.pacing == REALTIME)
    if check_throughput:
        verdict["throughput_at_least_900_rps"] = (
            args["throughput_rps"] >= thresholds["min_throughput_rps"]
        )
    return LoadReport(**args, kpi_verdict=verdict, samples=samples)


def render_report(reports: list[LoadReport]) -> str:
    if not reports:
        raise NoSamples("no load levels were run")
    lines = [
        f"{'clients':>8} {'conn':>6} {'sent':>8} {'recv':>9} {'err':>5} {'mism':>5} "
        f"{'rps':>8} {'p50ms':>8} {'p95ms':>8} {'p99ms':>8} {'verdict':>8}"
    ]
    for r in reports:
        ok = all(r.kpi_verdict.values())
        lines.append(
            f"{r.clients:>8} {r.connected:>6} {r.sent:>8} {r.received:>9} {r.errors:>5} "
            f"{r.mismatches:>5} {r.throughput_rps:>8.1f} "
            f"{r.latency_ms.get('p50', 0):>8.1f} {r.latency_ms.get('p95', 0):>8.1f} "
            f"{r.latency_ms.get('p99', 0):>8.1f} {'PASS' if ok else 'FAIL':>8}"
        )
        for name, passed in r.kpi_verdict.items():
            lines.append(f"    {'PASS' if passed else 'FAIL'}  {name}")
        if r.error_codes:
            lines.append(f"    error codes: {r.error_codes}")
    return "\n".join(lines)


def write_csv(reports: list[LoadReport], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clients", "sample_idx", "e2e_ms"])
        for r in reports:
            for i, ms in enumerate(r.samples):
                writer.writerow([r.clients, i, f"{ms:.3f}"])


def main(argv=None):
    parser = argparse.ArgumentParser(prog="axs-loadgen", description="Gateway load harness")
    parser.add_argument("--url", default="ws://127.0.0.1:8765/ws")
    parser.add_argument("--clients", type=int, default=10)
    parser.add_argument("--ramp", type=float, default=2.0)
    parser.add_argument("--msgs", type=int, default=2)
    parser.add_argument("--pacing", choices=[REALTIME, MAX_RATE], default=REALTIME)
    parser.add_argument("--script", default=None, help="file with one scripted utterance per line")
    parser.add_argument("--sweep", action="store_true", help=f"sweep client counts {DEFAULT_SWEEP}")
    parser.add_argument("--out", default=None, help="CSV of raw end-to-end samples")
    parser.add_argument("--thresholds", default=None, help="JSON file of KPI thresholds")
    args = parser.parse_args(argv)

    script = list(DEFAULT_SCRIPT)
    if args.script:
        with open(args.script) as fh:
            script = [line.strip() for line in fh if line.strip()]
    thresholds = None
    if args.thresholds:
        with open(args.thresholds) as fh:
            thresholds = json.load(fh)

    levels = DEFAULT_SWEEP if args.sweep else [args.clients]
    reports = []
    for level in levels:
        profile = LoadProfile(
            clients=level,
            ramp_s=args.ramp,
            msgs_per_client=args.msgs,
            pacing=args.pacing,
            script=script,
            session_prefix=f"load{level}",
        )
        report = asyncio.run(
            run_load(
                profile,
                args.url,
                thresholds,
                level_tag=f"-{level}",
                check_throughput=(args.sweep and args.pacing == MAX_RATE and level == max(levels)),
            )
        )
        reports.append(report)
        print(render_report([report]))
    if args.out:
        write_csv(reports, args.out)
    if not all(all(r.kpi_verdict.values()) for r in reports):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
