"""WebSocket front door: session lifecycle over the wire, stage workers,
preference-filtered fan-out, and the backpressure policy that protects
the latency budgets under load."""

from __future__ import annotations

import argparse
import asyncio
import http
import json
import logging
import time
from dataclasses import dataclass, field

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed
from websockets.http11 import Response

from .chunker import AudioChunk, TranscriptAssembler, Utterance, punctuate
from .config import GatewayConfig
from .emotion import bundled_lexicon, classify_emotion, emoji_for, load_lexicon
from .errors import (
    DuplicateParticipant,
    PipelineError,
    RoomFull,
    SessionClosed,
)
from .kpi import LatencyLedger
from .landmarks import load_dictionary
from .protocol import (
    JOIN_TIMEOUT,
    MALFORMED_PAYLOAD,
    NOT_JOINED,
    REORDER_ERROR,
    SLOW_CONSUMER,
    UNKNOWN_TYPE,
    Envelope,
    ProtocolViolation,
    error_envelope,
    parse_envelope,
)
from .recognizer import RecognizerConfig, make_recognizer
from .session import (
    SIGN_FROM_TRANSLATION,
    Participant,
    ParticipantPrefs,
    Session,
    SessionRegistry,
    SessionSettings,
    plan_fanout,
)
from .signgen import assemble_animation, retime, tokenize_to_glosses
from .translator import LangPair, TranslatorRegistry
from importlib import resources

log = logging.getLogger("axs.gateway")

LOSSLESS_STAGES = frozenset({"transcription", "translation", "signgen", "summary"})
DROPPABLE_STAGES = frozenset({"emotion"})

ACCEPTED, REJECTED, DROPPED_OLDEST = "accepted", "rejected", "dropped_oldest"

CLOSE_JOIN_TIMEOUT = 4000
CLOSE_SLOW_CONSUMER = 4008


def mono_ms() -> float:
    return time.monotonic() * 1000.0


def apply_backpressure(queue: asyncio.Queue, item, stage: str) -> str:
    """Bounded-queue policy: lossless stages reject when full, droppable
    stages evict the oldest event and accept."""
    if queue.full():
        if stage in DROPPABLE_STAGES:
            try:
                queue.get_nowait()
            except asyncio.QueueEmpty:
                pass
            queue.put_nowait(item)
            return DROPPED_OLDEST
        return REJECTED
    queue.put_nowait(item)
    return ACCEPTED


def _frames_payload(sequence) -> list[dict]:
    out = []
    for f in sequence.frames:
        entry = {
            "t": round(f.t, 6),
            "pose": [[round(float(v), 5) for v in p] for p in f.pose],
            "left_hand": [[round(float(v), 5) for v in p] for p in f.left_hand],
            "right_hand": [[round(float(v), 5) for v in p] for p in f.right_hand],
        }
        if f.face is not None:
            entry["face"] = [[round(float(v), 5) for v in p] for p in f.face]
        out.append(entry)
    return out


OUTBOX_CAPACITY = 256


@dataclass
class ConnState:
    ws: object
    session_id: str = ""
    participant_id: str = ""
    joined: bool = False
    consecutive_rejects: int = 0
    send_failures: int = 0
    outbox: asyncio.Queue = field(default_factory=lambda: asyncio.Queue(maxsize=OUTBOX_CAPACITY))
    sender_task: asyncio.Task | None = None


@dataclass
class SessionRuntime:
    session: Session
    queues: dict[str, asyncio.Queue] = field(default_factory=dict)
    workers: list[asyncio.Task] = field(default_factory=list)
    subscribers: dict[str, ConnState] = field(default_factory=dict)  # participant_id -> conn
    created_mono: float = field(default_factory=time.monotonic)

    def now_s(self) -> float:
        return time.monotonic() - self.created_mono


class GatewayApp:
    """Owns shared assets and per-session pipeline runtimes."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        if not config.dictionary:
            raise PipelineError("startup requires a sign dictionary (--dictionary)", code="STARTUP")
        try:
            self.dictionary = load_dictionary(config.dictionary)
        except OSError as exc:
            raise PipelineError(
                f"cannot load sign dictionary at {config.dictionary}: {exc}", code="STARTUP"
            ) from exc
        if config.emotion_lexicon:
            self.emotion_lexicon = load_lexicon(config.emotion_lexicon)
        else:
            self.emotion_lexicon = bundled_lexicon()
        self.translator = TranslatorRegistry()
        lex = config.translation_lexicon
        if lex:
            self.translator.register_language_pair(LangPair("en", "fr"), lexicon_path=lex)
        else:
            with resources.as_file(resources.files("axs.data") / "lexicon_en_fr.tsv") as p:
                self.translator.register_language_pair(LangPair("en", "fr"), lexicon_path=p)
        self.recognizer = make_recognizer(
            RecognizerConfig(
                backend=config.recognizer,
                endpoint=config.recognizer_endpoint or None,
            )
        )
        self.registry = SessionRegistry()
        self.ledger = LatencyLedger()
        self.runtimes: dict[str, SessionRuntime] = {}
        self.error_envelopes_sent = 0
        self.disconnects = 0
        self.envelopes_received = 0
        self.started_mono = time.monotonic()

    # -- session runtime ----------------------------------------------------

    def runtime_for(self, session: Session) -> SessionRuntime:
        rt = self.runtimes.get(session.session_id)
        if rt is None:
            rt = SessionRuntime(session=session)
            for stage in ("transcription", "translation", "emotion", "signgen", "summary"):
                rt.queues[stage] = asyncio.Queue(maxsize=self.config.queue_bound)
            rt.workers = [
                asyncio.create_task(self._transcription_worker(rt)),
                asyncio.create_task(self._translation_worker(rt)),
                asyncio.create_task(self._emotion_worker(rt)),
                asyncio.create_task(self._signgen_worker(rt)),
                asyncio.create_task(self._summary_worker(rt)),
                asyncio.create_task(self._summary_scheduler(rt)),
            ]
            self.runtimes[session.session_id] = rt
        return rt

    def queue_depths(self) -> dict[str, int]:
        depths = {s: 0 for s in ("transcription", "translation", "emotion", "signgen", "summary")}
        for rt in self.runtimes.values():
            for stage, q in rt.queues.items():
                depths[stage] += q.qsize()
        return depths

    # -- delivery -----------------------------------------------------------

    async def _sender_loop(self, conn: ConnState) -> None:
        """Drains one connection's outbox so slow receivers never stall the
        pipeline workers (no head-of-line blocking across subscribers)."""
        try:
            while True:
                data = await conn.outbox.get()
                try:
                    await conn.ws.send(data)
                finally:
                    conn.outbox.task_done()
        except (ConnectionClosed, asyncio.CancelledError):
            pass

    async def _send(self, conn: ConnState, data: str) -> None:
        try:
            conn.outbox.put_nowait(data)
        except asyncio.QueueFull:
            conn.send_failures += 1
            if conn.send_failures > self.config.slow_consumer_grace:
                await conn.ws.close(CLOSE_SLOW_CONSUMER, SLOW_CONSUMER)

    async def send_envelope(self, conn: ConnState, env: Envelope) -> None:
        if env.type == "error":
            self.error_envelopes_sent += 1
        await self._send(conn, env.to_json())

    async def _flush_outbox(self, conn: ConnState, timeout: float = 1.0) -> None:
        """Wait for queued frames to reach the socket (pre-close courtesy)."""
        try:
            await asyncio.wait_for(conn.outbox.join(), timeout)
        except (asyncio.TimeoutError, Exception):
            pass

    async def broadcast_raw(self, rt: SessionRuntime, data: str, only: list[ConnState] | None = None):
        targets = only if only is not None else list(rt.subscribers.values())
        for conn in targets:
            await self._send(conn, data)

    # -- pipeline workers ---------------------------------------------------

    async def _transcription_worker(self, rt: SessionRuntime):
        session = rt.session
        while True:
            conn, chunk, enqueue = await rt.queues["transcription"].get()
            dequeue = mono_ms()
            try:
                segment = self.recognizer.recognize_chunk(chunk)
            except PipelineError as exc:
                self.ledger.record_error("transcription")
                await self.send_envelope(
                    conn, error_envelope(exc.code, str(exc), session.session_id)
                )
                continue
            except Exception:
                self.ledger.record_error("transcription")
                log.exception("recognizer failure")
                continue
            assembler = session.assembler_for(chunk.speaker_id)
            utterances = assembler.add_segment(segment)
            if session.settings.emit_partials and segment.tokens:
                partial = Envelope(
                    type="transcript",
                    session_id=session.session_id,
                    sender_id=chunk.speaker_id,
                    payload={
                        "final": False,
                        "text": " ".join(assembler.pending_tokens),
                        "speaker_id": chunk.speaker_id,
                    },
                ).to_json()
                await self.broadcast_raw(rt, partial)
            self.ledger.record_latency(
                "transcription", chunk.session_id + f"#{chunk.seq}", enqueue, dequeue, mono_ms()
            )
            for utt in utterances:
                await self._emit_utterance(rt, conn, utt)

    async def _emit_utterance(self, rt: SessionRuntime, conn: ConnState | None, utt: Utterance):
        session = rt.session
        transcript = Envelope(
            type="transcript",
            session_id=session.session_id,
            sender_id=utt.speaker_id,
            payload={
                "final": True,
                "text": utt.text,
                "speaker_id": utt.speaker_id,
                "utterance_id": utt.utterance_id,
                "t0": utt.t0,
                "t1": utt.t1,
                "language": utt.language,
            },
        ).to_json()
        await self.broadcast_raw(rt, transcript)
        try:
            stages = plan_fanout(session, final=True)
        except SessionClosed:
            return
        if session.settings.sign_input == SIGN_FROM_TRANSLATION and "signgen" in stages:
            stages.remove("signgen")  # translation worker forwards instead
        now = mono_ms()
        for stage in stages:
            outcome = apply_backpressure(rt.queues[stage], (utt, now), stage)
            if outcome == REJECTED and conn is not None:
                await self.send_envelope(
                    conn,
                    error_envelope("QUEUE_FULL", f"{stage} queue full", session.session_id),
                )

    async def _translation_worker(self, rt: SessionRuntime):
        session = rt.session
        target = session.settings.target_language
        while True:
            utt, enqueue = await rt.queues["translation"].get()
            dequeue = mono_ms()
            try:
                if utt.language == target or not self.translator.registered(utt.language, target):
                    if utt.language != target:
                        self.ledger.record_error("translation")
                    continue
                translation = self.translator.translate(utt, target)
            except PipelineError:
                self.ledger.record_error("translation")
                continue
            complete = mono_ms()
            self.ledger.record_latency("translation", utt.utterance_id, enqueue, dequeue, complete)
            data = Envelope(
                type="translation",
                session_id=session.session_id,
                sender_id=utt.speaker_id,
                payload={
                    "utterance_id": utt.utterance_id,
                    "source_text": translation.source_text,
                    "text": translation.target_text,
                    "source": utt.language,
                    "target": target,
                },
            ).to_json()
            targets = [
                conn
                for pid, conn in rt.subscribers.items()
                if (p := session.participant(pid)) and p.prefs.language == target
            ]
            await self.broadcast_raw(rt, data, only=targets)
            if session.settings.sign_input == SIGN_FROM_TRANSLATION and session.settings.signing_enabled:
                signed = Utterance(
                    speaker_id=utt.speaker_id,
                    text=translation.target_text,
                    tokens=translation.target_text.split(),
                    t0=utt.t0,
                    t1=utt.t1,
                    language=target,
                    utterance_id=utt.utterance_id,
                )
                apply_backpressure(rt.queues["signgen"], (signed, mono_ms()), "signgen")

    async def _emotion_worker(self, rt: SessionRuntime):
        session = rt.session
        while True:
            utt, enqueue = await rt.queues["emotion"].get()
            dequeue = mono_ms()
            label = classify_emotion(utt, self.emotion_lexicon)
            complete = mono_ms()
            self.ledger.record_latency("emotion", utt.utterance_id, enqueue, dequeue, complete)
            if not session.settings.emoji_overlay:
                continue
            data = Envelope(
                type="emotion",
                session_id=session.session_id,
                sender_id=utt.speaker_id,
                payload={
                    "utterance_id": utt.utterance_id,
                    "label": label.label,
                    "confidence": round(label.confidence, 4),
                    "emoji": emoji_for(label),
                },
            ).to_json()
            targets = [
                conn
                for pid, conn in rt.subscribers.items()
                if (p := session.participant(pid)) and p.prefs.emoji_enabled
            ]
            await self.broadcast_raw(rt, data, only=targets)

    async def _signgen_worker(self, rt: SessionRuntime):
        session = rt.session
        while True:
            utt, enqueue = await rt.queues["signgen"].get()
            dequeue = mono_ms()
            try:
                glosses = tokenize_to_glosses(utt.text, self.dictionary)
                if not glosses:
                    continue
                sequence = assemble_animation(
                    glosses,
                    self.dictionary,
                    speed=1.0,
                    utterance_id=utt.utterance_id,
                    transition_frames=self.config.transition_frames,
                )
            except PipelineError:
                self.ledger.record_error("signgen")
                continue
            session.remember_sequence(sequence)
            complete = mono_ms()
            self.ledger.record_latency("signgen", utt.utterance_id, enqueue, dequeue, complete)
            await self._deliver_sequence(rt, sequence)

    async def _deliver_sequence(
        self,
        rt: SessionRuntime,
        sequence,
        only: list[ConnState] | None = None,
        force_speed: float | None = None,
    ):
        session = rt.session
        payload_cache: dict[tuple[float, bool], str] = {}
        targets = only if only is not None else list(rt.subscribers.values())
        for conn in targets:
            p = session.participant(conn.participant_id)
            if p is None or not p.prefs.signing_enabled:
                continue
            speed = force_speed if force_speed is not None else p.prefs.signing_speed
            key = (speed, p.prefs.sign_inline)
            data = payload_cache.get(key)
            if data is None:
                seq = sequence if speed == sequence.speed else retime(sequence, speed)
                payload = {
                    "sequence_id": seq.sequence_id,
                    "utterance_id": seq.utterance_id,
                    "gloss_ids": seq.gloss_ids,
                    "speed": speed,
                    "frame_count": len(seq.frames),
                    "fps": 30,
                    "total_duration": round(seq.total_duration, 6),
                    "dictionary_version": self.dictionary.version,
                }
                if p.prefs.sign_inline:
                    payload["frames"] = _frames_payload(seq)
                data = Envelope(
                    type="sign_sequence",
                    session_id=session.session_id,
                    sender_id="pipeline",
                    payload=payload,
                ).to_json()
                payload_cache[key] = data
            await self._send(conn, data)

    async def _summary_worker(self, rt: SessionRuntime):
        session = rt.session
        while True:
            utt, enqueue = await rt.queues["summary"].get()
            dequeue = mono_ms()
            session.summary.accumulate(utt, now=rt.now_s())
            self.ledger.record_latency("summary", utt.utterance_id, enqueue, dequeue, mono_ms())

    async def _summary_scheduler(self, rt: SessionRuntime):
        session = rt.session
        tick = max(0.1, min(1.0, session.settings.summary_interval_s / 4))
        while True:
            await asyncio.sleep(tick)
            record = session.summary.schedule_tick(rt.now_s())
            if record is not None:
                await self.broadcast_raw(rt, self._summary_envelope(session, record).to_json())

    def _summary_envelope(self, session: Session, record) -> Envelope:
        return Envelope(
            type="summary",
            session_id=session.session_id,
            payload={
                "window": list(record.window),
                "key_points": record.key_points,
                "decisions": record.decisions,
                "action_items": record.action_items,
                "language": record.language,
            },
        )

    # -- connection handling ------------------------------------------------

    def _roster(self, session: Session) -> list[dict]:
        return [
            {
                "participant_id": p.participant_id,
                "display_name": p.display_name,
                "role": p.role,
                "prefs": {
                    "signing_speed": p.prefs.signing_speed,
                    "language": p.prefs.language,
                    "emoji_enabled": p.prefs.emoji_enabled,
                    "signing_enabled": p.prefs.signing_enabled,
                },
            }
            for p in session.participants
        ]

    async def handle_connection(self, ws):
        conn = ConnState(ws=ws)
        conn.sender_task = asyncio.create_task(self._sender_loop(conn))
        try:
            try:
                raw = await asyncio.wait_for(ws.recv(), timeout=self.config.join_timeout_s)
            except asyncio.TimeoutError:
                await self.send_envelope(conn, error_envelope(JOIN_TIMEOUT, "join required within 5 s"))
                await self._flush_outbox(conn)
                await ws.close(CLOSE_JOIN_TIMEOUT, "JOIN_TIMEOUT")
                return
            joined = await self._handle_join(conn, raw)
            if not joined:
                await self._flush_outbox(conn)
                await ws.close(CLOSE_JOIN_TIMEOUT, "JOIN_TIMEOUT")
                return
            async for raw in ws:
                self.envelopes_received += 1
                await self._dispatch(conn, raw)
        except ConnectionClosed:
            pass
        finally:
            if conn.sender_task is not None:
                # let queued frames flush before tearing down
                try:
                    await asyncio.wait_for(conn.outbox.join(), timeout=0.1)
                except (asyncio.TimeoutError, Exception):
                    pass
                conn.sender_task.cancel()
            await self._drop_connection(conn)

    async def _handle_join(self, conn: ConnState, raw) -> bool:
        try:
            env = parse_envelope(raw)
        except ProtocolViolation as exc:
            await self.send_envelope(conn, error_envelope(exc.code, str(exc)))
            return False
        if env.type != "join":
            await self.send_envelope(conn, error_envelope(NOT_JOINED, "first message must be join"))
            return False
        self.envelopes_received += 1
        payload = env.payload
        session_id = env.session_id or payload.get("session_id") or "default"
        settings_doc = payload.get("settings") or {}
        settings_doc.setdefault("summary_interval_s", self.config.summary_interval_s)
        try:
            settings = SessionSettings(**settings_doc)
        except (TypeError, PipelineError) as exc:
            await self.send_envelope(conn, error_envelope("INVALID_SETTINGS", str(exc)))
            return False
        session = self.registry.get_or_create(session_id, settings)
        rt = self.runtime_for(session)
        prefs_doc = payload.get("prefs") or {}
        try:
            prefs = ParticipantPrefs(**prefs_doc)
            participant = Participant(
                participant_id=payload.get("participant_id") or env.sender_id or "",
                display_name=payload.get("display_name", "anonymous"),
                role=payload.get("role", "speaker"),
                prefs=prefs,
            )
            if not participant.participant_id:
                participant.participant_id = f"p-{len(session.participants) + 1}-{id(conn) & 0xFFFF:x}"
            token = session.join(participant)
        except (TypeError, RoomFull, DuplicateParticipant, PipelineError) as exc:
            code = exc.code if isinstance(exc, PipelineError) else MALFORMED_PAYLOAD
            await self.send_envelope(conn, error_envelope(code, str(exc), session_id))
            return False
        conn.session_id = session_id
        conn.participant_id = participant.participant_id
        conn.joined = True
        rt.subscribers[participant.participant_id] = conn
        await self.send_envelope(
            conn,
            Envelope(
                type="joined",
                session_id=session_id,
                payload={
                    "participant_id": participant.participant_id,
                    "token": token,
                    "roster": self._roster(session),
                },
            ),
        )
        presence = Envelope(
            type="presence",
            session_id=session_id,
            payload={"event": "join", "participant_id": participant.participant_id, "roster": self._roster(session)},
        ).to_json()
        await self.broadcast_raw(rt, presence)
        return True

    async def _drop_connection(self, conn: ConnState):
        if not conn.joined:
            return
        self.disconnects += 1
        rt = self.runtimes.get(conn.session_id)
        if rt is None:
            return
        rt.subscribers.pop(conn.participant_id, None)
        session = rt.session
        # finalise any pending speech so captions are not lost
        assembler = session.assemblers.get(conn.participant_id)
        if assembler is not None:
            for utt in assembler.flush():
                await self._emit_utterance(rt, None, utt)
        session.leave(conn.participant_id)
        presence = Envelope(
            type="presence",
            session_id=conn.session_id,
            payload={"event": "leave", "participant_id": conn.participant_id, "roster": self._roster(session)},
        ).to_json()
        await self.broadcast_raw(rt, presence)

    async def _dispatch(self, conn: ConnState, raw):
        try:
            env = parse_envelope(raw)
        except ProtocolViolation as exc:
            await self.send_envelope(conn, error_envelope(exc.code, str(exc), conn.session_id))
            return
        rt = self.runtimes.get(conn.session_id)
        if rt is None:
            await self.send_envelope(conn, error_envelope(NOT_JOINED, "session gone"))
            return
        handler = {
            "audio_chunk": self._on_audio_chunk,
            "text_message": self._on_text_message,
            "request_summary": self._on_request_summary,
            "replay_request": self._on_replay_request,
            "set_prefs": self._on_set_prefs,
            "join": self._on_rejoin,
        }.get(env.type)
        if handler is None:
            await self.send_envelope(
                conn, error_envelope(UNKNOWN_TYPE, f"unexpected type {env.type}", conn.session_id)
            )
            return
        try:
            await handler(conn, rt, env)
        except PipelineError as exc:
            await self.send_envelope(conn, error_envelope(exc.code, str(exc), conn.session_id))
        except Exception as exc:  # malformed input never kills the server
            log.exception("handler failure for %s", env.type)
            await self.send_envelope(
                conn, error_envelope(MALFORMED_PAYLOAD, f"{type(exc).__name__}: {exc}", conn.session_id)
            )

    async def _on_rejoin(self, conn, rt, env):
        await self.send_envelope(
            conn, error_envelope(MALFORMED_PAYLOAD, "already joined", conn.session_id)
        )

    async def _on_audio_chunk(self, conn: ConnState, rt: SessionRuntime, env: Envelope):
        p = env.payload
        speaker_id = conn.participant_id
        seq = p.get("seq")
        if not isinstance(seq, int) or seq < 0:
            raise ProtocolViolation("audio_chunk needs an integer 'seq'")
        import base64

        samples = None
        if p.get("audio_b64"):
            samples = base64.b64decode(p["audio_b64"])
        chunk = AudioChunk(
            session_id=conn.session_id,
            speaker_id=speaker_id,
            seq=seq,
            start_time=float(p.get("start_time", 0.0)),
            duration=float(p.get("duration", 1.0)),
            sample_rate=int(p.get("sample_rate", 16000)),
            samples=samples,
            oracle_text=p.get("oracle_text"),
        )
        if not rt.session.peek_seq(speaker_id, seq):
            await self.send_envelope(
                conn,
                error_envelope(REORDER_ERROR, f"out-of-order chunk seq {seq}", conn.session_id, env.event_id),
            )
            return
        item = (conn, chunk, mono_ms())
        queue = rt.queues["transcription"]
        outcome = apply_backpressure(queue, item, "transcription")
        if outcome == REJECTED:
            # smooth bursts: hold this connection's reader briefly before
            # rejecting (per-connection reads are sequential by design)
            try:
                await asyncio.wait_for(
                    queue.put(item), timeout=self.config.intake_wait_ms / 1000.0
                )
                outcome = ACCEPTED
            except asyncio.TimeoutError:
                pass
        if outcome == REJECTED:
            conn.consecutive_rejects += 1
            await self.send_envelope(
                conn,
                error_envelope("QUEUE_FULL", "transcription queue full", conn.session_id, env.event_id),
            )
            if conn.consecutive_rejects > self.config.slow_consumer_grace:
                await conn.ws.close(CLOSE_SLOW_CONSUMER, SLOW_CONSUMER)
        else:
            conn.consecutive_rejects = 0
            rt.session.advance_seq(speaker_id)

    async def _on_text_message(self, conn: ConnState, rt: SessionRuntime, env: Envelope):
        text = env.payload.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ProtocolViolation("text_message needs non-empty 'text'")
        now = rt.now_s()
        start = mono_ms()
        utt = Utterance(
            speaker_id=conn.participant_id,
            text=punctuate(text.split()),
            tokens=[],
            t0=now,
            t1=now + max(0.3 * len(text.split()), 1e-3),
            language=rt.session.settings.source_language,
        )
        utt.tokens = utt.text.split()
        self.ledger.record_latency("transcription", utt.utterance_id, start, start, mono_ms())
        await self._emit_utterance(rt, conn, utt)

    async def _on_request_summary(self, conn: ConnState, rt: SessionRuntime, env: Envelope):
        record = rt.session.summary.on_demand(rt.now_s())
        if record is None:
            await self.send_envelope(
                conn, error_envelope("EMPTY_WINDOW", "no transcript since last summary", conn.session_id)
            )
            return
        # on-demand summaries go to the requester only
        await self.send_envelope(conn, self._summary_envelope(rt.session, record))

    async def _on_replay_request(self, conn: ConnState, rt: SessionRuntime, env: Envelope):
        sequence_id = env.payload.get("sequence_id")
        if not isinstance(sequence_id, str):
            raise ProtocolViolation("replay_request needs 'sequence_id'")
        speed = env.payload.get("speed")
        if speed is not None and not isinstance(speed, (int, float)):
            raise ProtocolViolation("'speed' must be a number")
        sequence = rt.session.replay(sequence_id, None if speed is None else float(speed))
        await self._deliver_sequence(
            rt, sequence, only=[conn], force_speed=None if speed is None else float(speed)
        )

    async def _on_set_prefs(self, conn: ConnState, rt: SessionRuntime, env: Envelope):
        allowed = {"signing_speed", "language", "emoji_enabled", "signing_enabled", "sign_inline"}
        changes = {k: v for k, v in env.payload.items() if k in allowed}
        unknown = set(env.payload) - allowed
        if unknown:
            raise ProtocolViolation(f"unknown prefs: {sorted(unknown)}")
        rt.session.update_prefs(conn.participant_id, **changes)
        await self.send_envelope(
            conn,
            Envelope(
                type="presence",
                session_id=conn.session_id,
                payload={"event": "prefs", "participant_id": conn.participant_id, "roster": self._roster(rt.session)},
            ),
        )

    # -- HTTP side channel --------------------------------------------------

    def metrics(self) -> dict:
        report = self.ledger.kpi_report()
        return {
            "uptime_s": time.monotonic() - self.started_mono,
            "envelopes_received": self.envelopes_received,
            "error_envelopes_sent": self.error_envelopes_sent,
            "disconnects": self.disconnects,
            "queue_depths": self.queue_depths(),
            "stages": {
                s: {
                    "count": k.count,
                    "errors": k.errors,
                    "mean_ms": round(k.mean_ms, 3),
                    "p50_ms": round(k.p50_ms, 3),
                    "p95_ms": round(k.p95_ms, 3),
                    "p99_ms": round(k.p99_ms, 3),
                    "budget_ms": k.budget_ms,
                    "passed": k.passed,
                }
                for s, k in report.items()
            },
        }

    def http_response(self, path: str) -> tuple[int, dict] | None:
        if path == "/health":
            return 200, {"status": "ok"}
        if path == "/metrics":
            return 200, self.metrics()
        if path == "/dictionary":
            return 200, {
                "version": self.dictionary.version,
                "entries": len(self.dictionary),
                "fingerspell_complete": self.dictionary.fingerspell_complete,
            }
        if path.startswith("/clips/"):
            gloss_id = path[len("/clips/") :]
            clip = self.dictionary.entries.get(gloss_id)
            if clip is None:
                return 404, {"error": "MISSING_SIGN", "gloss_id": gloss_id}
            return 200, {
                "gloss_id": gloss_id,
                "fps": clip.fps,
                "frame_count": clip.frame_count,
                "frames": [
                    {
                        "t": f.t,
                        "pose": f.pose.tolist(),
                        "left_hand": f.left_hand.tolist(),
                        "right_hand": f.right_hand.tolist(),
                        **({"face": f.face.tolist()} if f.face is not None else {}),
                    }
                    for f in clip.frames
                ],
            }
        return None


async def run_server(app: GatewayApp, ready: asyncio.Event | None = None):
    def process_request(connection, request):
        if request.path == "/ws":
            return None  # proceed with the WebSocket handshake
        result = app.http_response(request.path)
        if result is None:
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")
        status, body = result
        response = connection.respond(http.HTTPStatus(status), json.dumps(body) + "\n")
        response.headers["Content-Type"] = "application/json"
        return response

    try:
        server = await ws_serve(
            app.handle_connection,
            app.config.host,
            app.config.port,
            process_request=process_request,
            max_size=16 * 1024 * 1024,
        )
    except OSError as exc:
        raise PipelineError(f"cannot bind {app.config.host}:{app.config.port}: {exc}", code="BIND_FAILED")
    log.info("gateway listening on ws://%s:%d/ws", app.config.host, app.config.port)
    if ready is not None:
        ready.set()
    await server.serve_forever()


def main(argv=None):
    from .config import load_config

    parser = argparse.ArgumentParser(prog="axs-gateway", description="Accessibility pipeline gateway")
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--host", default=None)
    parser.add_argument("--config", default=None, help="JSON config file")
    parser.add_argument("--dictionary", default=None, help="compiled sign dictionary artifact")
    parser.add_argument("--recognizer", choices=["mock", "external"], default=None)
    parser.add_argument("--log-level", default=None)
    args = parser.parse_args(argv)
    config = load_config(
        args.config,
        port=args.port,
        host=args.host,
        dictionary=args.dictionary,
        recognizer=args.recognizer,
        log_level=args.log_level,
    )
    logging.basicConfig(level=getattr(logging, config.log_level.upper(), logging.INFO))
    try:
        app = GatewayApp(config)
    except PipelineError as exc:
        parser.exit(2, f"startup failed: {exc}\n")
    asyncio.run(run_server(app))


if __name__ == "__main__":
    main()
