"""Session and room state: participants, preferences, replay buffer,
per-speaker ordering, and stage fan-out planning."""

from __future__ import annotations

import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field, replace

from .chunker import TranscriptAssembler, Utterance
from .errors import (
    DuplicateId,
    DuplicateParticipant,
    InvalidParams,
    InvalidSettings,
    NotInBuffer,
    RoomFull,
    SessionClosed,
    SessionUnknown,
)
from .ids import new_id
from .signgen import SPEED_MAX, SPEED_MIN, AnimationSequence, retime
from .summarizer import DEFAULT_INTERVAL_S, SummaryAccumulator

MAX_PARTICIPANTS = 8
DEFAULT_REPLAY_CAPACITY = 16

SPEAKER, VIEWER = "speaker", "viewer"

# source-language text feeds sign generation by default; the settings
# switch routes translated text instead
SIGN_FROM_SOURCE = "source"
SIGN_FROM_TRANSLATION = "translation"


@dataclass
class SessionSettings:
    source_language: str = "en"
    target_language: str = "fr"
    signing_enabled: bool = True
    emoji_overlay: bool = True
    summary_interval_s: float = DEFAULT_INTERVAL_S
    replay_capacity: int = DEFAULT_REPLAY_CAPACITY
    sign_input: str = SIGN_FROM_SOURCE
    emit_partials: bool = True  # live-caption updates for non-final segments

    def __post_init__(self):
        if self.summary_interval_s <= 0:
            raise InvalidSettings(f"summary interval must be > 0, got {self.summary_interval_s}")
        if self.replay_capacity <= 0:
            raise InvalidSettings("replay capacity must be > 0")
        if self.sign_input not in (SIGN_FROM_SOURCE, SIGN_FROM_TRANSLATION):
            raise InvalidSettings(f"unknown sign_input: {self.sign_input}")


@dataclass
class ParticipantPrefs:
    signing_speed: float = 1.0
    language: str = "en"
    emoji_enabled: bool = True
    signing_enabled: bool = True
    sign_inline: bool = True  # False: clip-reference envelopes for caching clients

    def __post_init__(self):
        if not SPEED_MIN <= self.signing_speed <= SPEED_MAX:
            raise InvalidParams(
                f"signing_speed must be in [{SPEED_MIN}, {SPEED_MAX}], got {self.signing_speed}"
            )


@dataclass
class Participant:
    participant_id: str
    display_name: str
    role: str = SPEAKER
    prefs: ParticipantPrefs = field(default_factory=ParticipantPrefs)

    def __post_init__(self):
        if self.role not in (SPEAKER, VIEWER):
            raise InvalidParams(f"unknown role: {self.role}")


class Session:
    """Per-room pipeline state. Mutations go through the internal lock so
    no concurrent reader ever observes more than 8 participants."""

    def __init__(self, session_id: str, settings: SessionSettings):
        self.session_id = session_id
        self.settings = settings
        self.created_at = time.time()
        self.closed = False
        self._lock = threading.Lock()
        self._participants: "OrderedDict[str, Participant]" = OrderedDict()
        self._replay: "OrderedDict[str, AnimationSequence]" = OrderedDict()
        self._next_seq: dict[str, int] = {}  # per-speaker expected audio seq
        self.assemblers: dict[str, TranscriptAssembler] = {}
        self.summary = SummaryAccumulator(
            session_id, interval_s=settings.summary_interval_s, language=settings.source_language
        )

    # -- membership ---------------------------------------------------------

    def join(self, participant: Participant) -> str:
        with self._lock:
            if self.closed:
                raise SessionClosed(self.session_id)
            if participant.participant_id in self._participants:
                raise DuplicateParticipant(participant.participant_id)
            if len(self._participants) >= MAX_PARTICIPANTS:
                raise RoomFull(f"session {self.session_id} already has {MAX_PARTICIPANTS} members")
            self._participants[participant.participant_id] = participant
            return new_id("tok-")

    def leave(self, participant_id: str) -> None:
        with self._lock:
            self._participants.pop(participant_id, None)
            self._next_seq.pop(participant_id, None)

    @property
    def participants(self) -> list[Participant]:
        with self._lock:
            return list(self._participants.values())

    def participant(self, participant_id: str) -> Participant | None:
        with self._lock:
            return self._participants.get(participant_id)

    def participant_count(self) -> int:
        with self._lock:
            return len(self._participants)

    def update_prefs(self, participant_id: str, **changes) -> ParticipantPrefs:
        with self._lock:
            p = self._participants.get(participant_id)
            if p is None:
                raise SessionUnknown(f"participant {participant_id}")
            p.prefs = replace(p.prefs, **changes)
            return p.prefs

    # -- per-speaker ordering ----------------------------------------------

    def check_seq(self, speaker_id: str, seq: int) -> bool:
        """True when seq is the next expected chunk for the speaker;
        advances the expectation on success."""
        if not self.peek_seq(speaker_id, seq):
            return False
        self.advance_seq(speaker_id)
        return True

    def peek_seq(self, speaker_id: str, seq: int) -> bool:
        with self._lock:
            return seq == self._next_seq.get(speaker_id, 0)

    def advance_seq(self, speaker_id: str) -> None:
        with self._lock:
            self._next_seq[speaker_id] = self._next_seq.get(speaker_id, 0) + 1

    def reset_seq(self, speaker_id: str) -> None:
        with self._lock:
            self._next_seq[speaker_id] = 0

    def assembler_for(self, speaker_id: str) -> TranscriptAssembler:
        if speaker_id not in self.assemblers:
            self.assemblers[speaker_id] = TranscriptAssembler(
                speaker_id, language=self.settings.source_language
            )
        return self.assemblers[speaker_id]

    # -- replay ring --------------------------------------------------------

    def remember_sequence(self, sequence: AnimationSequence) -> None:
        with self._lock:
            self._replay[sequence.sequence_id] = sequence
            while len(self._replay) > self.settings.replay_capacity:
                self._replay.popitem(last=False)

    def replay(self, sequence_id: str, speed: float | None = None) -> AnimationSequence:
        with self._lock:
            seq = self._replay.get(sequence_id)
        if seq is None:
            raise NotInBuffer(sequence_id)
        if speed is None or speed == seq.speed:
            return seq
        return retime(seq, speed)

    def replay_ids(self) -> list[str]:
        with self._lock:
            return list(self._replay)

    def close(self) -> None:
        with self._lock:
            self.closed = True


def plan_fanout(session: Session, final: bool) -> list[str]:
    """Downstream stage submissions for one transcription output.

    Finalised utterances fan out per session settings; partial segments
    update the live caption only.
    """
    if session.closed:
        raise SessionClosed(session.session_id)
    if not final:
        return []
    stages = ["translation", "emotion", "summary"]
    if session.settings.signing_enabled:
        stages.insert(2, "signgen")
    return stages


class SessionRegistry:
    """Live sessions keyed by id; ids are unique across live sessions."""

    def __init__(self):
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create_session(
        self, settings: SessionSettings | None = None, session_id: str | None = None
    ) -> Session:
        settings = settings or SessionSettings()
        with self._lock:
            if session_id is None:
                session_id = new_id("sess-")
            elif session_id in self._sessions:
                raise DuplicateId(session_id)
            session = Session(session_id, settings)
            self._sessions[session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionUnknown(session_id)
        return session

    def get_or_create(self, session_id: str, settings: SessionSettings | None = None) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                session = Session(session_id, settings or SessionSettings())
                self._sessions[session_id] = session
            return session

    def close_session(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session:
            session.close()

    def live_sessions(self) -> list[Session]:
        with self._lock:
            return list(self._sessions.values())
