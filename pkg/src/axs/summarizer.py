"""Extractive meeting minutes: frequency-scored key points plus
cue-matched decisions and action items over tiling time windows."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .chunker import Utterance
from .errors import EmptyWindow
from .translator import TranslatorRegistry

DEFAULT_INTERVAL_S = 900.0  # scheduled summaries every 15 minutes
DEFAULT_MAX_KEY_POINTS = 5

DECISION_CUES = ("decided", "agreed", "approved")
ACTION_CUES = ("will", "must", "todo", "action item")
WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
_BY_WEEKDAY = re.compile(r"\bby\s+(" + "|".join(WEEKDAYS) + r")\b", re.IGNORECASE)

STOPWORDS = frozenset(
    """a an the and or but if then else of in on at to for from with by as is are was
    were be been being it its this that these those we you they he she i me my our
    your their them him her us so not no do does did done have has had will would
    can could should shall may might about into over under again very just there
    here what which who whom when where why how all any both each more most other
    some such only own same than too s t don now""".split()
)

_SENTENCE_RE = re.compile(r"[^.!?]*[.!?]|[^.!?]+$")


@dataclass
class SummaryRecord:
    session_id: str
    window: tuple[float, float]
    key_points: list[str]
    decisions: list[str]
    action_items: list[str]
    language: str = "en"


@dataclass
class TranscriptEntry:
    speaker_id: str
    text: str
    t: float
    utterance_id: str


def split_sentences(text: str) -> list[str]:
    return [s.strip() for s in _SENTENCE_RE.findall(text) if s.strip()]


def _content_words(sentence: str) -> list[str]:
    words = [w.strip(".,!?;:'\"()").lower() for w in sentence.split()]
    return [w for w in words if w and w not in STOPWORDS]


def _is_decision(sentence: str) -> bool:
    low = sentence.lower()
    return any(cue in low for cue in DECISION_CUES)


def _is_action(sentence: str) -> bool:
    low = sentence.lower()
    return any(cue in low for cue in ACTION_CUES) or bool(_BY_WEEKDAY.search(low))


def extract_summary(
    entries: list[TranscriptEntry],
    window: tuple[float, float],
    session_id: str = "",
    language: str = "en",
    k: int = DEFAULT_MAX_KEY_POINTS,
) -> SummaryRecord:
    """Score sentences by summed normalised content-word frequency.

    Top-k sentences become key points (kept in original order); sentences
    matching decision or action cues go to their cue list instead.
    """
    if not entries:
        raise EmptyWindow("no transcript in window")
    sentences: list[str] = []
    for entry in entries:
        sentences.extend(split_sentences(entry.text))
    if not sentences:
        raise EmptyWindow("window transcript contains no sentences")

    freq: dict[str, int] = {}
    for s in sentences:
        for w in _content_words(s):
            freq[w] = freq.get(w, 0) + 1
    max_freq = max(freq.values()) if freq else 1

    decisions, action_items, candidates = [], [], []
    for idx, s in enumerate(sentences):
        if _is_decision(s):
            decisions.append(s)
        elif _is_action(s):
            action_items.append(s)
        else:
            score = sum(freq[w] / max_freq for w in _content_words(s))
            candidates.append((idx, score, s))

    top = sorted(candidates, key=lambda c: (-c[1], c[0]))[:k]
    key_points = [s for _, _, s in sorted(top, key=lambda c: c[0])]
    return SummaryRecord(
        session_id=session_id,
        window=window,
        key_points=key_points,
        decisions=decisions,
        action_items=action_items,
        language=language,
    )


class SummaryAccumulator:
    """Per-session transcript store; windows tile the session timeline."""

    def __init__(
        self,
        session_id: str,
        interval_s: float = DEFAULT_INTERVAL_S,
        k: int = DEFAULT_MAX_KEY_POINTS,
        language: str = "en",
    ):
        self.session_id = session_id
        self.interval_s = interval_s
        self.k = k
        self.language = language
        self._entries: list[TranscriptEntry] = []
        self._seen_ids: set[str] = set()
        self._window_start = 0.0
        self._last_summary_at = 0.0
        self.duplicate_warnings = 0

    def accumulate(self, utterance: Utterance, now: float) -> None:
        if utterance.utterance_id in self._seen_ids:
            self.duplicate_warnings += 1
            return
        self._seen_ids.add(utterance.utterance_id)
        self._entries.append(
            TranscriptEntry(utterance.speaker_id, utterance.text, now, utterance.utterance_id)
        )

    def _window_entries(self, t_end: float) -> list[TranscriptEntry]:
        return [e for e in self._entries if self._window_start <= e.t < t_end]

    def schedule_tick(self, now: float) -> SummaryRecord | None:
        """Scheduled trigger: fires at interval boundaries, never emits an
        empty record."""
        if now - self._last_summary_at < self.interval_s:
            return None
        return self._emit(now, advance_clock=True)

    def on_demand(self, now: float) -> SummaryRecord | None:
        """Immediate summary over everything since the last window end."""
        return self._emit(now, advance_clock=False)

    def _emit(self, now: float, advance_clock: bool) -> SummaryRecord | None:
        window_entries = self._window_entries(now)
        if advance_clock:
            self._last_summary_at = now
        if not window_entries:
            return None
        record = extract_summary(
            window_entries,
            window=(self._window_start, now),
            session_id=self.session_id,
            language=self.language,
            k=self.k,
        )
        self._window_start = now
        return record


def summarize_multilingual(
    record: SummaryRecord,
    targets: list[str],
    translator: TranslatorRegistry,
) -> list[tuple[str, SummaryRecord | None, str | None]]:
    """Translate a record per target; partial failures reported per target.

    Returns (target, record-or-None, error-code-or-None) triples.
    """
    results: list[tuple[str, SummaryRecord | None, str | None]] = []
    for target in targets:
        if not translator.registered(record.language, target):
            results.append((target, None, "PAIR_NOT_REGISTERED"))
            continue
        tr = lambda s: translator.translate_text(s, record.language, target)
        results.append(
            (
                target,
                SummaryRecord(
                    session_id=record.session_id,
                    window=record.window,
                    key_points=[tr(s) for s in record.key_points],
                    decisions=[tr(s) for s in record.decisions],
                    action_items=[tr(s) for s in record.action_items],
                    language=target,
                ),
                None,
            )
        )
    return results
