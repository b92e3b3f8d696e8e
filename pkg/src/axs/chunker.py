"""Overlapping audio chunking and transcript reassembly.

Audio is cut into fixed-length chunks with a configurable overlap
(defaults: 1.0 s chunks, 0.5 s overlap). Each chunk is transcribed
independently, so consecutive hypotheses repeat the tokens heard in the
shared half-second; ``merge_token_overlap`` reconciles them and a
fragment heuristic repairs words cut at a chunk boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParams
from .ids import new_id

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_CHUNK_LEN = 1.0
DEFAULT_OVERLAP = 0.5
DEFAULT_SILENCE_GAP = 1.5
MAX_UTTERANCE_TOKENS = 60

BYTES_PER_SAMPLE = 2  # 16-bit linear PCM, mono

_TERMINAL_PUNCT = (".", "!", "?")


@dataclass
class AudioChunk:
    session_id: str
    speaker_id: str
    seq: int
    start_time: float  # seconds from stream start
    duration: float  # true (unpadded) duration in seconds
    sample_rate: int = DEFAULT_SAMPLE_RATE
    samples: bytes | None = None  # may be omitted on the oracle-text path
    oracle_text: str | None = None  # test channel; read only by the mock recognizer

    def __post_init__(self):
        if self.duration <= 0:
            raise InvalidParams(f"chunk duration must be > 0, got {self.duration}")
        if self.seq < 0:
            raise InvalidParams(f"chunk seq must be >= 0, got {self.seq}")

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    @property
    def n_samples(self) -> int:
        return round(self.duration * self.sample_rate)


@dataclass
class TranscriptSegment:
    chunk_seq: int
    text: str
    t0: float
    t1: float
    final: bool = False
    confidence: float = 1.0
    tokens: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.t0 >= self.t1:
            raise InvalidParams(f"segment times must satisfy t0 < t1 ({self.t0}, {self.t1})")
        if not 0.0 <= self.confidence <= 1.0:
            raise InvalidParams(f"confidence out of range: {self.confidence}")
        self.tokens = self.text.split()


@dataclass
class Utterance:
    speaker_id: str
    text: str
    tokens: list[str]
    t0: float
    t1: float
    language: str = "en"
    utterance_id: str = field(default_factory=lambda: new_id("utt-"))

    def __post_init__(self):
        if not self.text:
            raise InvalidParams("utterance text must be non-empty")
        if self.t1 - self.t0 <= 0:
            raise InvalidParams("utterance must span positive time")


def chunk_params_to_samples(
    chunk_len: float, overlap: float, sample_rate: int
) -> tuple[int, int]:
    """Validate chunking parameters and return (chunk_samples, stride_samples)."""
    if sample_rate <= 0:
        raise InvalidParams(f"sample_rate must be > 0, got {sample_rate}")
    if not 0 <= overlap < chunk_len:
        raise InvalidParams(f"need 0 <= overlap < chunk_len, got overlap={overlap} chunk_len={chunk_len}")
    chunk_samples = round(chunk_len * sample_rate)
    stride_samples = round((chunk_len - overlap) * sample_rate)
    if stride_samples <= 0:
        raise InvalidParams("stride rounds to zero samples")
    return chunk_samples, stride_samples


def chunk_stream(
    pcm: bytes,
    chunk_len: float = DEFAULT_CHUNK_LEN,
    overlap: float = DEFAULT_OVERLAP,
    sample_rate: int = DEFAULT_SAMPLE_RATE,
    session_id: str = "",
    speaker_id: str = "",
) -> list[AudioChunk]:
    """Split a mono 16-bit PCM buffer into overlapping chunks.

    Chunk k starts at k * (chunk_len - overlap). Every input sample lands
    in at least one chunk; the trailing partial chunk is zero-padded to
    the full chunk length but records its true duration.
    """
    chunk_samples, stride = chunk_params_to_samples(chunk_len, overlap, sample_rate)
    if len(pcm) % BYTES_PER_SAMPLE:
        raise InvalidParams("PCM byte length must be even (16-bit samples)")
    total = len(pcm) // BYTES_PER_SAMPLE
    if total == 0:
        return []
    if total <= chunk_samples:
        n_chunks = 1
    else:
        n_chunks = 1 + math.ceil((total - chunk_samples) / stride)
    chunks = []
    for k in range(n_chunks):
        start = k * stride
        true_samples = min(chunk_samples, total - start)
        raw = pcm[start * BYTES_PER_SAMPLE : (start + chunk_samples) * BYTES_PER_SAMPLE]
        if len(raw) < chunk_samples * BYTES_PER_SAMPLE:
            raw = raw + b"\x00" * (chunk_samples * BYTES_PER_SAMPLE - len(raw))
        chunks.append(
            AudioChunk(
                session_id=session_id,
                speaker_id=speaker_id,
                seq=k,
                start_time=start / sample_rate,
                duration=true_samples / sample_rate,
                sample_rate=sample_rate,
                samples=raw,
            )
        )
    return chunks


def merge_token_overlap(prev: list[str], nxt: list[str]) -> list[str]:
    """Merge token hypotheses from two consecutive overlapping chunks.

    The longest contiguous run that is both a suffix of ``prev`` and a
    prefix of ``nxt`` (case-insensitive) is emitted once. With no common
    run, a trailing ``prev`` token that is a strict prefix of ``nxt``'s
    first token is treated as a boundary fragment and dropped.
    """
    if not prev or not nxt:
        return prev + nxt
    prev_l = [t.lower() for t in prev]
    nxt_l = [t.lower() for t in nxt]
    for run in range(min(len(prev), len(nxt)), 0, -1):
        if prev_l[-run:] == nxt_l[:run]:
            return prev + nxt[run:]
    if nxt_l[0].startswith(prev_l[-1]) and len(prev_l[-1]) < len(nxt_l[0]):
        return prev[:-1] + nxt
    return prev + nxt


def merge_overlaps(prev: TranscriptSegment, nxt: TranscriptSegment) -> list[str]:
    """Segment-level wrapper around ``merge_token_overlap``."""
    if nxt.chunk_seq != prev.chunk_seq + 1:
        raise InvalidParams(
            f"segments must be consecutive chunks, got {prev.chunk_seq} then {nxt.chunk_seq}"
        )
    return merge_token_overlap(prev.tokens, nxt.tokens)


def punctuate(tokens: list[str]) -> str:
    """Minimal restoration: capitalise the first token, ensure a terminal mark."""
    if not tokens:
        return ""
    words = list(tokens)
    words[0] = words[0][:1].upper() + words[0][1:]
    text = " ".join(words)
    if not text.endswith(_TERMINAL_PUNCT):
        text += "."
    return text


class TranscriptAssembler:
    """Per-speaker accumulator turning overlapping segments into utterances.

    An utterance is finalised when the inter-segment silence reaches
    ``silence_gap`` seconds or the pending text reaches
    ``MAX_UTTERANCE_TOKENS`` tokens.
    """

    def __init__(
        self,
        speaker_id: str,
        language: str = "en",
        silence_gap: float = DEFAULT_SILENCE_GAP,
        max_tokens: int = MAX_UTTERANCE_TOKENS,
    ):
        self.speaker_id = speaker_id
        self.language = language
        self.silence_gap = silence_gap
        self.max_tokens = max_tokens
        self._tokens: list[str] = []
        self._t0 = 0.0
        self._t1 = 0.0
        self._last_seq: int | None = None

    @property
    def pending_tokens(self) -> list[str]:
        return list(self._tokens)

    def _finalize(self) -> Utterance | None:
        if not self._tokens:
            return None
        utt = Utterance(
            speaker_id=self.speaker_id,
            text=punctuate(self._tokens),
            tokens=[],
            t0=self._t0,
            t1=max(self._t1, self._t0 + 1e-6),
            language=self.language,
        )
        utt.tokens = utt.text.split()
        self._tokens = []
        return utt

    def add_segment(self, seg: TranscriptSegment) -> list[Utterance]:
        emitted: list[Utterance] = []
        if not seg.tokens:
            # silence: finalise once the gap since the last speech is long enough
            if self._tokens and seg.t1 - self._t1 >= self.silence_gap:
                utt = self._finalize()
                if utt:
                    emitted.append(utt)
            self._last_seq = seg.chunk_seq
            return emitted

        if self._tokens and seg.t0 - self._t1 >= self.silence_gap:
            utt = self._finalize()
            if utt:
                emitted.append(utt)

        if not self._tokens:
            self._tokens = list(seg.tokens)
            self._t0 = seg.t0
        elif self._last_seq is not None and seg.chunk_seq == self._last_seq + 1:
            self._tokens = merge_token_overlap(self._tokens, seg.tokens)
        else:
            self._tokens = self._tokens + seg.tokens
        self._t1 = max(self._t1, seg.t1)
        self._last_seq = seg.chunk_seq

        if len(self._tokens) >= self.max_tokens:
            utt = self._finalize()
            if utt:
                emitted.append(utt)
        return emitted

    def flush(self) -> list[Utterance]:
        utt = self._finalize()
        return [utt] if utt else []


def script_to_chunks(
    text: str,
    session_id: str = "",
    speaker_id: str = "",
    chunk_len: float = DEFAULT_CHUNK_LEN,
    overlap: float = DEFAULT_OVERLAP,
    seconds_per_token: float = 0.3,
    append_silence: bool = True,
    silence_gap: float = DEFAULT_SILENCE_GAP,
    seq_base: int = 0,
    time_base: float = 0.0,
) -> list[AudioChunk]:
    """Turn a scripted sentence into oracle-text chunks.

    Simulates speech at ``seconds_per_token``: each token occupies a
    contiguous slot and every chunk's oracle_text lists the tokens its
    window intersects, so consecutive chunks repeat overlap-region tokens
    exactly as a real recognizer re-hearing the shared audio would.
    A trailing silence chunk (when requested) lets the assembler finalise.
    """
    tokens = text.split()
    # integer milliseconds avoid float-boundary fuzz in window membership
    spt_ms = round(seconds_per_token * 1000)
    chunk_ms = round(chunk_len * 1000)
    stride_ms = round((chunk_len - overlap) * 1000)
    if stride_ms <= 0 or spt_ms <= 0:
        raise InvalidParams("chunk stride and token duration must be positive")
    total_ms = len(tokens) * spt_ms
    chunks: list[AudioChunk] = []
    if tokens:
        if total_ms <= chunk_ms:
            n_chunks = 1
        else:
            n_chunks = 1 + math.ceil((total_ms - chunk_ms) / stride_ms)
        for k in range(n_chunks):
            w0 = k * stride_ms
            w1 = min(w0 + chunk_ms, total_ms)
            heard = [
                tok
                for i, tok in enumerate(tokens)
                if i * spt_ms < w1 and (i + 1) * spt_ms > w0
            ]
            chunks.append(
                AudioChunk(
                    session_id=session_id,
                    speaker_id=speaker_id,
                    seq=seq_base + k,
                    start_time=time_base + w0 / 1000,
                    duration=(w1 - w0) / 1000,
                    oracle_text=" ".join(heard),
                )
            )
    if append_silence:
        chunks.append(
            AudioChunk(
                session_id=session_id,
                speaker_id=speaker_id,
                seq=seq_base + len(chunks),
                start_time=time_base + total_ms / 1000,
                duration=silence_gap + 0.1,
            )
        )
    return chunks
