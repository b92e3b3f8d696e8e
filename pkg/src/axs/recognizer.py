"""Speech-recognition backends: a deterministic mock and an HTTP client.

The mock echoes each chunk's oracle_text test channel, which keeps the
whole pipeline reproducible without any model. The external backend posts
PCM to a model server speaking the documented /recognize contract.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass

import httpx

from .chunker import AudioChunk, TranscriptSegment
from .errors import BackendTimeout, BackendUnavailable, InvalidParams, MalformedResponse


@dataclass
class RecognizerConfig:
    backend: str = "mock"  # "mock" | "external"
    endpoint: str | None = None
    timeout_ms: int = 1500
    language_hint: str | None = None

    def __post_init__(self):
        if self.backend not in ("mock", "external"):
            raise InvalidParams(f"unknown recognizer backend: {self.backend}")
        if self.timeout_ms <= 0:
            raise InvalidParams("timeout_ms must be > 0")
        if self.backend == "external" and not self.endpoint:
            raise InvalidParams("external recognizer requires an endpoint")


def _segment(chunk: AudioChunk, text: str, confidence: float) -> TranscriptSegment:
    return TranscriptSegment(
        chunk_seq=chunk.seq,
        text=text,
        t0=chunk.start_time,
        t1=chunk.end_time,
        final=False,
        confidence=confidence,
    )


class MockRecognizer:
    """Pure function of the chunk: echoes oracle_text, silence otherwise."""

    def recognize_chunk(self, chunk: AudioChunk) -> TranscriptSegment:
        if chunk.oracle_text:
            return _segment(chunk, chunk.oracle_text, 1.0)
        return _segment(chunk, "", 1.0)


class ExternalRecognizer:
    """HTTP client for a model-serving endpoint.

    POST {endpoint}/recognize with {audio_b64, sample_rate, language_hint?}
    and expects {text, confidence} back. At-most-once per chunk: errors are
    surfaced as retryable stage failures, never retried here.
    """

    def __init__(self, config: RecognizerConfig, client: httpx.Client | None = None):
        if config.backend != "external":
            raise InvalidParams("ExternalRecognizer needs backend='external'")
        self.config = config
        self._client = client or httpx.Client(
            timeout=config.timeout_ms / 1000.0
        )

    def recognize_chunk(self, chunk: AudioChunk) -> TranscriptSegment:
        payload = {
            "audio_b64": base64.b64encode(chunk.samples or b"").decode("ascii"),
            "sample_rate": chunk.sample_rate,
        }
        if self.config.language_hint:
            payload["language_hint"] = self.config.language_hint
        try:
            resp = self._client.post(
                self.config.endpoint.rstrip("/") + "/recognize", json=payload
            )
        except httpx.TimeoutException as exc:
            raise BackendTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise BackendUnavailable(str(exc)) from exc
        if resp.status_code >= 500:
            raise BackendUnavailable(f"recognizer returned {resp.status_code}")
        if resp.status_code != 200:
            raise MalformedResponse(f"unexpected status {resp.status_code}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise MalformedResponse("response is not JSON") from exc
        if not isinstance(body, dict) or "text" not in body:
            raise MalformedResponse("response missing 'text'")
        text = body["text"]
        confidence = body.get("confidence", 1.0)
        if not isinstance(text, str) or not isinstance(confidence, (int, float)):
            raise MalformedResponse("bad field types in recognizer response")
        return _segment(chunk, text, min(max(float(confidence), 0.0), 1.0))


def make_recognizer(config: RecognizerConfig):
    if config.backend == "mock":
        return MockRecognizer()
    return ExternalRecognizer(config)
