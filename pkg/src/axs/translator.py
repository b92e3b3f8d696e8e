"""Translation stage: language-pair registry with a deterministic
dictionary baseline and an optional external HTTP backend."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .chunker import Utterance
from .errors import (
    BackendTimeout,
    BackendUnavailable,
    InvalidPair,
    MalformedResponse,
    MissingLexicon,
    PairNotRegistered,
    ParseError,
)

BASELINE = "baseline"
EXTERNAL = "external"


@dataclass(frozen=True)
class LangPair:
    source: str
    target: str
    backend: str = BASELINE

    def __post_init__(self):
        if self.source == self.target:
            raise InvalidPair(f"source and target must differ: {self.source}")


@dataclass
class Translation:
    utterance_id: str
    source_text: str
    target_text: str
    pair: LangPair
    latency_ms: int = 0


def load_lexicon(path: str | Path) -> dict[str, str]:
    """Parse a bilingual lexicon: one 'source<TAB>target' per line, '#' comments."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise ParseError(f"{path}:{lineno}: expected 'source<TAB>target'")
        entries[parts[0].lower()] = parts[1]
    return entries


def _split_punct(token: str) -> tuple[str, str, str]:
    """Split a token into (leading punct, core, trailing punct)."""
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[:start], token[start:end], token[end:]


def _match_case(original: str, replacement: str) -> str:
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def baseline_translate(text: str, lexicon: dict[str, str]) -> str:
    """Word-for-word substitution; unknown tokens pass through unchanged."""
    out = []
    for token in text.split():
        lead, core, trail = _split_punct(token)
        hit = lexicon.get(core.lower())
        if hit is not None and core:
            out.append(lead + _match_case(core, hit) + trail)
        else:
            out.append(token)
    return " ".join(out)


class TranslatorRegistry:
    """Read-mostly registry of language pairs.

    Registration happens at startup; translate calls read a stable
    snapshot and are safe to run concurrently.
    """

    def __init__(self, http_client: httpx.Client | None = None, timeout_ms: int = 2000):
        self._pairs: dict[tuple[str, str], LangPair] = {}
        self._lexicons: dict[tuple[str, str], dict[str, str]] = {}
        self._endpoints: dict[tuple[str, str], str] = {}
        self._client = http_client
        self._timeout_s = timeout_ms / 1000.0

    def register_language_pair(
        self,
        pair: LangPair,
        lexicon_path: str | Path | None = None,
        endpoint: str | None = None,
    ) -> None:
        key = (pair.source, pair.target)
        if pair.backend == BASELINE:
            if lexicon_path is None:
                raise MissingLexicon(f"baseline pair {pair.source}->{pair.target} needs a lexicon")
            self._lexicons[key] = load_lexicon(lexicon_path)
        elif endpoint:
            self._endpoints[key] = endpoint
        self._pairs[key] = pair

    def registered(self, source: str, target: str) -> bool:
        return (source, target) in self._pairs

    @property
    def pairs(self) -> list[LangPair]:
        return list(self._pairs.values())

    def lexicon(self, source: str, target: str) -> dict[str, str]:
        return self._lexicons.get((source, target), {})

    def translate_text(self, text: str, source: str, target: str) -> str:
        key = (source, target)
        pair = self._pairs.get(key)
        if pair is None:
            raise PairNotRegistered(f"{source}->{target} not registered")
        if pair.backend == BASELINE:
            return baseline_translate(text, self._lexicons[key])
        return self._external_translate(text, source, target)

    def translate(self, utterance: Utterance, target: str) -> Translation:
        t0 = time.monotonic()
        target_text = self.translate_text(utterance.text, utterance.language, target)
        latency_ms = int((time.monotonic() - t0) * 1000)
        return Translation(
            utterance_id=utterance.utterance_id,
            source_text=utterance.text,
            target_text=target_text,
            pair=self._pairs[(utterance.language, target)],
            latency_ms=latency_ms,
        )

    def _external_translate(self, text: str, source: str, target: str) -> str:
        endpoint = self._endpoints.get((source, target))
        if endpoint is None:
            raise PairNotRegistered(f"external pair {source}->{target} has no endpoint")
        client = self._client or httpx.Client(timeout=self._timeout_s)
        try:
            resp = client.post(
                endpoint.rstrip("/") + "/translate",
                json={"text": text, "source": source, "target": target},
            )
        except httpx.TimeoutException as exc:
            raise BackendTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise BackendUnavailable(str(exc)) from exc
        finally:
            if self._client is None:
                client.close()
        if resp.status_code >= 500:
            raise BackendUnavailable(f"translator returned {resp.status_code}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise MalformedResponse("response is not JSON") from exc
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            raise MalformedResponse("response missing 'text'")
        return body["text"]
