"""Lexicon-based emotion tagging for finalised utterances.

Deterministic stand-in for a fine-tuned classifier: per-word weight
vectors over six affect classes, a short-range negation rule, argmax with
ties resolved to neutral. An external HTTP adapter mirrors the translator
backend shape for model-parity experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import InvalidParams, ParseError

CLASSES = ("joy", "sadness", "anger", "fear", "surprise", "neutral")
NEGATORS = {"not", "no", "never"}
NEGATION_WINDOW = 2

EMOJI = {
    "joy": "\U0001F600",
    "sadness": "\U0001F622",
    "anger": "\U0001F620",
    "fear": "\U0001F628",
    "surprise": "\U0001F632",
    "neutral": "\U0001F610",
}


@dataclass
class EmotionLabel:
    label: str
    confidence: float
    utterance_id: str = ""

    def __post_init__(self):
        if self.label not in CLASSES:
            raise InvalidParams(f"unknown emotion class: {self.label}")


@dataclass
class EmotionLexicon:
    entries: dict[str, dict[str, float]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)


def load_lexicon(path: str | Path) -> EmotionLexicon:
    """Parse lines of 'word class:weight[,class:weight...]'; '#' comments."""
    entries: dict[str, dict[str, float]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'word class:weight,...'")
        word, spec = parts
        weights: dict[str, float] = {}
        for item in spec.split(","):
            if ":" not in item:
                raise ParseError(f"{path}:{lineno}: bad weight '{item}'")
            cls, _, val = item.partition(":")
            cls = cls.strip()
            if cls not in CLASSES:
                raise ParseError(f"{path}:{lineno}: unknown class '{cls}'")
            try:
                weight = float(val)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad weight '{val}'") from None
            if weight < 0:
                raise ParseError(f"{path}:{lineno}: negative weight")
            weights[cls] = weight
        if not any(w > 0 for w in weights.values()):
            raise ParseError(f"{path}:{lineno}: entry needs a positive weight")
        entries[word.lower()] = weights
    return EmotionLexicon(entries)


def bundled_lexicon() -> EmotionLexicon:
    with resources.as_file(resources.files("axs.data") / "emotion_lexicon.txt") as p:
        return load_lexicon(p)


def _core(token: str) -> str:
    return token.strip(".,!?;:'\"()[]").lower()


def classify_text(text: str, lexicon: EmotionLexicon) -> tuple[str, float]:
    """Score a raw string; returns (class, confidence).

    A negator within the two preceding tokens zeroes that token's
    contribution. Ties and all-zero totals resolve to neutral.
    """
    tokens = [_core(t) for t in text.split()]
    scores = {cls: 0.0 for cls in CLASSES}
    for i, tok in enumerate(tokens):
        weights = lexicon.entries.get(tok)
        if not weights:
            continue
        window = tokens[max(0, i - NEGATION_WINDOW) : i]
        if any(t in NEGATORS for t in window):
            continue
        for cls, w in weights.items():
            scores[cls] += w
    total = sum(scores.values())
    if total <= 0:
        return "neutral", 0.0
    best = max(scores.values())
    winners = [cls for cls in CLASSES if scores[cls] == best]
    if len(winners) > 1:
        return "neutral", best / total
    return winners[0], best / total


def classify_emotion(utterance, lexicon: EmotionLexicon) -> EmotionLabel:
    label, confidence = classify_text(utterance.text, lexicon)
    return EmotionLabel(label=label, confidence=confidence, utterance_id=utterance.utterance_id)


def emoji_for(label: EmotionLabel | str) -> str:
    name = label.label if isinstance(label, EmotionLabel) else label
    return EMOJI[name]
