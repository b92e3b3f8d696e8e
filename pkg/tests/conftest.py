"""Shared fixtures: synthetic sign dictionaries and small lexicons."""

import numpy as np
import pytest

from axs.landmarks import compile_dictionary, load_dictionary
from axs.signgen import (
    FACE_LANDMARKS,
    HAND_LANDMARKS,
    POSE_LANDMARKS,
    Keyframe,
    SignClip,
    SignDictionary,
)
from axs.synth import write_synthetic_corpus

# 50-entry vocabulary for the sign-pipeline oracle suite
TEST_GLOSSES = [
    "HELLO", "THANK_YOU", "MEETING", "TEAM", "REVIEW", "ACTION_ITEM",
    "PROJECT", "BUDGET", "DECISION", "QUESTION", "GOOD", "MORNING",
    "EVERYONE", "WELCOME", "START", "FINISH", "AGREE", "PLAN", "REPORT",
    "SUMMARY", "TRANSLATE", "SIGN", "LANGUAGE", "HELP", "YES", "TIME",
    "TODAY", "TOMORROW", "WEEK", "WORK", "DONE", "READY", "NEXT", "ITEM",
    "TALK", "LISTEN", "SHOW", "IDEA", "CHANGE", "PEOPLE", "DAY", "YEAR",
    "NEW", "OLD", "BIG", "SMALL", "FAST", "SLOW", "OPEN", "CLOSE",
]
assert len(TEST_GLOSSES) == 50


def make_keyframe(t: float, value: float, with_face: bool = False) -> Keyframe:
    return Keyframe(
        t=t,
        pose=np.full((POSE_LANDMARKS, 3), value),
        left_hand=np.full((HAND_LANDMARKS, 3), value + 1.0),
        right_hand=np.full((HAND_LANDMARKS, 3), value + 2.0),
        face=np.full((FACE_LANDMARKS, 3), value + 3.0) if with_face else None,
    )


def make_clip(gloss_id: str, n_frames: int = 4, base: float = 0.0) -> SignClip:
    frames = [make_keyframe(k / 30, base + k * 0.01) for k in range(n_frames)]
    return SignClip(gloss_id=gloss_id, frames=frames)


@pytest.fixture(scope="session")
def test_dictionary() -> SignDictionary:
    """In-memory 50-sign dictionary plus a complete fingerspell alphabet."""
    entries = {}
    for i, gloss in enumerate(TEST_GLOSSES):
        entries[gloss] = make_clip(gloss, n_frames=3 + (i % 5), base=i * 0.1)
    from axs.signgen import FINGERSPELL_CHARS

    for j, ch in enumerate(FINGERSPELL_CHARS):
        entries[f"FS_{ch}"] = make_clip(f"FS_{ch}", n_frames=2 + (j % 3), base=5 + j * 0.05)
    return SignDictionary(entries=entries, version="test-dict-1")


@pytest.fixture(scope="session")
def compiled_corpus(tmp_path_factory):
    """Synthetic 36+50-entry corpus compiled to a binary artifact."""
    src = tmp_path_factory.mktemp("landmark-src")
    out = tmp_path_factory.mktemp("artifact") / "signs.dict"
    write_synthetic_corpus(src, glosses=TEST_GLOSSES, seed=11)
    report = compile_dictionary(src, out)
    return src, out, report


@pytest.fixture(scope="session")
def compiled_dictionary(compiled_corpus) -> SignDictionary:
    _, out, _ = compiled_corpus
    return load_dictionary(out)
