"""Text-to-sign synthesis: gloss segmentation, clip lookup with
fingerspelling fallback, and 30 fps animation assembly with linear
inter-sign transitions and playback speed control."""

from __future__ import annotations

import string
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySequence, InvalidParams, MissingSign
from .ids import new_id

FPS = 30
POSE_LANDMARKS = 33
HAND_LANDMARKS = 21
FACE_LANDMARKS = 68
TRANSITION_FRAMES = 5
SPEED_MIN, SPEED_MAX = 0.25, 2.0

DEFAULT_STOPWORDS = frozenset({"a", "an", "the"})
FINGERSPELL_CHARS = string.ascii_uppercase + string.digits

DICTIONARY = "dictionary"
FINGERSPELL = "fingerspell"


@dataclass
class Keyframe:
    t: float
    pose: np.ndarray  # (33, 3)
    left_hand: np.ndarray  # (21, 3)
    right_hand: np.ndarray  # (21, 3)
    face: np.ndarray | None = None  # (68, 3)

    def __post_init__(self):
        if self.t < 0:
            raise InvalidParams(f"keyframe t must be >= 0, got {self.t}")
        for name, arr, count in (
            ("pose", self.pose, POSE_LANDMARKS),
            ("left_hand", self.left_hand, HAND_LANDMARKS),
            ("right_hand", self.right_hand, HAND_LANDMARKS),
        ):
            if arr.shape != (count, 3):
                raise InvalidParams(f"{name} must be ({count}, 3), got {arr.shape}")
        if self.face is not None and self.face.shape != (FACE_LANDMARKS, 3):
            raise InvalidParams(f"face must be ({FACE_LANDMARKS}, 3), got {self.face.shape}")

    def flat(self) -> np.ndarray:
        """All landmarks stacked; face omitted when absent."""
        parts = [self.pose, self.left_hand, self.right_hand]
        if self.face is not None:
            parts.append(self.face)
        return np.concatenate(parts, axis=0)


@dataclass
class SignClip:
    gloss_id: str
    frames: list[Keyframe]
    fps: int = FPS

    def __post_init__(self):
        if len(self.frames) < 2:
            raise InvalidParams(f"clip {self.gloss_id} needs >= 2 frames")
        for k, frame in enumerate(self.frames):
            if abs(frame.t - k / self.fps) > 1e-9:
                raise InvalidParams(
                    f"clip {self.gloss_id}: frame {k} at t={frame.t}, expected {k / self.fps}"
                )

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        return (len(self.frames) - 1) / self.fps


@dataclass
class Gloss:
    gloss_id: str
    kind: str  # dictionary | fingerspell
    source_span: tuple[int, int]  # token index range [start, end)
    dict_version: str = ""


@dataclass
class SignDictionary:
    entries: dict[str, SignClip]
    version: str = ""
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    # multiword gloss keys ("ACTION_ITEM") indexed as token tuples
    _multiword: list[tuple[str, ...]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self.version:
            self.version = new_id("dict-")
        self._multiword = sorted(
            (tuple(g.lower().split("_")) for g in self.entries if "_" in g and not g.startswith("FS_")),
            key=len,
            reverse=True,
        )

    @property
    def fingerspell_complete(self) -> bool:
        return all(f"FS_{c}" in self.entries for c in FINGERSPELL_CHARS)

    def __len__(self) -> int:
        return len(self.entries)


def _clean(token: str) -> str:
    return token.strip(string.punctuation + "’“”").lower()


def _single_match(token: str, dictionary: SignDictionary) -> str | None:
    gloss = token.upper()
    if gloss in dictionary.entries:
        return gloss
    if token.endswith("s") and len(token) > 1 and token[:-1].upper() in dictionary.entries:
        return token[:-1].upper()
    return None


def tokenize_to_glosses(text: str, dictionary: SignDictionary) -> list[Gloss]:
    """Segment text into glosses: greedy longest multiword match, then
    single-token match with plural stripping, else fingerspelling."""
    tokens = [t for t in (_clean(tok) for tok in text.split()) if t]
    tokens = [t for t in tokens if t not in dictionary.stopwords]
    glosses: list[Gloss] = []
    i = 0
    while i < len(tokens):
        matched = False
        for key in dictionary._multiword:
            n = len(key)
            if tuple(tokens[i : i + n]) == key:
                glosses.append(
                    Gloss("_".join(key).upper(), DICTIONARY, (i, i + n), dictionary.version)
                )
                i += n
                matched = True
                break
        if matched:
            continue
        single = _single_match(tokens[i], dictionary)
        if single is not None:
            glosses.append(Gloss(single, DICTIONARY, (i, i + 1), dictionary.version))
        else:
            for ch in tokens[i].upper():
                if ch in FINGERSPELL_CHARS:
                    glosses.append(Gloss(f"FS_{ch}", FINGERSPELL, (i, i + 1), dictionary.version))
        i += 1
    return glosses


def lookup_sign(gloss: Gloss, dictionary: SignDictionary) -> SignClip:
    if gloss.dict_version and gloss.dict_version != dictionary.version:
        raise MissingSign(f"gloss {gloss.gloss_id} from dictionary version {gloss.dict_version}")
    clip = dictionary.entries.get(gloss.gloss_id)
    if clip is None:
        raise MissingSign(f"no clip for gloss {gloss.gloss_id}")
    return clip


def _lerp_frame(a: Keyframe, b: Keyframe, frac: float, t: float) -> Keyframe:
    face = None
    if a.face is not None and b.face is not None:
        face = (1 - frac) * a.face + frac * b.face
    return Keyframe(
        t=t,
        pose=(1 - frac) * a.pose + frac * b.pose,
        left_hand=(1 - frac) * a.left_hand + frac * b.left_hand,
        right_hand=(1 - frac) * a.right_hand + frac * b.right_hand,
        face=face,
    )


@dataclass
class AnimationSequence:
    sequence_id: str
    clips: list[SignClip]
    speed: float
    frames: list[Keyframe]
    total_duration: float
    utterance_id: str = ""
    gloss_ids: list[str] = field(default_factory=list)


def total_frame_count(clips: list[SignClip], transition: int = TRANSITION_FRAMES) -> int:
    return sum(c.frame_count for c in clips) + transition * (len(clips) - 1)


def assemble_animation(
    glosses: list[Gloss],
    dictionary: SignDictionary,
    speed: float = 1.0,
    utterance_id: str = "",
    transition_frames: int = TRANSITION_FRAMES,
) -> AnimationSequence:
    """Concatenate looked-up clips with linear transitions and retime.

    Speed s scales playback: frame j sits at j / (30 * s), so duration is
    (total_frames - 1) / (30 * s).
    """
    if not SPEED_MIN <= speed <= SPEED_MAX:
        raise InvalidParams(f"speed must be in [{SPEED_MIN}, {SPEED_MAX}], got {speed}")
    if not glosses:
        raise EmptySequence("no glosses to animate")
    clips = [lookup_sign(g, dictionary) for g in glosses]
    dt = 1.0 / (FPS * speed)
    frames: list[Keyframe] = []
    j = 0
    for ci, clip in enumerate(clips):
        if ci > 0:
            prev_last = clips[ci - 1].frames[-1]
            first = clip.frames[0]
            for k in range(1, transition_frames + 1):
                frac = k / (transition_frames + 1)
                frames.append(_lerp_frame(prev_last, first, frac, j * dt))
                j += 1
        for frame in clip.frames:
            frames.append(
                Keyframe(
                    t=j * dt,
                    pose=frame.pose,
                    left_hand=frame.left_hand,
                    right_hand=frame.right_hand,
                    face=frame.face,
                )
            )
            j += 1
    return AnimationSequence(
        sequence_id=new_id("seq-"),
        clips=clips,
        speed=speed,
        frames=frames,
        total_duration=(len(frames) - 1) / (FPS * speed),
        utterance_id=utterance_id,
        gloss_ids=[g.gloss_id for g in glosses],
    )


def retime(sequence: AnimationSequence, speed: float) -> AnimationSequence:
    """Same frames, new playback speed (replay / per-participant delivery)."""
    if not SPEED_MIN <= speed <= SPEED_MAX:
        raise InvalidParams(f"speed must be in [{SPEED_MIN}, {SPEED_MAX}], got {speed}")
    dt = 1.0 / (FPS * speed)
    frames = [
        Keyframe(t=j * dt, pose=f.pose, left_hand=f.left_hand, right_hand=f.right_hand, face=f.face)
        for j, f in enumerate(sequence.frames)
    ]
    return AnimationSequence(
        sequence_id=sequence.sequence_id,
        clips=sequence.clips,
        speed=speed,
        frames=frames,
        total_duration=(len(frames) - 1) / (FPS * speed),
        utterance_id=sequence.utterance_id,
        gloss_ids=list(sequence.gloss_ids),
    )
