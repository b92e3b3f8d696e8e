"""Deterministic synthetic sign clips.

No ISL motion-capture corpus can ship with this repo, so demo and test
dictionaries are generated: seeded smooth sinusoidal motion around a
plausible upper-body rest pose, one clip per gloss plus the full
fingerspell alphabet. Same seed, same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .landmarks import RAW_FACE_LANDMARKS, compile_dictionary
from .signgen import FINGERSPELL_CHARS, HAND_LANDMARKS, POSE_LANDMARKS

DEFAULT_DEMO_GLOSSES = [
    "HELLO", "THANK_YOU", "MEETING", "TEAM", "REVIEW", "ACTION_ITEM",
    "PROJECT", "BUDGET", "DECISION", "QUESTION", "GOOD", "MORNING",
    "EVERYONE", "WELCOME", "START", "FINISH", "AGREE", "PLAN", "REPORT",
    "SUMMARY", "TRANSLATE", "SIGN", "LANGUAGE", "HELP", "YES", "NO_SIGN",
    "TIME", "TODAY", "TOMORROW", "WEEK",
]


def _rest_pose(rng: np.random.Generator) -> np.ndarray:
    pose = rng.uniform(0.2, 0.8, size=(POSE_LANDMARKS, 3))
    pose[:, 2] = rng.uniform(-0.1, 0.1, size=POSE_LANDMARKS)
    # shoulders a believable width apart so normalisation is well-posed
    pose[11] = [0.62, 0.45, 0.0]
    pose[12] = [0.38, 0.45, 0.0]
    return pose


def synth_landmark_doc(
    gloss: str,
    seed: int,
    n_frames: int = 24,
    fps: float = 30.0,
    with_face: bool = False,
    lead_in: int = 0,
) -> dict:
    """One landmark-extraction JSON document with smooth synthetic motion."""
    rng = np.random.default_rng(seed)
    pose0 = _rest_pose(rng)
    lh0 = rng.uniform(0.3, 0.7, size=(HAND_LANDMARKS, 3))
    rh0 = rng.uniform(0.3, 0.7, size=(HAND_LANDMARKS, 3))
    face0 = rng.uniform(0.4, 0.6, size=(RAW_FACE_LANDMARKS, 3)) if with_face else None
    amp = rng.uniform(0.01, 0.05)
    phase = rng.uniform(0, 2 * np.pi)
    frames = []
    for i in range(lead_in):
        frames.append(
            {
                "pose": pose0.tolist(),
                "left_hand": lh0.tolist(),
                "right_hand": rh0.tolist(),
                "face": face0.tolist() if face0 is not None else None,
            }
        )
    for i in range(n_frames):
        theta = 2 * np.pi * i / n_frames + phase
        wob = amp * np.sin(theta)
        frames.append(
            {
                "pose": (pose0 + wob).tolist(),
                "left_hand": (lh0 + 2 * wob).tolist(),
                "right_hand": (rh0 - 2 * wob).tolist(),
                "face": (face0 + 0.5 * wob).tolist() if face0 is not None else None,
            }
        )
    return {"gloss": gloss, "fps": fps, "frames": frames}


def write_synthetic_corpus(
    out_dir: str | Path,
    glosses: list[str] | None = None,
    seed: int = 7,
    fingerspell: bool = True,
    n_frames: int = 24,
) -> list[Path]:
    """Write one landmark JSON per gloss (plus FS_A..FS_9 when requested)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = list(glosses if glosses is not None else DEFAULT_DEMO_GLOSSES)
    if fingerspell:
        names += [f"FS_{c}" for c in FINGERSPELL_CHARS]
    written = []
    for i, gloss in enumerate(names):
        doc = synth_landmark_doc(gloss, seed=seed * 100003 + i, n_frames=n_frames)
        path = out_dir / f"{gloss.lower()}.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        written.append(path)
    return written


def build_demo_dictionary(
    output_path: str | Path,
    glosses: list[str] | None = None,
    seed: int = 7,
    tmp_dir: str | Path | None = None,
):
    """Generate a corpus and compile it straight to an artifact."""
    import tempfile

    if tmp_dir is not None:
        write_synthetic_corpus(tmp_dir, glosses, seed)
        return compile_dictionary(tmp_dir, output_path)
    with tempfile.TemporaryDirectory() as td:
        write_synthetic_corpus(td, glosses, seed)
        return compile_dictionary(td, output_path)
