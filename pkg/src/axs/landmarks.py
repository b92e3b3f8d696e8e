"""Offline sign-clip ingestion: parses per-video holistic landmark JSON,
normalises into torso-relative skeleton space, resamples to 30 fps, trims
rest-pose padding, and compiles the binary sign dictionary artifact."""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DegeneratePose,
    NoInputs,
    ParseError,
    TooShort,
    WrongLandmarkCount,
)
from .signgen import (
    FACE_LANDMARKS,
    FINGERSPELL_CHARS,
    FPS,
    HAND_LANDMARKS,
    POSE_LANDMARKS,
    Keyframe,
    SignClip,
    SignDictionary,
)

RAW_FACE_LANDMARKS = 468
LEFT_SHOULDER, RIGHT_SHOULDER = 11, 12
MIN_SHOULDER_DIST = 1e-6
DEFAULT_TRIM_THRESHOLD = 0.002

MAGIC = b"AXSD"
FORMAT_VERSION = 1

# 68-point subset of the 468-point face mesh (jaw, brows, nose, eyes, lips)
FACE_68_INDICES = (
    # jaw line (17)
    [162, 234, 93, 58, 172, 136, 149, 148, 152, 377, 378, 365, 397, 288, 323, 454, 389]
    # eyebrows (5 + 5)
    + [70, 63, 105, 66, 107]
    + [336, 296, 334, 293, 300]
    # nose (9)
    + [168, 197, 5, 4, 75, 97, 2, 326, 305]
    # eyes (6 + 6)
    + [33, 160, 158, 133, 153, 144]
    + [362, 385, 387, 263, 373, 380]
    # lips outer (12) + inner (8)
    + [61, 39, 37, 0, 267, 269, 291, 405, 314, 17, 84, 181]
    + [78, 82, 13, 312, 308, 317, 14, 87]
)
assert len(FACE_68_INDICES) == FACE_LANDMARKS


@dataclass
class RawLandmarkFrame:
    t: float
    pose: np.ndarray  # (33, 3); source visibility dropped after parse
    left_hand: np.ndarray | None  # (21, 3) or absent this frame
    right_hand: np.ndarray | None
    face: np.ndarray | None  # (468, 3) or absent


@dataclass
class NormalizedFrame:
    t: float
    pose: np.ndarray
    left_hand: np.ndarray
    right_hand: np.ndarray
    face: np.ndarray | None  # (68, 3)


def _landmark_array(raw, count: int, what: str, where: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: {what} is not a list")
    if len(raw) != count:
        raise WrongLandmarkCount(f"{where}: {what} has {len(raw)} landmarks, expected {count}")
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric {what} data") from exc
    if arr.ndim != 2 or arr.shape[1] not in (3, 4):
        raise ParseError(f"{where}: each {what} landmark needs 3 or 4 coordinates")
    return arr[:, :3]


def parse_landmark_file(path: str | Path) -> tuple[str, list[RawLandmarkFrame]]:
    """Parse one per-video extraction: {gloss, fps, frames: [...]}.

    Hands and face may be null per frame (occlusion); frame timing comes
    from an explicit per-frame "t" or falls back to index / fps.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict) or "gloss" not in doc:
        raise ParseError(f"{path}: missing 'gloss' field")
    gloss = str(doc["gloss"]).upper()
    fps = doc.get("fps", FPS)
    if not isinstance(fps, (int, float)) or fps <= 0:
        raise ParseError(f"{path}: bad fps {fps!r}")
    raw_frames = doc.get("frames")
    if not isinstance(raw_frames, list) or not raw_frames:
        raise ParseError(f"{path}: missing or empty 'frames'")
    frames: list[RawLandmarkFrame] = []
    last_t = None
    for i, rf in enumerate(raw_frames):
        where = f"{path} frame {i}"
        if not isinstance(rf, dict) or "pose" not in rf:
            raise ParseError(f"{where}: missing 'pose'")
        t = rf.get("t", i / fps)
        if not isinstance(t, (int, float)) or (last_t is not None and t < last_t):
            raise ParseError(f"{where}: timestamps must be non-decreasing")
        last_t = t
        pose = _landmark_array(rf["pose"], POSE_LANDMARKS, "pose", where)
        lh = rf.get("left_hand")
        rh = rf.get("right_hand")
        face = rf.get("face")
        frames.append(
            RawLandmarkFrame(
                t=float(t),
                pose=pose,
                left_hand=None if lh is None else _landmark_array(lh, HAND_LANDMARKS, "left_hand", where),
                right_hand=None if rh is None else _landmark_array(rh, HAND_LANDMARKS, "right_hand", where),
                face=None if face is None else _landmark_array(face, RAW_FACE_LANDMARKS, "face", where),
            )
        )
    return gloss, frames


def _hold_fill(series: list[np.ndarray | None]) -> list[np.ndarray]:
    """Forward-fill gaps; a leading gap takes the first observed value.
    A series with no observations at all becomes zeros (rest pose)."""
    first = next((s for s in series if s is not None), None)
    out: list[np.ndarray] = []
    last = first
    for s in series:
        if s is not None:
            last = s
        out.append(np.zeros((HAND_LANDMARKS, 3)) if last is None else last)
    return out


def normalize_frames(frames: list[RawLandmarkFrame]) -> list[NormalizedFrame]:
    """Translate to shoulder-midpoint origin and scale to unit shoulder width."""
    lh_fill = _hold_fill([f.left_hand for f in frames])
    rh_fill = _hold_fill([f.right_hand for f in frames])
    face_series: list[np.ndarray | None] = [f.face for f in frames]
    any_face = any(f is not None for f in face_series)
    if any_face:
        first = next(f for f in face_series if f is not None)
        filled, last = [], first
        for f in face_series:
            if f is not None:
                last = f
            filled.append(last)
        face_series = filled

    out: list[NormalizedFrame] = []
    for i, frame in enumerate(frames):
        left = frame.pose[LEFT_SHOULDER]
        right = frame.pose[RIGHT_SHOULDER]
        mid = (left + right) / 2.0
        scale = float(np.linalg.norm(left - right))
        if scale < MIN_SHOULDER_DIST:
            raise DegeneratePose(f"frame {i}: inter-shoulder distance {scale}")
        norm = lambda a: (a - mid) / scale
        face = None
        if any_face:
            face = norm(face_series[i][FACE_68_INDICES])
        out.append(
            NormalizedFrame(
                t=frame.t,
                pose=norm(frame.pose),
                left_hand=norm(lh_fill[i]),
                right_hand=norm(rh_fill[i]),
                face=face,
            )
        )
    return out


def _stack(frames: list[NormalizedFrame]) -> tuple[np.ndarray, bool]:
    has_face = frames[0].face is not None
    rows = []
    for f in frames:
        parts = [f.pose, f.left_hand, f.right_hand]
        if has_face:
            parts.append(f.face)
        rows.append(np.concatenate(parts, axis=0))
    return np.stack(rows), has_face


def _unstack(arr: np.ndarray, t: float, has_face: bool) -> NormalizedFrame:
    p = POSE_LANDMARKS
    h = HAND_LANDMARKS
    return NormalizedFrame(
        t=t,
        pose=arr[:p],
        left_hand=arr[p : p + h],
        right_hand=arr[p + h : p + 2 * h],
        face=arr[p + 2 * h :] if has_face else None,
    )


def resample_30fps(frames: list[NormalizedFrame]) -> list[NormalizedFrame]:
    """Linear-interpolate every landmark onto the uniform 30 fps grid.

    Grid times are relative to the first frame; input frames that land
    exactly on a grid point (the endpoints in particular) are copied, not
    re-interpolated.
    """
    # drop duplicate timestamps (keep the last)
    dedup: list[NormalizedFrame] = []
    for f in frames:
        if dedup and f.t == dedup[-1].t:
            dedup[-1] = f
        else:
            dedup.append(f)
    if len(dedup) < 2:
        raise TooShort("need >= 2 frames with distinct timestamps")
    t0 = dedup[0].t
    times = np.array([f.t - t0 for f in dedup])
    if np.any(np.diff(times) <= 0):
        raise TooShort("timestamps must be strictly increasing")
    span = float(times[-1])
    if span < 1.0 / FPS:
        raise TooShort(f"span {span:.4f}s is shorter than one frame interval")
    data, has_face = _stack(dedup)
    n_out = int(np.floor(span * FPS + 1e-9)) + 1
    out: list[NormalizedFrame] = []
    for k in range(n_out):
        t = k / FPS
        j = int(np.searchsorted(times, t, side="right")) - 1
        j = min(max(j, 0), len(times) - 2)
        if abs(times[j] - t) < 1e-12:
            row = data[j]
        elif abs(times[j + 1] - t) < 1e-12:
            row = data[j + 1]
        else:
            frac = (t - times[j]) / (times[j + 1] - times[j])
            row = (1 - frac) * data[j] + frac * data[j + 1]
        out.append(_unstack(row, t, has_face))
    return out


def trim_idle(
    frames: list[NormalizedFrame], motion_threshold: float = DEFAULT_TRIM_THRESHOLD
) -> list[NormalizedFrame]:
    """Drop leading/trailing rest-pose frames; never below 2 frames.

    A frame is idle when its mean per-landmark displacement from the
    adjacent interior frame is below the threshold.
    """
    if len(frames) <= 2:
        return frames
    data, has_face = _stack(frames)
    disp = np.linalg.norm(np.diff(data, axis=0), axis=2).mean(axis=1)  # (n-1,)
    lo, hi = 0, len(frames)
    while hi - lo > 2 and disp[lo] < motion_threshold:
        lo += 1
    while hi - lo > 2 and disp[hi - 2] < motion_threshold:
        hi -= 1
    trimmed = frames[lo:hi]
    # retime to start at 0 on the 30 fps grid
    return [
        NormalizedFrame(t=k / FPS, pose=f.pose, left_hand=f.left_hand, right_hand=f.right_hand, face=f.face)
        for k, f in enumerate(trimmed)
    ]


# ---------------------------------------------------------------------------
# binary dictionary artifact


def frames_to_array(frames: list[NormalizedFrame]) -> tuple[np.ndarray, bool]:
    data, has_face = _stack(frames)
    return data.astype("<f4"), has_face


def clip_from_array(gloss_id: str, data: np.ndarray, has_face: bool) -> SignClip:
    p, h = POSE_LANDMARKS, HAND_LANDMARKS
    keyframes = []
    for k, row in enumerate(data):
        keyframes.append(
            Keyframe(
                t=k / FPS,
                pose=row[:p],
                left_hand=row[p : p + h],
                right_hand=row[p + h : p + 2 * h],
                face=row[p + 2 * h :] if has_face else None,
            )
        )
    return SignClip(gloss_id=gloss_id, frames=keyframes)


@dataclass
class CompileReport:
    output_path: str = ""
    entries_written: int = 0
    duplicates: list[str] = field(default_factory=list)
    failures: list[tuple[str, str]] = field(default_factory=list)
    fingerspell_complete: bool = False
    vocabulary_note: str = ""


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    entry_count: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def write_dictionary(entries: dict[str, tuple[np.ndarray, bool]], path: str | Path) -> None:
    """Write the artifact: header, index, then packed float32 frame blobs."""
    path = Path(path)
    index = []
    blobs = []
    offset = 0
    for gloss_id in sorted(entries):
        data, has_face = entries[gloss_id]
        blob = np.ascontiguousarray(data.astype("<f4")).tobytes()
        index.append((gloss_id, data.shape[0], has_face, offset, len(blob), zlib.crc32(blob)))
        blobs.append(blob)
        offset += len(blob)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, FPS, len(index)))
        for gloss_id, n_frames, has_face, off, length, crc in index:
            name = gloss_id.encode("utf-8")
            fh.write(struct.pack("<H", len(name)))
            fh.write(name)
            fh.write(struct.pack("<IBQII", n_frames, int(has_face), off, length, crc))
        for blob in blobs:
            fh.write(blob)


def _read_index(fh) -> list[tuple[str, int, bool, int, int, int]]:
    magic = fh.read(4)
    if magic != MAGIC:
        raise ParseError(f"bad magic {magic!r}")
    version, fps, count = struct.unpack("<III", fh.read(12))
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version}")
    if fps != FPS:
        raise ParseError(f"artifact fps {fps}, expected {FPS}")
    index = []
    for _ in range(count):
        (name_len,) = struct.unpack("<H", fh.read(2))
        gloss_id = fh.read(name_len).decode("utf-8")
        n_frames, has_face, off, length, crc = struct.unpack("<IBQII", fh.read(21))
        index.append((gloss_id, n_frames, bool(has_face), off, length, crc))
    return index


def read_dictionary_arrays(path: str | Path) -> dict[str, tuple[np.ndarray, bool]]:
    path = Path(path)
    with open(path, "rb") as fh:
        index = _read_index(fh)
        payload_start = fh.tell()
        entries: dict[str, tuple[np.ndarray, bool]] = {}
        for gloss_id, n_frames, has_face, off, length, crc in index:
            fh.seek(payload_start + off)
            blob = fh.read(length)
            if len(blob) != length or zlib.crc32(blob) != crc:
                raise ParseError(f"entry {gloss_id}: checksum mismatch (corrupt artifact)")
            landmarks = length // (12 * n_frames)
            data = np.frombuffer(blob, dtype="<f4").reshape(n_frames, landmarks, 3)
            entries[gloss_id] = (data, has_face)
    return entries


def load_dictionary(path: str | Path) -> SignDictionary:
    arrays = read_dictionary_arrays(path)
    blob_crc = zlib.crc32(Path(path).read_bytes())
    return SignDictionary(
        entries={g: clip_from_array(g, data, has_face) for g, (data, has_face) in arrays.items()},
        version=f"v{FORMAT_VERSION}-{blob_crc:08x}",
    )


def compile_dictionary(
    input_dir: str | Path,
    output_path: str | Path,
    strict: bool = False,
    trim_threshold: float = DEFAULT_TRIM_THRESHOLD,
) -> CompileReport:
    input_dir = Path(input_dir)
    files = sorted(input_dir.glob("*.json"))
    if not files:
        raise NoInputs(f"no landmark JSON files under {input_dir}")
    report = CompileReport(output_path=str(output_path))
    entries: dict[str, tuple[np.ndarray, bool]] = {}
    for path in files:
        try:
            gloss_id, raw = parse_landmark_file(path)
            frames = trim_idle(resample_30fps(normalize_frames(raw)), trim_threshold)
            if gloss_id in entries:
                report.duplicates.append(gloss_id)  # later file wins
            entries[gloss_id] = frames_to_array(frames)
        except Exception as exc:  # per-file isolation; compile continues
            report.failures.append((str(path), str(exc)))
    if not entries:
        raise NoInputs("every input file failed to compile")
    report.entries_written = len(entries)
    report.fingerspell_complete = all(f"FS_{c}" in entries for c in FINGERSPELL_CHARS)
    report.vocabulary_note = f"{len(entries)} entries compiled"
    if not report.fingerspell_complete:
        missing = [c for c in FINGERSPELL_CHARS if f"FS_{c}" not in entries]
        msg = f"INCOMPLETE_FINGERSPELL_SET: missing {''.join(missing)}"
        if strict:
            raise ParseError(msg, code="INCOMPLETE_FINGERSPELL_SET")
        report.vocabulary_note += f"; {msg}"
    write_dictionary(entries, output_path)
    return report


def validate_dictionary(path: str | Path) -> ValidationReport:
    report = ValidationReport()
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            index = _read_index(fh)
            payload_start = fh.tell()
            report.entry_count = len(index)
            for gloss_id, n_frames, has_face, off, length, crc in index:
                fh.seek(payload_start + off)
                blob = fh.read(length)
                if len(blob) != length:
                    report.violations.append(f"{gloss_id}: truncated payload")
                    continue
                if zlib.crc32(blob) != crc:
                    report.violations.append(f"{gloss_id}: checksum mismatch")
                    continue
                if n_frames < 2:
                    report.violations.append(f"{gloss_id}: fewer than 2 frames")
                expected = 12 * n_frames * (
                    POSE_LANDMARKS + 2 * HAND_LANDMARKS + (FACE_LANDMARKS if has_face else 0)
                )
                if length != expected:
                    report.violations.append(
                        f"{gloss_id}: payload length {length}, expected {expected}"
                    )
            present = {entry[0] for entry in index}
            missing = [c for c in FINGERSPELL_CHARS if f"FS_{c}" not in present]
            if missing:
                report.violations.append(f"fingerspell set incomplete: missing {''.join(missing)}")
    except ParseError as exc:
        report.violations.append(str(exc))
    return report


def export_json(path: str | Path) -> dict:
    """Human-inspectable dump of a compiled artifact."""
    arrays = read_dictionary_arrays(path)
    return {
        "format_version": FORMAT_VERSION,
        "fps": FPS,
        "entries": {
            gloss: {
                "frame_count": int(data.shape[0]),
                "has_face": has_face,
                "duration_s": (data.shape[0] - 1) / FPS,
                "frames": data.tolist(),
            }
            for gloss, (data, has_face) in arrays.items()
        },
    }
