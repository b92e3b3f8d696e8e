/** Signing-avatar playback: advances a playhead against the wall clock
 * through the frames of the current sign_sequence. Rendering is left to
 * the caller (see render2d.ts); this model only picks the frame due now.
 * Malformed frames are skipped with a console warning and playback
 * continues. */

export interface SignFrame {
  t: number;
  pose: number[][];
  left_hand: number[][];
  right_hand: number[][];
  face?: number[][];
}

export interface SignSequence {
  sequence_id: string;
  utterance_id: string;
  gloss_ids: string[];
  speed: number;
  frame_count: number;
  fps: number;
  total_duration: number;
  dictionary_version: string;
  frames?: SignFrame[];
}

function isPointList(value: unknown): value is number[][] {
  return (
    Array.isArray(value) &&
    value.length > 0 &&
    value.every(
      (p) => Array.isArray(p) && p.length === 3 && p.every((v) => typeof v === "number" && Number.isFinite(v)),
    )
  );
}

export function isValidFrame(frame: unknown): frame is SignFrame {
  if (typeof frame !== "object" || frame === null) return false;
  const f = frame as Record<string, unknown>;
  return (
    typeof f.t === "number" &&
    isPointList(f.pose) &&
    isPointList(f.left_hand) &&
    isPointList(f.right_hand)
  );
}

export class AvatarPlayer {
  current: SignSequence | null = null;
  playing = false;
  playhead = 0;
  /** Wall-clock ms when the current sequence finished, for duration checks. */
  finishedAtMs: number | null = null;
  private startedAtMs = 0;

  play(sequence: SignSequence, nowMs: number): void {
    this.current = sequence;
    this.playing = true;
    this.playhead = 0;
    this.startedAtMs = nowMs;
    this.finishedAtMs = null;
  }

  get startMs(): number {
    return this.startedAtMs;
  }

  /** Advance the playhead; returns the frame due at nowMs, or null when
   * idle or the due frame is malformed. */
  tick(nowMs: number): SignFrame | null {
    const seq = this.current;
    if (!seq || !this.playing) return null;
    const elapsed = (nowMs - this.startedAtMs) / 1000;
    this.playhead = Math.min(Math.max(elapsed, 0), seq.total_duration);
    if (elapsed >= seq.total_duration) {
      this.playing = false;
      this.finishedAtMs = this.startedAtMs + seq.total_duration * 1000;
    }
    const frames = seq.frames;
    if (!frames || frames.length === 0) return null; // reference-mode sequence
    const index = Math.min(
      Math.floor(this.playhead * seq.fps * seq.speed + 1e-9),
      frames.length - 1,
    );
    const frame = frames[index];
    if (!isValidFrame(frame)) {
      console.warn(`skipping malformed frame ${index} of sequence ${seq.sequence_id}`);
      return null;
    }
    return frame;
  }
}
