import { describe, expect, it, vi } from "vitest";

import { AvatarPlayer, SignFrame, SignSequence, isValidFrame } from "../src/avatar.js";

function frame(t: number, value: number): SignFrame {
  const point = [value, value, value];
  return {
    t,
    pose: Array.from({ length: 33 }, () => [...point]),
    left_hand: Array.from({ length: 21 }, () => [...point]),
    right_hand: Array.from({ length: 21 }, () => [...point]),
  };
}

function sequence(nFrames: number, speed = 1.0): SignSequence {
  const fps = 30;
  return {
    sequence_id: "seq-1",
    utterance_id: "u1",
    gloss_ids: ["HELLO"],
    speed,
    frame_count: nFrames,
    fps,
    total_duration: (nFrames - 1) / (fps * speed),
    dictionary_version: "v-test",
    frames: Array.from({ length: nFrames }, (_, k) => frame(k / (fps * speed), k)),
  };
}

describe("AvatarPlayer", () => {
  it("keeps the playhead within [0, total_duration]", () => {
    const player = new AvatarPlayer();
    const seq = sequence(10);
    player.play(seq, 1000);
    player.tick(500); // clock skew before start
    expect(player.playhead).toBe(0);
    player.tick(1000 + seq.total_duration * 1000 + 500);
    expect(player.playhead).toBe(seq.total_duration);
    expect(player.playing).toBe(false);
  });

  it("returns the frame due at the playhead", () => {
    const player = new AvatarPlayer();
    player.play(sequence(10), 0);
    expect(player.tick(0)?.pose[0][0]).toBe(0);
    expect(player.tick(100)?.pose[0][0]).toBe(3); // 0.1 s * 30 fps
    expect(player.tick(10_000)?.pose[0][0]).toBe(9); // clamped to the last frame
  });

  it("skips malformed frames with a warning and keeps playing", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const player = new AvatarPlayer();
    const seq = sequence(4);
    (seq.frames![1] as unknown as { pose: unknown }).pose = "broken";
    player.play(seq, 0);
    expect(player.tick(1000 / 30)).toBeNull();
    expect(warn).toHaveBeenCalledOnce();
    expect(player.playing).toBe(true);
    expect(player.tick(2000 / 30)?.pose[0][0]).toBe(2);
    warn.mockRestore();
  });

  it("advances the playhead for reference-mode sequences without frames", () => {
    const player = new AvatarPlayer();
    const seq = { ...sequence(10), frames: undefined };
    player.play(seq, 0);
    expect(player.tick(100)).toBeNull();
    expect(player.playhead).toBeCloseTo(0.1);
  });

  it("validates frame shape", () => {
    expect(isValidFrame(frame(0, 1))).toBe(true);
    expect(isValidFrame({ t: 0, pose: [[1, 2]], left_hand: [], right_hand: [] })).toBe(false);
    expect(isValidFrame(null)).toBe(false);
  });
});
