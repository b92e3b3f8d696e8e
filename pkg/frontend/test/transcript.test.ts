import { describe, expect, it } from "vitest";

import { ORPHAN_TTL_MS, TranscriptView } from "../src/transcript.js";

const line = (id: string, text = "Hello team.") => ({
  final: true,
  text,
  speaker_id: "alice",
  utterance_id: id,
  language: "en",
});

describe("TranscriptView", () => {
  it("appends final lines in order and ignores partials", () => {
    const view = new TranscriptView();
    view.onTranscript(line("u1", "First."), 0);
    view.onTranscript({ ...line("p", "typing"), final: false }, 0);
    view.onTranscript(line("u2", "Second."), 0);
    expect(view.lines.map((l) => l.text)).toEqual(["First.", "Second."]);
  });

  it("attaches emoji to the matching utterance line", () => {
    const view = new TranscriptView();
    view.onTranscript(line("u1"), 0);
    view.onEmotion({ utterance_id: "u1", emoji: "\u{1F600}" }, 10);
    expect(view.lines[0].emoji).toBe("\u{1F600}");
    expect(view.renderLine(view.lines[0])).toBe("alice: Hello team. \u{1F600}");
  });

  it("renders no emoji when the toggle is off, regardless of envelopes", () => {
    const view = new TranscriptView();
    view.emojiEnabled = false;
    view.onTranscript(line("u1"), 0);
    view.onEmotion({ utterance_id: "u1", emoji: "\u{1F600}" }, 10);
    expect(view.renderLine(view.lines[0])).toBe("alice: Hello team.");
  });

  it("buffers out-of-order emotion for 5 s, then discards", () => {
    const view = new TranscriptView();
    view.onEmotion({ utterance_id: "early", emoji: "\u{1F622}" }, 0);
    view.onTranscript(line("early", "Sad news."), ORPHAN_TTL_MS - 1);
    expect(view.lines[0].emoji).toBe("\u{1F622}");

    view.onEmotion({ utterance_id: "stale", emoji: "\u{1F620}" }, 0);
    view.prune(ORPHAN_TTL_MS + 1);
    view.onTranscript(line("stale", "Too late."), ORPHAN_TTL_MS + 2);
    expect(view.lines[1].emoji).toBeUndefined();
  });
});
