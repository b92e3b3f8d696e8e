/** Client conformance against a recorded 100-envelope gateway session log
 * (test/fixtures/session-log.json, captured with scripts/record_session_log.py):
 * transcript order, avatar duration arithmetic, ROOM_FULL surfacing, and the
 * speed-slider round trip. */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import type { SignSequence } from "../src/avatar.js";
import type { Envelope } from "../src/protocol.js";
import { FakeSocket } from "./fakeSocket.js";

const LOG: Envelope[] = JSON.parse(
  readFileSync(new URL("./fixtures/session-log.json", import.meta.url), "utf-8"),
);

function connectedClient(now: () => number = () => 0) {
  const sock = new FakeSocket();
  const client = new SessionClient({
    url: "ws://gateway/ws",
    sessionId: "demo",
    participantId: "viewer",
    displayName: "viewer",
    socketFactory: () => sock,
    now,
  });
  sock.open();
  return { sock, client };
}

/** Drive the player over a sequence with a millisecond clock and return
 * the measured wall-clock playback span in seconds. */
function measurePlayback(seq: SignSequence): number {
  let now = 0;
  const client = new SessionClient({
    url: "ws://gateway/ws",
    sessionId: "demo",
    participantId: "viewer",
    displayName: "viewer",
    socketFactory: () => new FakeSocket(),
    now: () => now,
  });
  client.avatar.play(seq, now);
  while (client.avatar.playing) {
    now += 1;
    client.avatar.tick(now);
    if (now > 60_000) throw new Error("playback never finished");
  }
  return (client.avatar.finishedAtMs! - client.avatar.startMs) / 1000;
}

describe("session log replay", () => {
  it("is a 100-envelope recording", () => {
    expect(LOG).toHaveLength(100);
  });

  it("renders transcript lines in envelope order", () => {
    const { sock, client } = connectedClient();
    for (const env of LOG) sock.receive(env);

    const expectedOrder = LOG.filter(
      (e) => e.type === "transcript" && e.payload.final === true,
    ).map((e) => e.payload.utterance_id);
    expect(client.transcript.lines.map((l) => l.utteranceId)).toEqual(expectedOrder);

    const translationOrder = LOG.filter((e) => e.type === "translation").map(
      (e) => e.payload.utterance_id,
    );
    expect(client.translations.lines.map((l) => l.utteranceId)).toEqual(translationOrder);
  });

  it("attaches emotion emoji to the matching transcript line", () => {
    const { sock, client } = connectedClient();
    for (const env of LOG) sock.receive(env);
    const emotions = LOG.filter((e) => e.type === "emotion");
    expect(emotions.length).toBeGreaterThan(0);
    for (const env of emotions) {
      const line = client.transcript.lines.find(
        (l) => l.utteranceId === env.payload.utterance_id,
      );
      expect(line?.emoji).toBe(env.payload.emoji);
    }
  });

  it("plays every recorded sequence within one frame of its arithmetic duration", () => {
    const sequences = LOG.filter((e) => e.type === "sign_sequence").map(
      (e) => e.payload as unknown as SignSequence,
    );
    expect(sequences.length).toBeGreaterThan(0);
    for (const seq of sequences) {
      const expected = (seq.frame_count - 1) / (seq.fps * seq.speed);
      const frameInterval = 1 / (seq.fps * seq.speed);
      expect(Math.abs(seq.total_duration - expected)).toBeLessThanOrEqual(frameInterval);
      const measured = measurePlayback(seq);
      expect(Math.abs(measured - expected)).toBeLessThanOrEqual(frameInterval);
    }
  });
});

describe("room capacity", () => {
  it("surfaces ROOM_FULL when joining a full room", () => {
    const { sock, client } = connectedClient();
    expect(JSON.parse(sock.sent[0]).type).toBe("join");
    sock.receive({
      type: "error",
      session_id: "demo",
      payload: { code: "ROOM_FULL", message: "session demo is full (8/8)" },
    });
    expect(client.roomFull).toBe(true);
    expect(client.joined).toBe(false);
    expect(client.lastError?.code).toBe("ROOM_FULL");
  });
});

describe("speed slider", () => {
  it("round-trips through set_prefs and halves/doubles the next sequence duration", () => {
    const { sock, client } = connectedClient();

    client.setSpeed(0.5);
    let sent = sock.lastSent();
    expect(sent.type).toBe("set_prefs");
    expect((sent.payload as Record<string, unknown>).signing_speed).toBe(0.5);

    client.setSpeed(2.0);
    sent = sock.lastSent();
    expect((sent.payload as Record<string, unknown>).signing_speed).toBe(2.0);

    expect(() => client.setSpeed(0.1)).toThrow(RangeError);
    expect(() => client.setSpeed(2.5)).toThrow(RangeError);

    // the recording contains the same utterance delivered at 1.0, 0.5 and
    // 2.0 after set_prefs round trips: playback halves/doubles accordingly
    const seqs = LOG.filter((e) => e.type === "sign_sequence").map(
      (e) => e.payload as unknown as SignSequence,
    );
    const base = seqs.find((s) => s.speed === 1.0)!;
    const half = seqs.find((s) => s.speed === 0.5)!;
    const twice = seqs.find((s) => s.speed === 2.0)!;
    expect(half.gloss_ids).toEqual(base.gloss_ids);
    expect(twice.gloss_ids).toEqual(base.gloss_ids);
    expect(measurePlayback(half)).toBeCloseTo(2 * measurePlayback(base), 2);
    expect(measurePlayback(twice)).toBeCloseTo(0.5 * measurePlayback(base), 2);
  });
});
