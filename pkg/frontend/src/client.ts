/** Session client: joins a room over the gateway protocol, routes
 * incoming envelopes into the transcript and avatar view-models, and
 * sends user actions (utterances, prefs, replay) back over the wire. */

import { AvatarPlayer, SignSequence } from "./avatar.js";
import { Envelope, makeEnvelope, parseEnvelope, ProtocolError } from "./protocol.js";
import { TranscriptView } from "./transcript.js";
import { ReconnectingSocket, SocketFactory } from "./wsClient.js";

export const MIN_SPEED = 0.25;
export const MAX_SPEED = 2.0;

export interface RosterEntry {
  participant_id: string;
  display_name: string;
  role: string;
  prefs: Record<string, unknown>;
}

export interface SessionClientOptions {
  url: string;
  sessionId: string;
  participantId: string;
  displayName: string;
  language?: string;
  socketFactory?: SocketFactory;
  now?: () => number;
}

export class SessionClient {
  transcript = new TranscriptView();
  translations = new TranscriptView();
  avatar = new AvatarPlayer();
  roster: RosterEntry[] = [];
  joined = false;
  roomFull = false;
  /** Most recent error payload, for banners / retry prompts. */
  lastError: { code: string; message: string } | null = null;
  speed = 1.0;
  sequences: SignSequence[] = [];

  private sock: ReconnectingSocket;
  private opts: SessionClientOptions;
  private now: () => number;

  constructor(opts: SessionClientOptions) {
    this.opts = opts;
    this.now = opts.now ?? (() => Date.now());
    const factory: SocketFactory = opts.socketFactory ?? ((url) => new WebSocket(url) as never);
    this.sock = new ReconnectingSocket(opts.url, factory, {
      onOpen: () => this.sendJoin(),
      onMessage: (raw) => this.handleRaw(raw),
      onClose: () => {
        this.joined = false;
      },
    });
  }

  close(): void {
    this.sock.close();
  }

  // -- outbound ------------------------------------------------------------

  private send(env: Envelope): void {
    this.sock.send(JSON.stringify(env));
  }

  private sendJoin(): void {
    // first frame after every (re)open; queued sends flush right after
    this.joined = false;
    this.send(
      makeEnvelope(
        "join",
        {
          participant_id: this.opts.participantId,
          display_name: this.opts.displayName,
          role: "speaker",
          prefs: { sign_inline: true, language: this.opts.language ?? "en" },
        },
        this.opts.sessionId,
        this.opts.participantId,
      ),
    );
  }

  /** Empty input is a no-op (send stays disabled); offline sends queue. */
  sendUtterance(text: string): boolean {
    if (!text.trim()) return false;
    this.send(
      makeEnvelope("text_message", { text }, this.opts.sessionId, this.opts.participantId),
    );
    return true;
  }

  setSpeed(value: number): void {
    if (!(value >= MIN_SPEED && value <= MAX_SPEED)) {
      throw new RangeError(`signing speed must be in [${MIN_SPEED}, ${MAX_SPEED}]`);
    }
    this.speed = value;
    this.send(
      makeEnvelope("set_prefs", { signing_speed: value }, this.opts.sessionId, this.opts.participantId),
    );
  }

  setEmojiEnabled(enabled: boolean): void {
    this.transcript.emojiEnabled = enabled;
    this.send(
      makeEnvelope("set_prefs", { emoji_enabled: enabled }, this.opts.sessionId, this.opts.participantId),
    );
  }

  requestReplay(sequenceId: string, speed?: number): void {
    const payload: Record<string, unknown> = { sequence_id: sequenceId };
    if (speed !== undefined) payload.speed = speed;
    this.send(makeEnvelope("replay_request", payload, this.opts.sessionId, this.opts.participantId));
  }

  // -- inbound -------------------------------------------------------------

  private handleRaw(raw: string): void {
    let env: Envelope;
    try {
      env = parseEnvelope(raw);
    } catch (err) {
      if (err instanceof ProtocolError) {
        console.warn(`dropping unparseable frame: ${err.message}`);
        return;
      }
      throw err;
    }
    this.handle(env);
  }

  handle(env: Envelope): void {
    const nowMs = this.now();
    switch (env.type) {
      case "joined":
        this.joined = true;
        this.roomFull = false;
        this.roster = (env.payload.roster as RosterEntry[]) ?? [];
        break;
      case "presence":
        this.roster = (env.payload.roster as RosterEntry[]) ?? [];
        break;
      case "transcript":
        this.transcript.onTranscript(env.payload, nowMs);
        break;
      case "translation":
        this.translations.onTranscript(
          { ...env.payload, speaker_id: env.sender_id, language: env.payload.target },
          nowMs,
        );
        break;
      case "emotion":
        this.transcript.onEmotion(env.payload, nowMs);
        break;
      case "sign_sequence": {
        const seq = env.payload as unknown as SignSequence;
        this.sequences.push(seq);
        this.avatar.play(seq, nowMs);
        break;
      }
      case "error": {
        const code = String(env.payload.code ?? "");
        this.lastError = { code, message: String(env.payload.message ?? "") };
        if (code === "ROOM_FULL") this.roomFull = true;
        break;
      }
      default:
        break; // summary and future types are surfaced elsewhere
    }
  }
}
