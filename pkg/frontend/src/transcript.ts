/** Transcript view-model: lines appended in envelope arrival order, with
 * emotion emoji attached to the matching utterance line when enabled.
 * Emotion envelopes that arrive before (or without) their transcript line
 * are buffered for a short grace period, then discarded. */

export const ORPHAN_TTL_MS = 5000;

export interface TranscriptLine {
  speaker: string;
  text: string;
  utteranceId: string;
  language: string;
  emoji?: string;
}

interface OrphanEmotion {
  emoji: string;
  expiresAtMs: number;
}

export class TranscriptView {
  emojiEnabled = true;
  lines: TranscriptLine[] = [];
  private byUtterance = new Map<string, TranscriptLine>();
  private orphans = new Map<string, OrphanEmotion>();

  onTranscript(payload: Record<string, unknown>, nowMs: number): TranscriptLine | null {
    if (payload.final === false) return null; // partials stay off the log
    const utteranceId = String(payload.utterance_id ?? "");
    const line: TranscriptLine = {
      speaker: String(payload.speaker_id ?? ""),
      text: String(payload.text ?? ""),
      utteranceId,
      language: String(payload.language ?? ""),
    };
    this.lines.push(line);
    if (utteranceId) {
      this.byUtterance.set(utteranceId, line);
      const orphan = this.orphans.get(utteranceId);
      if (orphan) {
        this.orphans.delete(utteranceId);
        if (orphan.expiresAtMs >= nowMs) line.emoji = orphan.emoji;
      }
    }
    this.prune(nowMs);
    return line;
  }

  onEmotion(payload: Record<string, unknown>, nowMs: number): void {
    const utteranceId = String(payload.utterance_id ?? "");
    const emoji = String(payload.emoji ?? "");
    if (!utteranceId || !emoji) return;
    const line = this.byUtterance.get(utteranceId);
    if (line) {
      line.emoji = emoji;
    } else {
      this.orphans.set(utteranceId, { emoji, expiresAtMs: nowMs + ORPHAN_TTL_MS });
    }
    this.prune(nowMs);
  }

  /** Rendered text for one line, honouring the emoji toggle. */
  renderLine(line: TranscriptLine): string {
    const suffix = this.emojiEnabled && line.emoji ? ` ${line.emoji}` : "";
    return `${line.speaker}: ${line.text}${suffix}`;
  }

  render(): string[] {
    return this.lines.map((line) => this.renderLine(line));
  }

  prune(nowMs: number): void {
    for (const [id, orphan] of this.orphans) {
      if (orphan.expiresAtMs < nowMs) this.orphans.delete(id);
    }
  }
}
