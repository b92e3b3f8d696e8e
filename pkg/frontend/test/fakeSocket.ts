import type { WebSocketLike } from "../src/wsClient.js";

/** Scriptable stand-in for a browser WebSocket. */
export class FakeSocket implements WebSocketLike {
  readyState = 0; // CONNECTING
  sent: string[] = [];
  onopen: (() => void) | null = null;
  onmessage: ((event: { data: string }) => void) | null = null;
  onclose: (() => void) | null = null;
  onerror: (() => void) | null = null;

  open(): void {
    this.readyState = 1;
    this.onopen?.();
  }

  receive(envelope: object | string): void {
    const data = typeof envelope === "string" ? envelope : JSON.stringify(envelope);
    this.onmessage?.({ data });
  }

  send(data: string): void {
    if (this.readyState !== 1) throw new Error("socket not open");
    this.sent.push(data);
  }

  close(): void {
    this.readyState = 3; // CLOSED
    this.onclose?.();
  }

  failToConnect(): void {
    this.readyState = 3;
    this.onerror?.();
  }

  lastSent(): Record<string, unknown> {
    return JSON.parse(this.sent[this.sent.length - 1]);
  }
}
