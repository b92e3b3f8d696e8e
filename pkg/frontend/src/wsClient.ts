/** Reconnecting WebSocket with an ordered offline queue. Messages sent
 * while disconnected are flushed in order after the next successful open. */

export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => WebSocketLike;

const CONNECTING = 0;
const OPEN = 1;

export interface ReconnectingSocketOptions {
  /** Called every time the socket opens (first connect and reconnects). */
  onOpen?: () => void;
  onMessage?: (raw: string) => void;
  onClose?: () => void;
  /** First reconnect delay; doubles per failure up to maxBackoffMs. */
  backoffMs?: number;
  maxBackoffMs?: number;
  scheduler?: (fn: () => void, ms: number) => void;
}

export class ReconnectingSocket {
  private url: string;
  private factory: SocketFactory;
  private opts: ReconnectingSocketOptions;
  private sock: WebSocketLike;
  private queue: string[] = [];
  private delayMs: number;
  private closed = false;

  constructor(url: string, factory: SocketFactory, opts: ReconnectingSocketOptions = {}) {
    this.url = url;
    this.factory = factory;
    this.opts = opts;
    this.delayMs = opts.backoffMs ?? 250;
    this.sock = this.open();
  }

  get isOpen(): boolean {
    return this.sock.readyState === OPEN;
  }

  get pending(): number {
    return this.queue.length;
  }

  /** Queue-then-flush: preserves order across disconnects. */
  send(data: string): void {
    this.queue.push(data);
    this.flush();
  }

  close(): void {
    this.closed = true;
    this.sock.close();
  }

  private open(): WebSocketLike {
    const sock = this.factory(this.url);
    sock.onopen = () => {
      this.delayMs = this.opts.backoffMs ?? 250;
      this.opts.onOpen?.();
      this.flush();
    };
    sock.onmessage = (event) => this.opts.onMessage?.(event.data);
    sock.onerror = () => this.scheduleReconnect();
    sock.onclose = () => {
      this.opts.onClose?.();
      this.scheduleReconnect();
    };
    return sock;
  }

  private flush(): void {
    if (this.sock.readyState !== OPEN) return;
    while (this.queue.length > 0) {
      const message = this.queue[0];
      try {
        this.sock.send(message);
      } catch {
        this.scheduleReconnect();
        return;
      }
      this.queue.shift();
    }
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    if (this.sock.readyState === CONNECTING || this.sock.readyState === OPEN) return;
    const schedule = this.opts.scheduler ?? ((fn, ms) => setTimeout(fn, ms));
    const delay = this.delayMs;
    this.delayMs = Math.min(this.delayMs * 2, this.opts.maxBackoffMs ?? 10_000);
    schedule(() => {
      if (this.closed) return;
      if (this.sock.readyState === CONNECTING || this.sock.readyState === OPEN) return;
      this.sock = this.open();
    }, delay);
  }
}
