// WebSocket session with visible reconnect state and 1/2/4 s backoff.

import { parseServerMessage, ServerMessage } from "./protocol.js";

export type ConnectionStatus = "connecting" | "open" | "retrying";

export interface SessionHooks {
  onMessage(msg: ServerMessage): void;
  onStatus(status: ConnectionStatus, retryInS?: number): void;
}

export const BACKOFF_S = [1, 2, 4];

export class Session {
  private ws: WebSocket | null = null;
  private attempt = 0;
  private closed = false;

  constructor(private readonly url: string, private readonly hooks: SessionHooks) {}

  connect(): void {
    if (this.closed) return;
    this.hooks.onStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.attempt = 0;
      this.hooks.onStatus("open");
    };
    this.ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg !== null) this.hooks.onMessage(msg);
    };
    this.ws.onclose = () => this.scheduleRetry();
    this.ws.onerror = () => this.ws?.close();
  }

  private scheduleRetry(): void {
    if (this.closed) return;
    const delay = BACKOFF_S[Math.min(this.attempt, BACKOFF_S.length - 1)];
    this.attempt += 1;
    this.hooks.onStatus("retrying", delay);
    setTimeout(() => this.connect(), delay * 1000);
  }

  send(frame: string): boolean {
    if (this.ws !== null && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(frame);
      return true;
    }
    return false;   // dropped silently while disconnected
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
