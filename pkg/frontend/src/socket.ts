/**
 * WebSocket transport to the simulator bridge: connect/disconnect lifecycle,
 * JSON frame send, parsed-frame callback, auto-reconnect with backoff while
 * enabled.
 */

import { CommandFrame, ControlFrame, IncomingFrame, parseIncoming } from "./protocol.js";

export interface BridgeSocketOptions {
  onFrame: (frame: IncomingFrame) => void;
  onStateChange: (connected: boolean) => void;
}

const BACKOFF_BASE_MS = 500;
const BACKOFF_MAX_MS = 5000;

export class BridgeSocket {
  private ws: WebSocket | null = null;
  private url = "";
  private shouldReconnect = false;
  private reconnectAttempt = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private options: BridgeSocketOptions) {}

  connect(ip: string, port: number): void {
    this.url = `ws://${ip}:${port}`;
    this.shouldReconnect = true;
    this.reconnectAttempt = 0;
    this.open();
  }

  disconnect(): void {
    this.shouldReconnect = false;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.ws?.close();
    this.ws = null;
    this.options.onStateChange(false);
  }

  get connected(): boolean {
    return this.ws?.readyState === WebSocket.OPEN;
  }

  send(frame: CommandFrame | ControlFrame): void {
    if (this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(frame));
    }
  }

  private open(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.reconnectAttempt = 0;
      this.options.onStateChange(true);
    };
    this.ws.onmessage = (event) => {
      const frame = parseIncoming(String(event.data));
      if (frame !== null) {
        this.options.onFrame(frame);
      }
    };
    this.ws.onclose = () => {
      this.ws = null;
      this.options.onStateChange(false);
      if (this.shouldReconnect) {
        const delay = Math.min(
          BACKOFF_BASE_MS * 2 ** this.reconnectAttempt,
          BACKOFF_MAX_MS,
        );
        this.reconnectAttempt += 1;
        this.timer = setTimeout(() => this.open(), delay);
      }
    };
    this.ws.onerror = () => {
      // onclose always follows; reconnect handled there
    };
  }
}
