// Cockpit session: one socket, one scene model, one pedal stream.
// The socket is injected so tests can drive the client without a network.

import { PedalInput, SEND_INTERVAL_MS } from "./input.js";
import {
  helloMessage,
  parseServerMessage,
  pedalsMessage,
} from "./protocol.js";
import { SceneModel } from "./scene.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
}

export type Role = "driver" | "spectator";

export class CockpitClient {
  scene = new SceneModel();
  input: PedalInput;
  role: Role | null = null;
  requestedRole: Role;
  connected = false;
  reconnectPrompt = false;
  lastError: string | null = null;

  private socket: SocketLike;
  private now: () => number;
  private lastPedalSent = -Infinity;

  constructor(socket: SocketLike, requestedRole: Role, now: () => number = () => performance.now()) {
    this.socket = socket;
    this.requestedRole = requestedRole;
    this.now = now;
    this.input = new PedalInput(now());
    socket.onopen = () => {
      this.connected = true;
      this.reconnectPrompt = false;
      this.scene.reset(); // a fresh connection resynchronizes from frames
      socket.send(helloMessage(requestedRole));
    };
    socket.onmessage = (ev) => this.handleMessage(ev.data);
    socket.onclose = () => {
      this.connected = false;
      this.reconnectPrompt = true;
    };
  }

  private handleMessage(raw: string): void {
    const msg = parseServerMessage(raw);
    if (msg === null) {
      this.scene.markMalformed();
      return;
    }
    switch (msg.type) {
      case "welcome":
        this.role = msg.role;
        this.scene.applyWelcome(msg);
        break;
      case "frame":
        this.scene.applyFrame(msg, this.now());
        break;
      case "error":
        this.lastError = msg.message;
        break;
    }
  }

  /** Called from the animation/send loop; emits at most one pedals message
   * per send interval, and only while holding the driver slot. */
  pump(): void {
    const now = this.now();
    this.scene.tick(now);
    if (this.role !== "driver" || !this.connected) return;
    if (now - this.lastPedalSent < SEND_INTERVAL_MS) return;
    const { throttle, brake } = this.input.sample(now);
    this.socket.send(pedalsMessage(throttle, brake, now / 1000));
    this.lastPedalSent = now;
  }
}
