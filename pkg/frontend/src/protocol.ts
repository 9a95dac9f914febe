// Bridge protocol types and validation. Mirrors docs/bridge-protocol.json
// in the repository root; the cockpit speaks it verbatim.

export interface VehicleSprite {
  id: string;
  path: string;
  x: number;
  y: number;
  station: number;
  speed: number;
  accel: number;
  mode: string;
  seq: number | null;
}

export interface FrameMessage {
  type: "frame";
  t: number;
  vehicles: VehicleSprite[];
  events: Record<string, unknown>[];
  metrics: { elapsed: number; merged: boolean; vehicles: number };
}

export interface ScenePath {
  id: string;
  kind: "highway-lane" | "on-ramp";
  points: [number, number][];
  merge_station: number;
}

export interface WelcomeMessage {
  type: "welcome";
  role: "driver" | "spectator";
  scene: {
    paths: ScenePath[];
    infra: { x: number; y: number; range: number };
    merge_point: [number, number];
  };
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = FrameMessage | WelcomeMessage | ErrorMessage;

export interface PedalsMessage {
  type: "pedals";
  throttle: number;
  brake: number;
  ts: number;
}

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isVehicle(v: unknown): v is VehicleSprite {
  if (typeof v !== "object" || v === null) return false;
  const o = v as Record<string, unknown>;
  return (
    typeof o.id === "string" &&
    typeof o.path === "string" &&
    isNumber(o.x) &&
    isNumber(o.y) &&
    isNumber(o.station) &&
    isNumber(o.speed) &&
    isNumber(o.accel) &&
    typeof o.mode === "string" &&
    (o.seq === null || isNumber(o.seq))
  );
}

/** Parse one server message; returns null when the payload does not match
 * the schema (the caller shows a banner and keeps the last good scene). */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const msg = data as Record<string, unknown>;
  switch (msg.type) {
    case "frame": {
      if (!isNumber(msg.t) || !Array.isArray(msg.vehicles)) return null;
      if (!msg.vehicles.every(isVehicle)) return null;
      const metrics = msg.metrics as Record<string, unknown> | undefined;
      if (!metrics || !isNumber(metrics.elapsed)) return null;
      return msg as unknown as FrameMessage;
    }
    case "welcome": {
      const scene = msg.scene as Record<string, unknown> | undefined;
      if (!scene || !Array.isArray(scene.paths)) return null;
      if (msg.role !== "driver" && msg.role !== "spectator") return null;
      return msg as unknown as WelcomeMessage;
    }
    case "error": {
      if (typeof msg.message !== "string") return null;
      return msg as unknown as ErrorMessage;
    }
    default:
      return null;
  }
}

export function helloMessage(role: "driver" | "spectator"): string {
  return JSON.stringify({ type: "hello", role });
}

export function pedalsMessage(throttle: number, brake: number, ts: number): string {
  const clamp = (v: number) => Math.min(1, Math.max(0, v));
  const msg: PedalsMessage = {
    type: "pedals",
    throttle: clamp(throttle),
    brake: clamp(brake),
    ts,
  };
  return JSON.stringify(msg);
}
