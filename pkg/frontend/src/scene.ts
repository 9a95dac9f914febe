// Scene model: everything the renderer draws, fed exclusively by frames.
// The model never simulates; between frames it dead-reckons for at most
// two missed frame intervals and then freezes until truth returns.

import type { FrameMessage, ScenePath, VehicleSprite, WelcomeMessage } from "./protocol.js";

export const FRAME_INTERVAL_MS = 50; // 20 Hz stream
const MAX_EXTRAPOLATION_MS = 2 * FRAME_INTERVAL_MS;
const NOMINAL_LENGTH = 4.5; // m, HUD gap estimate
const FLASH_DURATION_MS = 1200;

export interface Sprite extends VehicleSprite {
  drawX: number;
  drawY: number;
}

export interface Hud {
  egoSpeed: number | null;
  gap: number | null;
  ttc: number | null;
  elapsed: number;
}

export interface ModeFlash {
  id: string;
  from: string;
  to: string;
  until: number; // wall-clock ms
}

export class SceneModel {
  paths: ScenePath[] = [];
  infra: { x: number; y: number; range: number } | null = null;
  mergePoint: [number, number] = [0, 0];
  sprites = new Map<string, Sprite>();
  banner: string | null = null;
  flashes: ModeFlash[] = [];
  egoId: string | null = null;
  occlusion = false;
  sightDistance = 110; // m before merge where highway traffic becomes visible
  frameCount = 0;

  private lastFrame: FrameMessage | null = null;
  private prevFrameT: number | null = null;
  private lastFrameAt = 0; // wall-clock ms
  private previousVehicles = new Map<string, VehicleSprite>();
  private rampPathId: string | null = null;

  applyWelcome(msg: WelcomeMessage): void {
    this.paths = msg.scene.paths;
    this.infra = msg.scene.infra;
    this.mergePoint = msg.scene.merge_point;
    this.rampPathId = this.paths.find((p) => p.kind === "on-ramp")?.id ?? null;
  }

  /** Reset dynamic state, as on page reload; the next frame resynchronizes
   * the scene completely. */
  reset(): void {
    this.sprites.clear();
    this.flashes = [];
    this.banner = null;
    this.lastFrame = null;
    this.prevFrameT = null;
    this.previousVehicles.clear();
    this.egoId = null;
    this.frameCount = 0;
  }

  markMalformed(): void {
    this.banner = "malformed frame received; showing last good state";
  }

  applyFrame(frame: FrameMessage, now: number): void {
    if (this.lastFrame && frame.t <= this.lastFrame.t) {
      return; // out-of-order frames never rewind the scene
    }
    this.banner = null;
    this.prevFrameT = this.lastFrame?.t ?? null;
    this.previousVehicles = new Map(
      (this.lastFrame?.vehicles ?? []).map((v) => [v.id, v]),
    );
    for (const vehicle of frame.vehicles) {
      const before = this.sprites.get(vehicle.id);
      if (before && before.mode !== vehicle.mode) {
        this.flashes.push({
          id: vehicle.id,
          from: before.mode,
          to: vehicle.mode,
          until: now + FLASH_DURATION_MS,
        });
      }
      this.sprites.set(vehicle.id, { ...vehicle, drawX: vehicle.x, drawY: vehicle.y });
    }
    for (const id of [...this.sprites.keys()]) {
      if (!frame.vehicles.some((v) => v.id === id)) this.sprites.delete(id);
    }
    if (this.egoId === null && this.rampPathId !== null) {
      const ego = frame.vehicles.find((v) => v.path === this.rampPathId);
      if (ego) this.egoId = ego.id;
    }
    this.lastFrame = frame;
    this.lastFrameAt = now;
    this.frameCount += 1;
    this.flashes = this.flashes.filter((f) => f.until > now);
  }

  /** Advance draw positions between frames: linear dead reckoning from the
   * last two frames, capped at two frame intervals, then a hard freeze
   * (the next real frame snaps sprites back to truth). */
  tick(now: number): void {
    if (!this.lastFrame || this.prevFrameT === null) return;
    const dt = this.lastFrame.t - this.prevFrameT;
    if (dt <= 0) return;
    const age = Math.min(now - this.lastFrameAt, MAX_EXTRAPOLATION_MS);
    if (age <= 0) return;
    for (const sprite of this.sprites.values()) {
      const prev = this.previousVehicles.get(sprite.id);
      const last = this.lastFrame.vehicles.find((v) => v.id === sprite.id);
      if (!prev || !last) continue;
      const vx = (last.x - prev.x) / dt;
      const vy = (last.y - prev.y) / dt;
      sprite.drawX = last.x + (vx * age) / 1000;
      sprite.drawY = last.y + (vy * age) / 1000;
    }
  }

  /** Vehicles the driver is allowed to see: with the occlusion overlay on,
   * highway traffic stays hidden until the ego is within sight distance of
   * the merge point (or already on the highway). */
  visibleSprites(): Sprite[] {
    const all = [...this.sprites.values()];
    if (!this.occlusion || this.egoId === null) return all;
    const ego = this.sprites.get(this.egoId);
    if (!ego || ego.path !== this.rampPathId) return all;
    if (ego.station >= -this.sightDistance) return all;
    return all.filter((s) => s.path === this.rampPathId);
  }

  hud(): Hud {
    const elapsed = this.lastFrame?.metrics.elapsed ?? 0;
    const ego = this.egoId ? this.sprites.get(this.egoId) : undefined;
    if (!ego) return { egoSpeed: null, gap: null, ttc: null, elapsed };
    let leader: Sprite | null = null;
    for (const sprite of this.sprites.values()) {
      if (sprite.id === ego.id || sprite.path !== ego.path) continue;
      if (sprite.station <= ego.station) continue;
      if (!leader || sprite.station < leader.station) leader = sprite;
    }
    if (!leader) return { egoSpeed: ego.speed, gap: null, ttc: null, elapsed };
    const gap = leader.station - ego.station - NOMINAL_LENGTH;
    const closing = ego.speed - leader.speed;
    const ttc = gap > 0 && closing > 0 ? gap / closing : null;
    return { egoSpeed: ego.speed, gap, ttc, elapsed };
  }
}
