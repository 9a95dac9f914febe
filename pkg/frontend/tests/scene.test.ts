import { describe, expect, it } from "vitest";

import type { FrameMessage, WelcomeMessage } from "../src/protocol.js";
import { FRAME_INTERVAL_MS, SceneModel } from "../src/scene.js";

function welcome(): WelcomeMessage {
  return {
    type: "welcome",
    role: "driver",
    scene: {
      paths: [
        { id: "highway", kind: "highway-lane", points: [[-1400, 0], [450, 0]], merge_station: 1400 },
        { id: "ramp", kind: "on-ramp", points: [[-260, -50], [0, 0]], merge_station: 267 },
      ],
      infra: { x: 0, y: -8, range: 400 },
      merge_point: [0, 0],
    },
  };
}

function frame(t: number, rampStation = -100, mode = "driver"): FrameMessage {
  const vehicles = Array.from({ length: 6 }, (_, i) => ({
    id: `hw${i + 1}`,
    path: "highway",
    x: -i * 20,
    y: 0,
    station: -i * 20,
    speed: 30,
    accel: 0,
    mode: "consensus-follow",
    seq: i + 1,
  }));
  vehicles.push({
    id: "ramp1",
    path: "ramp",
    x: rampStation * 0.98,
    y: -10,
    station: rampStation,
    speed: 20,
    accel: 1,
    mode,
    seq: null,
  });
  return {
    type: "frame",
    t,
    vehicles,
    events: [],
    metrics: { elapsed: t, merged: false, vehicles: 7 },
  };
}

describe("scene model", () => {
  it("positions all seven sprites from a frame", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.applyFrame(frame(1.0), 1000);
    expect(scene.sprites.size).toBe(7);
    expect(scene.egoId).toBe("ramp1");
    const ego = scene.sprites.get("ramp1")!;
    expect(ego.drawX).toBeCloseTo(-98);
  });

  it("sustains a 20 Hz frame stream", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    // one second of frames at the stream rate: all applied, none dropped
    for (let i = 0; i < 20; i++) {
      scene.applyFrame(frame(0.05 * (i + 1)), 1000 + FRAME_INTERVAL_MS * i);
    }
    expect(scene.frameCount).toBe(20);
    expect(scene.hud().elapsed).toBeCloseTo(1.0);
  });

  it("dead-reckons across one missing frame, then snaps", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.applyFrame(frame(1.0, -100), 1000);
    scene.applyFrame(frame(1.05, -99), 1050);
    // the 1.10 frame is lost; at its render time the sprite extrapolates
    scene.tick(1100);
    const ego = scene.sprites.get("ramp1")!;
    const extrapolated = ego.drawX;
    expect(extrapolated).toBeGreaterThan(-97.1); // beyond the last truth
    // extrapolation stops after two frame intervals
    scene.tick(1400);
    expect(scene.sprites.get("ramp1")!.drawX - extrapolated).toBeLessThan(1.1);
    // the next real frame snaps back to truth
    scene.applyFrame(frame(1.15, -97), 1150);
    expect(scene.sprites.get("ramp1")!.drawX).toBeCloseTo(-97 * 0.98);
  });

  it("keeps the last good scene and raises a banner on malformed input", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.applyFrame(frame(1.0), 1000);
    scene.markMalformed();
    expect(scene.banner).toMatch(/malformed/);
    expect(scene.sprites.size).toBe(7);
    // a good frame clears the banner
    scene.applyFrame(frame(1.05), 1050);
    expect(scene.banner).toBeNull();
  });

  it("flashes mode transitions", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.applyFrame(frame(1.0, -100, "driver"), 1000);
    scene.applyFrame(frame(1.05, -99, "fallback"), 1050);
    expect(scene.flashes.some((f) => f.id === "ramp1" && f.to === "fallback")).toBe(true);
  });

  it("resynchronizes fully after a reset (page reload)", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.applyFrame(frame(5.0), 1000);
    scene.reset();
    expect(scene.sprites.size).toBe(0);
    // the very next frame rebuilds the dynamic state completely
    scene.applyFrame(frame(5.05), 1050);
    expect(scene.sprites.size).toBe(7);
    expect(scene.egoId).toBe("ramp1");
    expect(scene.hud().egoSpeed).toBe(20);
  });

  it("hides highway traffic under the occlusion overlay until sight range", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    scene.occlusion = true;
    scene.applyFrame(frame(1.0, -150), 1000);
    expect(scene.visibleSprites().map((s) => s.id)).toEqual(["ramp1"]);
    scene.applyFrame(frame(1.05, -80), 1050);
    expect(scene.visibleSprites()).toHaveLength(7);
  });

  it("computes the HUD gap and ttc against the same-path leader", () => {
    const scene = new SceneModel();
    scene.applyWelcome(welcome());
    const f = frame(1.0);
    // put a slower highway vehicle ahead of the merged ego
    f.vehicles = [
      { id: "ramp1", path: "highway", x: 0, y: 0, station: 0, speed: 30, accel: 0, mode: "driver", seq: null },
      { id: "hw1", path: "highway", x: 25, y: 0, station: 25, speed: 25, accel: 0, mode: "cacc-cruise", seq: 1 },
    ];
    scene.applyFrame(f, 1000);
    scene.egoId = "ramp1";
    const hud = scene.hud();
    expect(hud.gap).toBeCloseTo(20.5);
    expect(hud.ttc).toBeCloseTo(4.1);
  });
});
