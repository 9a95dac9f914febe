// Cross-language contract check: fixtures produced by the simulator's own
// bridge encoder must parse and render through the cockpit pipeline.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { parseServerMessage } from "../src/protocol.js";
import { SceneModel } from "../src/scene.js";

function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf-8");
}

describe("server fixtures", () => {
  it("welcome fixture parses and loads the scene", () => {
    const msg = parseServerMessage(fixture("welcome.json"));
    expect(msg?.type).toBe("welcome");
    const scene = new SceneModel();
    if (msg?.type === "welcome") scene.applyWelcome(msg);
    expect(scene.paths.map((p) => p.kind).sort()).toEqual(["highway-lane", "on-ramp"]);
    expect(scene.infra?.range).toBe(400);
  });

  it("frame fixture parses and renders seven sprites with badges", () => {
    const welcome = parseServerMessage(fixture("welcome.json"));
    const msg = parseServerMessage(fixture("frame.json"));
    expect(msg?.type).toBe("frame");
    const scene = new SceneModel();
    if (welcome?.type === "welcome") scene.applyWelcome(welcome);
    if (msg?.type === "frame") scene.applyFrame(msg, 0);
    expect(scene.sprites.size).toBe(7);
    expect(scene.sprites.get("hw1")?.seq).toBe(1);
    expect(scene.sprites.get("ramp1")?.seq).toBe(2);
    expect(scene.egoId).toBe("ramp1");
  });
});
