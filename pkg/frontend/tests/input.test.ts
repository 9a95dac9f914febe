import { describe, expect, it } from "vitest";

import { PedalInput, RAMP_TIME_MS, bindKey } from "../src/input.js";

describe("pedal input", () => {
  it("ramps to full throttle within 0.1 s of a key hold", () => {
    const input = new PedalInput(0);
    input.setThrottle(true);
    expect(input.sample(50).throttle).toBeCloseTo(0.5);
    expect(input.sample(RAMP_TIME_MS).throttle).toBeCloseTo(1.0);
    // holding keeps it saturated
    expect(input.sample(1000).throttle).toBe(1);
  });

  it("decays to zero within 0.1 s of release", () => {
    const input = new PedalInput(0);
    input.setThrottle(true);
    input.sample(100);
    input.setThrottle(false);
    expect(input.sample(150).throttle).toBeCloseTo(0.5);
    expect(input.sample(200).throttle).toBe(0);
  });

  it("drives both channels when both keys are held", () => {
    const input = new PedalInput(0);
    bindKey(input, "w", true);
    bindKey(input, "ArrowDown", true);
    const { throttle, brake } = input.sample(60);
    expect(throttle).toBeGreaterThan(0);
    expect(brake).toBeGreaterThan(0);
  });

  it("analog axes override the key ramps", () => {
    const input = new PedalInput(0);
    input.setAxes(0.73, 0.12);
    const sample = input.sample(50);
    expect(sample.throttle).toBeCloseTo(0.73);
    expect(sample.brake).toBeCloseTo(0.12);
    input.setAxes(null, null);
    expect(input.sample(100).throttle).toBeLessThan(0.1);
  });

  it("ignores unbound keys", () => {
    const input = new PedalInput(0);
    expect(bindKey(input, "q", true)).toBe(false);
  });
});
