// Throttle/brake capture: key holds (or an analog axis) map to [0, 1]
// channels with 0.1 s ramp smoothing; released channels decay back to 0.

export const RAMP_TIME_MS = 100;
export const SEND_INTERVAL_MS = 50; // 20 Hz pedal stream

export class PedalInput {
  private throttleHeld = false;
  private brakeHeld = false;
  private throttle = 0;
  private brake = 0;
  private axisThrottle: number | null = null;
  private axisBrake: number | null = null;
  private lastSample: number;

  constructor(now = 0) {
    this.lastSample = now;
  }

  setThrottle(held: boolean): void {
    this.throttleHeld = held;
  }

  setBrake(held: boolean): void {
    this.brakeHeld = held;
  }

  /** Analog pedals (gamepad) override the key ramps while present. */
  setAxes(throttle: number | null, brake: number | null): void {
    this.axisThrottle = throttle;
    this.axisBrake = brake;
  }

  /** Current channel values at wall-clock `now` (ms). */
  sample(now: number): { throttle: number; brake: number } {
    const dt = Math.max(now - this.lastSample, 0);
    this.lastSample = now;
    const step = dt / RAMP_TIME_MS;
    const ramp = (value: number, held: boolean) =>
      Math.min(1, Math.max(0, value + (held ? step : -step)));
    this.throttle = ramp(this.throttle, this.throttleHeld);
    this.brake = ramp(this.brake, this.brakeHeld);
    const throttle = this.axisThrottle ?? this.throttle;
    const brake = this.axisBrake ?? this.brake;
    return {
      throttle: Math.min(1, Math.max(0, throttle)),
      brake: Math.min(1, Math.max(0, brake)),
    };
  }
}

/** Default key bindings: W / ArrowUp accelerate, S / ArrowDown brake. */
export function bindKey(input: PedalInput, key: string, pressed: boolean): boolean {
  switch (key) {
    case "w":
    case "W":
    case "ArrowUp":
      input.setThrottle(pressed);
      return true;
    case "s":
    case "S":
    case "ArrowDown":
      input.setBrake(pressed);
      return true;
    default:
      return false;
  }
}
