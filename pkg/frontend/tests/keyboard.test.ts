import { describe, expect, it } from "vitest";

import {
  initialInput,
  InputState,
  driveIntent,
  lampFrame,
  reduceKey,
  streamFrame,
} from "../src/keyboard.js";

function press(state: InputState, key: string, opts: Partial<{ repeat: boolean; textFieldFocused: boolean }> = {}) {
  return reduceKey(state, { key, pressed: true, ...opts });
}

function release(state: InputState, key: string) {
  return reduceKey(state, { key, pressed: false });
}

describe("hardware input table", () => {
  it("maps W / ArrowUp to forward drive", () => {
    for (const key of ["w", "W", "ArrowUp"]) {
      const { next } = press(initialInput(), key);
      expect(next.forward).toBe(true);
      expect(driveIntent(next)).toEqual({ throttle: 1, steering: 0 });
    }
  });

  it("maps S / ArrowDown to reverse", () => {
    for (const key of ["s", "ArrowDown"]) {
      const { next } = press(initialInput(), key);
      expect(driveIntent(next)).toEqual({ throttle: -1, steering: 0 });
    }
  });

  it("maps A/Left to left steer and D/Right to right steer", () => {
    for (const key of ["a", "ArrowLeft"]) {
      const { next } = press(initialInput(), key);
      expect(driveIntent(next).steering).toBe(-1);
    }
    for (const key of ["d", "ArrowRight"]) {
      const { next } = press(initialInput(), key);
      expect(driveIntent(next).steering).toBe(1);
    }
  });

  it("releases keys back to neutral", () => {
    let state = press(initialInput(), "w").next;
    state = press(state, "d").next;
    expect(driveIntent(state)).toEqual({ throttle: 1, steering: 1 });
    state = release(state, "w").next;
    state = release(state, "d").next;
    expect(driveIntent(state)).toEqual({ throttle: 0, steering: 0 });
  });

  it("toggles lamps: G low-beam, H high-beam, L/R/E indicators", () => {
    let state = initialInput();
    state = press(state, "g").next;
    expect(state.headlights).toBe(1);
    state = press(state, "h").next;
    expect(state.headlights).toBe(2);
    state = press(state, "h").next; // toggling the active beam turns it off
    expect(state.headlights).toBe(0);

    state = press(state, "l").next;
    expect(state.indicators).toBe(1);
    state = press(state, "r").next;
    expect(state.indicators).toBe(2);
    state = press(state, "e").next;
    expect(state.indicators).toBe(3);
    state = press(state, "e").next;
    expect(state.indicators).toBe(0);
  });

  it("ignores auto-repeat for toggles", () => {
    let state = press(initialInput(), "g").next;
    state = press(state, "g", { repeat: true }).next;
    expect(state.headlights).toBe(1); // repeat must not re-toggle
  });

  it("routes keys to a focused text field instead of the vehicle", () => {
    const result = press(initialInput(), "w", { textFieldFocused: true });
    expect(result.next.forward).toBe(false);
    expect(result.handled).toBe(false);
  });
});

describe("command frame emission", () => {
  it("holding W in manual mode produces a +1 throttle teleop frame", () => {
    const state = press(initialInput(), "w").next;
    const frame = streamFrame(state, "manual");
    expect(frame).not.toBeNull();
    expect(frame!).toMatchObject({
      type: "command",
      throttle: 1,
      steering: 0,
      headlights: 0,
      indicators: 0,
      source: "teleop",
    });
  });

  it("holding W in autonomous mode emits no drive command", () => {
    const state = press(initialInput(), "w").next;
    expect(streamFrame(state, "autonomous")).toBeNull();
  });

  it("lamp toggles emit in both modes", () => {
    let state = press(initialInput(), "h").next;
    const autonomous = lampFrame(state, "autonomous");
    expect(autonomous.headlights).toBe(2);
    expect(autonomous.throttle).toBe(0); // never smuggles drive input

    state = press(state, "w").next;
    const manual = lampFrame(state, "manual");
    expect(manual.headlights).toBe(2);
    expect(manual.throttle).toBe(1);
  });

  it("opposing keys cancel out", () => {
    let state = press(initialInput(), "w").next;
    state = press(state, "s").next;
    const frame = streamFrame(state, "manual");
    expect(frame!.throttle).toBe(0);
  });
});
