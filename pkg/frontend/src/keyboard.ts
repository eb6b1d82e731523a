/**
 * Hardware input mapping.
 *
 * W/Up forward, S/Down reverse, A/Left steer left, D/Right steer right.
 * G low-beam, H high-beam, L left indicators, R right indicators, E hazard
 * (all toggles). Drive keys only produce commands in manual mode; lamp keys
 * work in both modes. Keys typed into a focused text field never reach the
 * vehicle.
 */

import { CommandFrame, Mode, makeCommand } from "./protocol.js";

export interface InputState {
  forward: boolean;
  reverse: boolean;
  left: boolean;
  right: boolean;
  headlights: 0 | 1 | 2;
  indicators: 0 | 1 | 2 | 3;
}

export function initialInput(): InputState {
  return {
    forward: false,
    reverse: false,
    left: false,
    right: false,
    headlights: 0,
    indicators: 0,
  };
}

const DRIVE_KEYS: Record<string, keyof InputState> = {
  w: "forward",
  arrowup: "forward",
  s: "reverse",
  arrowdown: "reverse",
  a: "left",
  arrowleft: "left",
  d: "right",
  arrowright: "right",
};

export interface KeyEventLike {
  key: string;
  pressed: boolean;
  repeat?: boolean;
  textFieldFocused?: boolean;
}

export interface KeyResult {
  next: InputState;
  /** a lamp toggle happened, worth an immediate frame in any mode */
  lampChanged: boolean;
  handled: boolean;
}

function toggleHeadlights(current: 0 | 1 | 2, beam: 1 | 2): 0 | 1 | 2 {
  return current === beam ? 0 : beam;
}

function toggleIndicators(current: 0 | 1 | 2 | 3, mode: 1 | 2 | 3): 0 | 1 | 2 | 3 {
  return current === mode ? 0 : mode;
}

export function reduceKey(state: InputState, event: KeyEventLike): KeyResult {
  if (event.textFieldFocused) {
    // route to the field (GUI data entry), not to the vehicle
    return { next: state, lampChanged: false, handled: false };
  }
  const key = event.key.length === 1 ? event.key.toLowerCase() : event.key.toLowerCase();

  const driveField = DRIVE_KEYS[key];
  if (driveField !== undefined) {
    if (state[driveField] === event.pressed) {
      return { next: state, lampChanged: false, handled: true };
    }
    return {
      next: { ...state, [driveField]: event.pressed },
      lampChanged: false,
      handled: true,
    };
  }

  if (!event.pressed || event.repeat) {
    return { next: state, lampChanged: false, handled: key in LAMP_KEYS };
  }
  switch (key) {
    case "g":
      return {
        next: { ...state, headlights: toggleHeadlights(state.headlights, 1) },
        lampChanged: true,
        handled: true,
      };
    case "h":
      return {
        next: { ...state, headlights: toggleHeadlights(state.headlights, 2) },
        lampChanged: true,
        handled: true,
      };
    case "l":
      return {
        next: { ...state, indicators: toggleIndicators(state.indicators, 1) },
        lampChanged: true,
        handled: true,
      };
    case "r":
      return {
        next: { ...state, indicators: toggleIndicators(state.indicators, 2) },
        lampChanged: true,
        handled: true,
      };
    case "e":
      return {
        next: { ...state, indicators: toggleIndicators(state.indicators, 3) },
        lampChanged: true,
        handled: true,
      };
    default:
      return { next: state, lampChanged: false, handled: false };
  }
}

const LAMP_KEYS: Record<string, true> = { g: true, h: true, l: true, r: true, e: true };

/** Normalized drive intent from the held keys; steering + is a right turn. */
export function driveIntent(state: InputState): { throttle: number; steering: number } {
  const throttle = (state.forward ? 1 : 0) + (state.reverse ? -1 : 0);
  const steering = (state.right ? 1 : 0) + (state.left ? -1 : 0);
  return { throttle, steering };
}

/**
 * Frame for the periodic command stream. Manual mode streams the full drive
 * intent; autonomous mode emits nothing here (drive keys are ignored and
 * lamp changes are sent event-driven via lampFrame).
 */
export function streamFrame(state: InputState, mode: Mode): CommandFrame | null {
  if (mode !== "manual") return null;
  const { throttle, steering } = driveIntent(state);
  return makeCommand(throttle, steering, state.headlights, state.indicators);
}

/** Immediate frame for a lamp toggle; valid in both modes (zero drive). */
export function lampFrame(state: InputState, mode: Mode): CommandFrame {
  const { throttle, steering } =
    mode === "manual" ? driveIntent(state) : { throttle: 0, steering: 0 };
  return makeCommand(throttle, steering, state.headlights, state.indicators);
}
