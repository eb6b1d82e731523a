/**
 * UI state store: connection status, latest telemetry/map, camera, zoom.
 * Pure update functions so the logic is testable without a DOM.
 */

import { CameraMode } from "./camera.js";
import { MapFrame, Mode, TelemetryFrame } from "./protocol.js";

export type ConnectionState = "connected" | "disconnected" | "connecting";

export interface UiState {
  connection: ConnectionState;
  telemetry: TelemetryFrame | null;
  /** wall-clock ms when the last telemetry frame arrived */
  telemetryAtMs: number | null;
  map: MapFrame | null;
  camera: CameraMode;
  zoom: number;
}

export function initialUiState(): UiState {
  return {
    connection: "disconnected",
    telemetry: null,
    telemetryAtMs: null,
    map: null,
    camera: "drivers_eye",
    zoom: 1,
  };
}

export function ingestTelemetry(
  state: UiState,
  frame: TelemetryFrame,
  nowMs: number,
): UiState {
  // never replace newer data with an out-of-order older frame
  if (state.telemetry !== null && frame.time < state.telemetry.time) {
    return state;
  }
  return { ...state, telemetry: frame, telemetryAtMs: nowMs };
}

export function ingestMap(state: UiState, frame: MapFrame): UiState {
  return { ...state, map: frame };
}

export function setConnection(state: UiState, connection: ConnectionState): UiState {
  if (connection !== "connected") {
    // a dead link must not keep rendering live-looking data
    return { ...state, connection, telemetryAtMs: null };
  }
  return { ...state, connection };
}

/** The connect button is disabled once the connection is established. */
export function connectButtonDisabled(state: UiState): boolean {
  return state.connection === "connected";
}

export const STALE_AFTER_MS = 1000;

/** Telemetry older than a second renders a Disconnected overlay. */
export function telemetryStale(state: UiState, nowMs: number): boolean {
  if (state.connection !== "connected") return true;
  if (state.telemetryAtMs === null) return true;
  return nowMs - state.telemetryAtMs > STALE_AFTER_MS;
}

export function currentMode(state: UiState): Mode {
  return state.telemetry?.mode ?? "manual";
}
