/**
 * Wire protocol: JSON frames exchanged with the simulator bridge.
 *
 * Mirrors the simulator's schema exactly. Command frames sent by this UI
 * carry `source: "teleop"` so the simulator routes their drive fields to
 * the manual-mode input cell.
 */

export type Mode = "manual" | "autonomous";
export type Gear = "D" | "R";

export interface ImuData {
  quat: [number, number, number, number];
  euler: [number, number, number];
  ang_vel: [number, number, number];
  lin_acc: [number, number, number];
}

export interface LampData {
  headlights: 0 | 1 | 2;
  indicators: 0 | 1 | 2 | 3;
  taillight: 0 | 1 | 2;
  reverse: boolean;
}

export interface TelemetryFrame {
  type: "telemetry";
  v: number;
  time: number;
  mode: Mode;
  gear: Gear;
  speed: number;
  throttle: number;
  steering: number;
  encoder_ticks: [number, number];
  encoder_angles: [number, number];
  ips: [number, number, number];
  imu: ImuData;
  lidar: { ranges: number[]; intensities: number[] };
  lamps: LampData;
  scene_light: boolean;
}

export interface MapBox {
  x: number;
  y: number;
  yaw: number;
  half_extent?: number;
}

export interface MapFrame {
  type: "map";
  v: number;
  tile_size: number;
  bounds_wall: boolean;
  require_loop: boolean;
  grid: string[][];
  boxes: MapBox[];
  vehicle: {
    wheelbase: number;
    track: number;
    body_length: number;
    body_width: number;
  };
}

export interface CommandFrame {
  type: "command";
  throttle: number;
  steering: number;
  headlights: number;
  indicators: number;
  source: "teleop";
}

export type ControlAction =
  | "reset"
  | "mode_manual"
  | "mode_autonomous"
  | "scene_light_on"
  | "scene_light_off";

export interface ControlFrame {
  type: "control";
  action: ControlAction;
}

export type IncomingFrame = TelemetryFrame | MapFrame;

export function clampUnit(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.max(-1, Math.min(1, value));
}

export function makeCommand(
  throttle: number,
  steering: number,
  headlights: number,
  indicators: number,
): CommandFrame {
  return {
    type: "command",
    throttle: clampUnit(throttle),
    steering: clampUnit(steering),
    headlights: Math.max(0, Math.min(2, Math.round(headlights))),
    indicators: Math.max(0, Math.min(3, Math.round(indicators))),
    source: "teleop",
  };
}

export function makeControl(action: ControlAction): ControlFrame {
  return { type: "control", action };
}

/** Parse one inbound frame; returns null for anything unusable. */
export function parseIncoming(data: string): IncomingFrame | null {
  let doc: unknown;
  try {
    doc = JSON.parse(data);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const frame = doc as { type?: string };
  if (frame.type === "telemetry") return doc as TelemetryFrame;
  if (frame.type === "map") return doc as MapFrame;
  return null;
}

/** Indicator lamps are lit during the first half of each 1 Hz blink cycle. */
export function blinkPhaseOn(simTime: number): boolean {
  return Math.floor(simTime * 2) % 2 === 0;
}
