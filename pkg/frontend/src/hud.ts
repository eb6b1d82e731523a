/**
 * HUD panel: formats the latest telemetry verbatim for display. No values
 * are recomputed client-side; only units are rendered (time as HH:MM:SS,
 * throttle as percent, steering in radians).
 */

import { TelemetryFrame } from "./protocol.js";

export function formatSimTime(seconds: number): string {
  const total = Math.floor(seconds);
  const h = Math.floor(total / 3600);
  const m = Math.floor((total % 3600) / 60);
  const s = total % 60;
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${pad(h)}:${pad(m)}:${pad(s)}`;
}

function vec(values: readonly number[], digits = 3): string {
  return `[${values.map((v) => trimmed(v, digits)).join(", ")}]`;
}

function trimmed(v: number, digits: number): string {
  const text = v.toFixed(digits);
  return text === "-" + (0).toFixed(digits) ? (0).toFixed(digits) : text;
}

export interface HudFields {
  simTime: string;
  frameRate: string;
  drivingMode: string;
  gear: string;
  speed: string;
  throttle: string;
  steering: string;
  encoderTicks: string;
  ipsData: string;
  imuOrientation: string;
  imuAngularVelocity: string;
  imuLinearAcceleration: string;
  lidarMeasurement: string;
}

/**
 * renderFps is this UI's own frame rate; everything else mirrors the frame.
 */
export function hudFields(t: TelemetryFrame, renderFps: number): HudFields {
  return {
    simTime: formatSimTime(t.time),
    frameRate: `${Math.round(renderFps)} Hz`,
    drivingMode: t.mode === "manual" ? "Manual" : "Autonomous",
    gear: t.gear,
    speed: `${String(t.speed)} m/s`,
    throttle: `${String(t.throttle * 100)}%`,
    steering: `${String(t.steering)} rad`,
    encoderTicks: `[${t.encoder_ticks[0]}, ${t.encoder_ticks[1]}]`,
    ipsData: vec(t.ips),
    imuOrientation: vec(t.imu.euler),
    imuAngularVelocity: vec(t.imu.ang_vel),
    imuLinearAcceleration: vec(t.imu.lin_acc),
    lidarMeasurement: `${String(t.lidar.ranges[0])} m`,
  };
}
