/**
 * Scene cameras: Driver's Eye (chase view rotated with the vehicle),
 * Bird's Eye (top-down, vehicle-centered, user zoom), God's Eye (top-down
 * auto-fit of the vehicle and nearby obstacles).
 */

import { MapBox } from "./protocol.js";

export type CameraMode = "drivers_eye" | "birds_eye" | "gods_eye";

const CYCLE: CameraMode[] = ["drivers_eye", "birds_eye", "gods_eye"];

export function nextCamera(mode: CameraMode): CameraMode {
  return CYCLE[(CYCLE.indexOf(mode) + 1) % CYCLE.length];
}

export function cameraLabel(mode: CameraMode): string {
  switch (mode) {
    case "drivers_eye":
      return "Driver's Eye";
    case "birds_eye":
      return "Bird's Eye";
    case "gods_eye":
      return "God's Eye";
  }
}

export const ZOOM_MIN = 0.25;
export const ZOOM_MAX = 8;

/** Mouse-scroll zoom applies in Bird's Eye view only. */
export function applyZoom(mode: CameraMode, zoom: number, wheelDelta: number): number {
  if (mode !== "birds_eye") return zoom;
  const factor = Math.exp(-wheelDelta * 0.001);
  return Math.min(ZOOM_MAX, Math.max(ZOOM_MIN, zoom * factor));
}

export interface Viewport {
  /** world point mapped to the canvas anchor */
  centerX: number;
  centerY: number;
  /** pixels per meter */
  scale: number;
  /** CCW world rotation applied before drawing, radians */
  rotation: number;
  /** canvas anchor for the center, as a fraction of width/height */
  anchorX: number;
  anchorY: number;
}

export interface VehiclePose {
  x: number;
  y: number;
  yaw: number;
}

const DRIVERS_EYE_SCALE = 140;
const BIRDS_EYE_SCALE = 90;
const GODS_EYE_NEAR = 3.0; // obstacles within this radius join the fit
const GODS_EYE_MARGIN = 1.1; // 10% margin around the fitted bounds

export function cameraViewport(
  mode: CameraMode,
  vehicle: VehiclePose,
  boxes: MapBox[],
  zoom: number,
  canvasWidth: number,
  canvasHeight: number,
): Viewport {
  if (mode === "drivers_eye") {
    // chase framing: vehicle low in the frame, heading pointing screen-up
    return {
      centerX: vehicle.x,
      centerY: vehicle.y,
      scale: DRIVERS_EYE_SCALE,
      rotation: Math.PI / 2 - vehicle.yaw,
      anchorX: 0.5,
      anchorY: 0.72,
    };
  }
  if (mode === "birds_eye") {
    return {
      centerX: vehicle.x,
      centerY: vehicle.y,
      scale: BIRDS_EYE_SCALE * zoom,
      rotation: 0,
      anchorX: 0.5,
      anchorY: 0.5,
    };
  }
  // gods_eye: fit vehicle plus nearby boxes with a margin
  let minX = vehicle.x - 0.5;
  let maxX = vehicle.x + 0.5;
  let minY = vehicle.y - 0.5;
  let maxY = vehicle.y + 0.5;
  for (const box of boxes) {
    const distance = Math.hypot(box.x - vehicle.x, box.y - vehicle.y);
    if (distance <= GODS_EYE_NEAR) {
      const h = box.half_extent ?? 0.1;
      minX = Math.min(minX, box.x - h);
      maxX = Math.max(maxX, box.x + h);
      minY = Math.min(minY, box.y - h);
      maxY = Math.max(maxY, box.y + h);
    }
  }
  const spanX = (maxX - minX) * GODS_EYE_MARGIN;
  const spanY = (maxY - minY) * GODS_EYE_MARGIN;
  const scale = Math.min(canvasWidth / spanX, canvasHeight / spanY);
  return {
    centerX: (minX + maxX) / 2,
    centerY: (minY + maxY) / 2,
    scale,
    rotation: 0,
    anchorX: 0.5,
    anchorY: 0.5,
  };
}
