/**
 * Application wiring: Menu panel, HUD panel, keyboard control, command
 * streaming, and the render loop with three scene cameras plus the two
 * camera preview thumbnails.
 */

import { applyZoom, cameraLabel, cameraViewport, nextCamera, Viewport } from "./camera.js";
import { hudFields, HudFields } from "./hud.js";
import {
  initialInput,
  lampFrame,
  reduceKey,
  streamFrame,
} from "./keyboard.js";
import { makeControl } from "./protocol.js";
import { renderDisconnectedOverlay, renderScene, vehicleWorldPose } from "./render.js";
import { BridgeSocket } from "./socket.js";
import {
  connectButtonDisabled,
  currentMode,
  ingestMap,
  ingestTelemetry,
  initialUiState,
  setConnection,
  telemetryStale,
} from "./store.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
};

let ui = initialUiState();
let input = initialInput();

const canvas = $<HTMLCanvasElement>("scene");
const ctx = canvas.getContext("2d")!;
const frontPreview = $<HTMLCanvasElement>("preview-front");
const rearPreview = $<HTMLCanvasElement>("preview-rear");

const ipField = $<HTMLInputElement>("ip");
const portField = $<HTMLInputElement>("port");
const connectButton = $<HTMLButtonElement>("connect");
const statusLabel = $<HTMLSpanElement>("status");
const resetButton = $<HTMLButtonElement>("reset");
const modeButton = $<HTMLButtonElement>("mode");
const modeLabel = $<HTMLSpanElement>("mode-label");
const cameraButton = $<HTMLButtonElement>("camera");
const cameraLabelEl = $<HTMLSpanElement>("camera-label");
const lightButton = $<HTMLButtonElement>("scene-light");

const socket = new BridgeSocket({
  onFrame: (frame) => {
    if (frame.type === "telemetry") {
      ui = ingestTelemetry(ui, frame, performance.now());
    } else {
      ui = ingestMap(ui, frame);
    }
  },
  onStateChange: (connected) => {
    ui = setConnection(ui, connected ? "connected" : "disconnected");
    syncMenu();
  },
});

function syncMenu(): void {
  connectButton.disabled = connectButtonDisabled(ui);
  statusLabel.textContent = ui.connection === "connected" ? "Connected" : "Disconnected";
  statusLabel.className = ui.connection === "connected" ? "ok" : "bad";
  cameraLabelEl.textContent = cameraLabel(ui.camera);
  if (ui.telemetry !== null) {
    modeLabel.textContent = ui.telemetry.mode === "manual" ? "Manual" : "Autonomous";
  }
}

connectButton.addEventListener("click", () => {
  ui = setConnection(ui, "connecting");
  socket.connect(ipField.value || "127.0.0.1", parseInt(portField.value, 10) || 4567);
});
resetButton.addEventListener("click", () => socket.send(makeControl("reset")));
modeButton.addEventListener("click", () => {
  const to = currentMode(ui) === "manual" ? "mode_autonomous" : "mode_manual";
  socket.send(makeControl(to));
});
cameraButton.addEventListener("click", () => {
  ui = { ...ui, camera: nextCamera(ui.camera) };
  syncMenu();
});
lightButton.addEventListener("click", () => {
  const on = ui.telemetry?.scene_light ?? true;
  socket.send(makeControl(on ? "scene_light_off" : "scene_light_on"));
});

function textFieldFocused(): boolean {
  const active = document.activeElement;
  return active instanceof HTMLInputElement || active instanceof HTMLTextAreaElement;
}

window.addEventListener("keydown", (event) => {
  const result = reduceKey(input, {
    key: event.key,
    pressed: true,
    repeat: event.repeat,
    textFieldFocused: textFieldFocused(),
  });
  input = result.next;
  if (result.lampChanged) {
    socket.send(lampFrame(input, currentMode(ui)));
  }
  if (result.handled) event.preventDefault();
});

window.addEventListener("keyup", (event) => {
  const result = reduceKey(input, {
    key: event.key,
    pressed: false,
    textFieldFocused: textFieldFocused(),
  });
  input = result.next;
});

canvas.addEventListener("wheel", (event) => {
  ui = { ...ui, zoom: applyZoom(ui.camera, ui.zoom, event.deltaY) };
  event.preventDefault();
});

// manual-mode drive keys stream continuously at 20 Hz
setInterval(() => {
  if (!socket.connected) return;
  const frame = streamFrame(input, currentMode(ui));
  if (frame !== null) socket.send(frame);
}, 50);

// --- HUD -------------------------------------------------------------------

const hudIds: Record<keyof HudFields, string> = {
  simTime: "hud-time",
  frameRate: "hud-fps",
  drivingMode: "hud-mode",
  gear: "hud-gear",
  speed: "hud-speed",
  throttle: "hud-throttle",
  steering: "hud-steering",
  encoderTicks: "hud-encoders",
  ipsData: "hud-ips",
  imuOrientation: "hud-imu-orient",
  imuAngularVelocity: "hud-imu-gyro",
  imuLinearAcceleration: "hud-imu-accel",
  lidarMeasurement: "hud-lidar",
};

function syncHud(renderFps: number): void {
  if (ui.telemetry === null) return;
  const fields = hudFields(ui.telemetry, renderFps);
  for (const key of Object.keys(hudIds) as (keyof HudFields)[]) {
    $(hudIds[key]).textContent = fields[key];
  }
}

// --- render loop --------------------------------------------------------------

let frameCount = 0;
let fpsWindowStart = performance.now();
let renderFps = 0;

function previewViewport(base: { x: number; y: number; yaw: number }, rear: boolean): Viewport {
  const yaw = rear ? base.yaw + Math.PI : base.yaw;
  return {
    centerX: base.x,
    centerY: base.y,
    scale: 60,
    rotation: Math.PI / 2 - yaw,
    anchorX: 0.5,
    anchorY: 0.85,
  };
}

function frame(): void {
  frameCount += 1;
  const now = performance.now();
  if (now - fpsWindowStart >= 1000) {
    renderFps = (frameCount * 1000) / (now - fpsWindowStart);
    frameCount = 0;
    fpsWindowStart = now;
  }

  const t = ui.telemetry;
  const pose = t !== null ? vehicleWorldPose(t) : { x: 0, y: 0, yaw: 0 };
  const viewport = cameraViewport(
    ui.camera,
    pose,
    ui.map?.boxes ?? [],
    ui.zoom,
    canvas.width,
    canvas.height,
  );
  renderScene(ctx, canvas.width, canvas.height, ui.map, t, viewport);
  if (telemetryStale(ui, now)) {
    renderDisconnectedOverlay(ctx, canvas.width, canvas.height);
  }

  for (const [preview, rear] of [
    [frontPreview, false],
    [rearPreview, true],
  ] as const) {
    const pctx = preview.getContext("2d")!;
    renderScene(pctx, preview.width, preview.height, ui.map, t, previewViewport(pose, rear));
  }

  syncHud(renderFps);
  syncMenu();
  requestAnimationFrame(frame);
}

syncMenu();
requestAnimationFrame(frame);
