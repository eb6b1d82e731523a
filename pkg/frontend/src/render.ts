/**
 * 2D canvas rendering: tile map, construction boxes, vehicle with lamps,
 * LIDAR overlay. Night mode (scene light off) darkens the world and lets
 * the lamps glow on top.
 */

import { Viewport } from "./camera.js";
import { MapFrame, TelemetryFrame, blinkPhaseOn } from "./protocol.js";

const COLORS = {
  lawn: "#3d7a3a",
  road: "#4a4a4f",
  lot: "#5a5a60",
  marking: "#e8e8e8",
  box: "#d07828",
  boxEdge: "#8a4d14",
  body: "#c8352e",
  cabin: "#7fb4d6",
  wheel: "#222",
};

export function vehicleWorldPose(t: TelemetryFrame): { x: number; y: number; yaw: number } {
  return { x: t.ips[0], y: t.ips[1], yaw: t.imu.euler[2] };
}

export function renderScene(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  map: MapFrame | null,
  t: TelemetryFrame | null,
  viewport: Viewport,
): void {
  ctx.save();
  ctx.fillStyle = "#1c2418";
  ctx.fillRect(0, 0, width, height);

  ctx.translate(viewport.anchorX * width, viewport.anchorY * height);
  ctx.scale(viewport.scale, -viewport.scale);
  ctx.rotate(viewport.rotation);
  ctx.translate(-viewport.centerX, -viewport.centerY);

  if (map !== null) {
    drawMap(ctx, map);
    drawBoxes(ctx, map);
  }
  if (t !== null && map !== null) {
    drawLidar(ctx, t);
    drawVehicle(ctx, map, t, /*nightGlow=*/ false);
  }

  if (t !== null && !t.scene_light) {
    // night: darken everything, then repaint the lamps so they glow
    ctx.restore();
    ctx.save();
    ctx.fillStyle = "rgba(4, 6, 18, 0.55)";
    ctx.fillRect(0, 0, width, height);
    ctx.translate(viewport.anchorX * width, viewport.anchorY * height);
    ctx.scale(viewport.scale, -viewport.scale);
    ctx.rotate(viewport.rotation);
    ctx.translate(-viewport.centerX, -viewport.centerY);
    if (map !== null) {
      drawVehicle(ctx, map, t, /*nightGlow=*/ true);
    }
  }
  ctx.restore();
}

export function renderDisconnectedOverlay(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
): void {
  ctx.save();
  ctx.fillStyle = "rgba(0, 0, 0, 0.55)";
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#ff6b6b";
  ctx.font = "bold 28px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.fillText("Disconnected", width / 2, height / 2);
  ctx.restore();
}

// --- map ------------------------------------------------------------------

function drawMap(ctx: CanvasRenderingContext2D, map: MapFrame): void {
  const ts = map.tile_size;
  const rows = map.grid.length;
  for (let r = 0; r < rows; r += 1) {
    for (let c = 0; c < map.grid[r].length; c += 1) {
      const [name, rotStr] = map.grid[r][c].split(":");
      const cx = (c + 0.5) * ts;
      const cy = (rows - r - 0.5) * ts;
      ctx.save();
      ctx.translate(cx, cy);
      drawLawnBase(ctx, ts);
      ctx.rotate(((parseInt(rotStr, 10) || 0) * Math.PI) / 180);
      drawTile(ctx, name, ts);
      ctx.restore();
    }
  }
  if (map.bounds_wall) {
    ctx.strokeStyle = "#888";
    ctx.lineWidth = 0.04;
    ctx.strokeRect(0, 0, map.grid[0].length * ts, rows * ts);
  }
}

function drawLawnBase(ctx: CanvasRenderingContext2D, ts: number): void {
  ctx.fillStyle = COLORS.lawn;
  ctx.fillRect(-ts / 2, -ts / 2, ts, ts);
}

function drawTile(ctx: CanvasRenderingContext2D, name: string, ts: number): void {
  const rw = ts / 3; // road width, two lanes
  const hw = rw / 2;
  switch (name) {
    case "straight":
      band(ctx, hw, -ts / 2, ts / 2);
      laneLines(ctx, hw, -ts / 2, ts / 2);
      break;
    case "dead_end":
      band(ctx, hw, -ts / 2, hw);
      laneLines(ctx, hw, -ts / 2, 0);
      mark(ctx, () => {
        ctx.moveTo(-hw, hw);
        ctx.lineTo(hw, hw);
      });
      break;
    case "curved":
      drawCurve(ctx, ts, hw);
      break;
    case "intersection_3way":
      ctx.save();
      ctx.rotate(-Math.PI / 2); // reuse the vertical band helper for E-W
      band(ctx, hw, -ts / 2, ts / 2);
      ctx.restore();
      band(ctx, hw, -ts / 2, 0);
      stopLine(ctx, hw, -hw);
      break;
    case "intersection_4way":
      band(ctx, hw, -ts / 2, ts / 2);
      ctx.save();
      ctx.rotate(-Math.PI / 2);
      band(ctx, hw, -ts / 2, ts / 2);
      ctx.restore();
      crossing(ctx, hw);
      break;
    case "roadside_parking":
      band(ctx, hw, -ts / 2, ts / 2);
      laneLines(ctx, hw, -ts / 2, ts / 2);
      parkingBays(ctx, ts, hw);
      break;
    case "parking_lot":
      band(ctx, hw, -ts / 2, -ts / 8);
      ctx.fillStyle = COLORS.lot;
      ctx.fillRect(-0.35 * ts, -ts / 8 - 0.05, 0.7 * ts, 0.7 * ts);
      lotBays(ctx, ts);
      break;
    default:
      break; // lawn: base only
  }
}

function band(ctx: CanvasRenderingContext2D, hw: number, y0: number, y1: number): void {
  ctx.fillStyle = COLORS.road;
  ctx.fillRect(-hw, y0, 2 * hw, y1 - y0);
}

function mark(ctx: CanvasRenderingContext2D, path: () => void): void {
  ctx.strokeStyle = COLORS.marking;
  ctx.lineWidth = 0.025;
  ctx.beginPath();
  path();
  ctx.stroke();
}

function laneLines(ctx: CanvasRenderingContext2D, hw: number, y0: number, y1: number): void {
  mark(ctx, () => {
    ctx.moveTo(-hw + 0.02, y0);
    ctx.lineTo(-hw + 0.02, y1);
    ctx.moveTo(hw - 0.02, y0);
    ctx.lineTo(hw - 0.02, y1);
  });
  ctx.save();
  ctx.setLineDash([0.12, 0.12]);
  mark(ctx, () => {
    ctx.moveTo(0, y0);
    ctx.lineTo(0, y1);
  });
  ctx.restore();
}

function drawCurve(ctx: CanvasRenderingContext2D, ts: number, hw: number): void {
  // quarter annulus joining the S and E edges, centered on the SE corner
  const cx = ts / 2;
  const cy = -ts / 2;
  const inner = ts / 2 - hw;
  const outer = ts / 2 + hw;
  ctx.fillStyle = COLORS.road;
  ctx.beginPath();
  ctx.arc(cx, cy, outer, Math.PI / 2, Math.PI);
  ctx.arc(cx, cy, inner, Math.PI, Math.PI / 2, true);
  ctx.closePath();
  ctx.fill();
  mark(ctx, () => {
    ctx.arc(cx, cy, inner + 0.02, Math.PI / 2, Math.PI);
  });
  mark(ctx, () => {
    ctx.arc(cx, cy, outer - 0.02, Math.PI / 2, Math.PI);
  });
  ctx.save();
  ctx.setLineDash([0.12, 0.12]);
  mark(ctx, () => {
    ctx.arc(cx, cy, (inner + outer) / 2, Math.PI / 2, Math.PI);
  });
  ctx.restore();
}

function stopLine(ctx: CanvasRenderingContext2D, hw: number, y: number): void {
  ctx.fillStyle = COLORS.marking;
  ctx.fillRect(0.01, y - 0.05, hw - 0.03, 0.05);
}

function crossing(ctx: CanvasRenderingContext2D, hw: number): void {
  ctx.fillStyle = COLORS.marking;
  for (let i = -3; i <= 3; i += 1) {
    ctx.fillRect(i * 0.12 - 0.04, hw + 0.05, 0.08, 0.18);
    ctx.fillRect(i * 0.12 - 0.04, -hw - 0.23, 0.08, 0.18);
  }
}

function parkingBays(ctx: CanvasRenderingContext2D, ts: number, hw: number): void {
  const depth = 0.22 * ts;
  ctx.fillStyle = COLORS.lot;
  ctx.fillRect(hw, -0.4 * ts, depth, 0.8 * ts);
  mark(ctx, () => {
    for (let i = 0; i <= 3; i += 1) {
      const y = -0.4 * ts + i * (0.8 * ts) / 3;
      ctx.moveTo(hw, y);
      ctx.lineTo(hw + depth, y);
    }
  });
}

function lotBays(ctx: CanvasRenderingContext2D, ts: number): void {
  mark(ctx, () => {
    for (let i = 0; i <= 4; i += 1) {
      const x = -0.3 * ts + i * (0.6 * ts) / 4;
      ctx.moveTo(x, 0.18 * ts);
      ctx.lineTo(x, 0.52 * ts);
    }
  });
}

function drawBoxes(ctx: CanvasRenderingContext2D, map: MapFrame): void {
  for (const box of map.boxes) {
    const h = box.half_extent ?? 0.1;
    ctx.save();
    ctx.translate(box.x, box.y);
    ctx.rotate(box.yaw);
    ctx.fillStyle = COLORS.box;
    ctx.fillRect(-h, -h, 2 * h, 2 * h);
    ctx.strokeStyle = COLORS.boxEdge;
    ctx.lineWidth = 0.02;
    ctx.strokeRect(-h, -h, 2 * h, 2 * h);
    ctx.restore();
  }
}

// --- vehicle ----------------------------------------------------------------

function lamp(ctx: CanvasRenderingContext2D, x: number, y: number, r: number,
              color: string, glow: boolean): void {
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(x, y, r, 0, 2 * Math.PI);
  ctx.fill();
  if (glow) {
    ctx.globalAlpha = 0.25;
    ctx.beginPath();
    ctx.arc(x, y, r * 2.4, 0, 2 * Math.PI);
    ctx.fill();
    ctx.globalAlpha = 1;
  }
}

function drawVehicle(
  ctx: CanvasRenderingContext2D,
  map: MapFrame,
  t: TelemetryFrame,
  nightGlow: boolean,
): void {
  const pose = vehicleWorldPose(t);
  const geom = map.vehicle;
  const halfL = geom.body_length / 2;
  const halfW = geom.body_width / 2;
  ctx.save();
  ctx.translate(pose.x, pose.y);
  ctx.rotate(pose.yaw);
  ctx.translate(geom.wheelbase / 2, 0); // body centered between the axles

  if (!nightGlow) {
    ctx.fillStyle = COLORS.wheel;
    for (const [wx, wy] of [
      [-geom.wheelbase / 2, halfW],
      [-geom.wheelbase / 2, -halfW],
      [geom.wheelbase / 2, halfW],
      [geom.wheelbase / 2, -halfW],
    ]) {
      ctx.fillRect(wx - 0.03, wy - 0.012, 0.06, 0.024);
    }
    ctx.fillStyle = COLORS.body;
    ctx.fillRect(-halfL, -halfW, 2 * halfL, 2 * halfW);
    ctx.fillStyle = COLORS.cabin;
    ctx.fillRect(-halfL * 0.35, -halfW * 0.7, halfL * 0.8, halfW * 1.4);
  }

  const lamps = t.lamps;
  const blinkOn = blinkPhaseOn(t.time);
  const r = 0.018;

  if (lamps.headlights > 0) {
    const bright = lamps.headlights === 2;
    const color = bright ? "#ffffff" : "#ffe9a8";
    lamp(ctx, halfL - 0.01, halfW - 0.03, bright ? r * 1.4 : r, color, true);
    lamp(ctx, halfL - 0.01, -halfW + 0.03, bright ? r * 1.4 : r, color, true);
  }
  if (lamps.taillight > 0) {
    const color = lamps.taillight === 2 ? "#ff2020" : "#a33";
    lamp(ctx, -halfL + 0.01, halfW - 0.03, r, color, lamps.taillight === 2);
    lamp(ctx, -halfL + 0.01, -halfW + 0.03, r, color, false);
  }
  if (lamps.reverse) {
    lamp(ctx, -halfL + 0.01, halfW - 0.06, r * 0.9, "#f4f4f4", true);
    lamp(ctx, -halfL + 0.01, -halfW + 0.06, r * 0.9, "#f4f4f4", true);
  }
  if (lamps.indicators > 0 && blinkOn) {
    const leftOn = lamps.indicators === 1 || lamps.indicators === 3;
    const rightOn = lamps.indicators === 2 || lamps.indicators === 3;
    for (const x of [halfL - 0.01, -halfL + 0.01]) {
      if (leftOn) lamp(ctx, x, halfW - 0.005, r, "#ffb020", true);
      if (rightOn) lamp(ctx, x, -halfW + 0.005, r, "#ffb020", true);
    }
  }
  ctx.restore();
}

function drawLidar(ctx: CanvasRenderingContext2D, t: TelemetryFrame): void {
  const pose = vehicleWorldPose(t);
  const ox = pose.x + 0.15 * Math.cos(pose.yaw);
  const oy = pose.y + 0.15 * Math.sin(pose.yaw);
  ctx.strokeStyle = "rgba(255, 64, 64, 0.25)";
  ctx.fillStyle = "rgba(255, 64, 64, 0.9)";
  ctx.lineWidth = 0.008;
  const ranges = t.lidar.ranges;
  for (let i = 0; i < ranges.length; i += 1) {
    if (ranges[i] >= 12.0) continue;
    const angle = pose.yaw + (i * Math.PI) / 180;
    const hx = ox + ranges[i] * Math.cos(angle);
    const hy = oy + ranges[i] * Math.sin(angle);
    ctx.beginPath();
    ctx.moveTo(ox, oy);
    ctx.lineTo(hx, hy);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(hx, hy, 0.015, 0, 2 * Math.PI);
    ctx.fill();
  }
}
