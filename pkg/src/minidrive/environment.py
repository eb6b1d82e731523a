"""Modular tile environment.

Loads the JSON map format, validates connectivity / minimum road curvature /
closed-loop requirements, and provides the collision geometry and ray-cast
queries the rest of the simulator runs against.

Grid convention: row 0 is the northernmost row of the file; world +Y points
north, +X east, so the world position of cell (row, col) has its center at
((col + 0.5) * tile_size, (rows - row - 0.5) * tile_size).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .core import Pose2D, Vec2, VehicleGeometry, rotate


class TileType(str, Enum):
    DEAD_END = "dead_end"
    STRAIGHT = "straight"
    CURVED = "curved"
    INTERSECTION_3WAY = "intersection_3way"
    INTERSECTION_4WAY = "intersection_4way"
    ROADSIDE_PARKING = "roadside_parking"
    PARKING_LOT = "parking_lot"
    LAWN = "lawn"

    @property
    def drivable(self) -> bool:
        return self is not TileType.LAWN


# Edge indices: 0=N, 1=E, 2=S, 3=W. Values are the open road edges of each
# tile in its base (rotation 0) orientation.
EDGE_NAMES = ("N", "E", "S", "W")
_BASE_EDGES: dict[TileType, frozenset[int]] = {
    TileType.DEAD_END: frozenset({2}),
    TileType.STRAIGHT: frozenset({0, 2}),
    TileType.CURVED: frozenset({2, 1}),
    TileType.INTERSECTION_3WAY: frozenset({1, 2, 3}),
    TileType.INTERSECTION_4WAY: frozenset({0, 1, 2, 3}),
    TileType.ROADSIDE_PARKING: frozenset({0, 2}),
    TileType.PARKING_LOT: frozenset({2}),
    TileType.LAWN: frozenset(),
}
# Offsets to the neighbor across each edge, as (drow, dcol).
_EDGE_OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))

VALID_ROTATIONS = (0, 90, 180, 270)

# Roads are one third of the tile edge wide (two lanes); the curved tile is a
# quarter annulus around a tile corner, so the inner-lane centerline radius is
# tile_size/2 - road_width/4 = 5/12 * tile_size.
ROAD_WIDTH_FRACTION = 1.0 / 3.0
MIN_CURVE_RADIUS = 0.6

BOX_FRICTION_DECEL = 3.0  # m/s^2, ground friction on sliding boxes
_PARALLEL_EPS = 1e-15


class MapError(ValueError):
    """Raised when map text fails structural validation."""


@dataclass(frozen=True)
class Tile:
    type: TileType
    rotation: int  # degrees CCW, one of VALID_ROTATIONS

    def open_edges(self) -> frozenset[int]:
        """Edge indices with an open road, after applying the rotation."""
        k = self.rotation // 90
        return frozenset((e - k) % 4 for e in _BASE_EDGES[self.type])


@dataclass
class DynamicBox:
    """Movable construction box with a square footprint."""

    center: Vec2
    yaw: float = 0.0
    half_extent: float = 0.1
    mass: float = 0.25
    velocity: Vec2 = (0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.mass > 0:
            raise ValueError("box mass must be positive")
        if not self.half_extent > 0:
            raise ValueError("box half_extent must be positive")

    def corners(self) -> list[Vec2]:
        h = self.half_extent
        cx, cy = self.center
        out = []
        for lx, ly in ((h, h), (-h, h), (-h, -h), (h, -h)):
            rx, ry = rotate((lx, ly), self.yaw)
            out.append((cx + rx, cy + ry))
        return out


@dataclass
class WorldMap:
    """Tile grid plus dynamic boxes; provides all physics queries."""

    tile_size: float
    grid: list[list[Tile]]
    boxes: list[DynamicBox] = field(default_factory=list)
    bounds_wall: bool = False
    require_loop: bool = False

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def cols(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    @property
    def width(self) -> float:
        return self.cols * self.tile_size

    @property
    def height(self) -> float:
        return self.rows * self.tile_size

    @property
    def road_width(self) -> float:
        return self.tile_size * ROAD_WIDTH_FRACTION

    def tile_center(self, row: int, col: int) -> Vec2:
        return ((col + 0.5) * self.tile_size, (self.rows - row - 0.5) * self.tile_size)

    def wall_segments(self) -> list[tuple[Vec2, Vec2]]:
        if not self.bounds_wall:
            return []
        w, h = self.width, self.height
        return [
            ((0.0, 0.0), (w, 0.0)),
            ((w, 0.0), (w, h)),
            ((w, h), (0.0, h)),
            ((0.0, h), (0.0, 0.0)),
        ]


@dataclass(frozen=True)
class Violation:
    rule: str  # "connectivity" | "curvature" | "loop"
    row: int | None
    col: int | None
    message: str

    def __str__(self) -> str:
        where = f" at ({self.row},{self.col})" if self.row is not None else ""
        return f"{self.rule}{where}: {self.message}"


def _parse_tile(token: str) -> Tile:
    parts = token.split(":")
    if len(parts) != 2:
        raise MapError(f"tile token {token!r} must look like '<type>:<rotation>'")
    name, rot_str = parts
    try:
        tile_type = TileType(name)
    except ValueError:
        raise MapError(f"unknown tile type {name!r}") from None
    try:
        rotation = int(rot_str)
    except ValueError:
        raise MapError(f"rotation {rot_str!r} is not an integer") from None
    if rotation not in VALID_ROTATIONS:
        raise MapError(f"rotation must be one of {VALID_ROTATIONS}, got {rotation}")
    return Tile(tile_type, rotation)


def load_map(text: str) -> WorldMap:
    """Parse map-file contents into a WorldMap; fails atomically on bad input."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapError(f"map is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise MapError("map root must be an object")

    tile_size = data.get("tile_size")
    if not isinstance(tile_size, (int, float)) or not tile_size > 0:
        raise MapError("tile_size must be a positive number")

    raw_grid = data.get("grid")
    if not isinstance(raw_grid, list) or not raw_grid:
        raise MapError("grid must be a non-empty array of rows")
    widths = {len(row) if isinstance(row, list) else -1 for row in raw_grid}
    if len(widths) != 1 or -1 in widths or 0 in widths:
        raise MapError("grid must be rectangular with non-empty rows")
    grid = []
    for row in raw_grid:
        parsed_row = []
        for token in row:
            if not isinstance(token, str):
                raise MapError(f"grid cells must be strings, got {token!r}")
            parsed_row.append(_parse_tile(token))
        grid.append(parsed_row)

    boxes = []
    for entry in data.get("boxes", []):
        if not isinstance(entry, dict):
            raise MapError("boxes entries must be objects")
        try:
            x, y = float(entry["x"]), float(entry["y"])
        except (KeyError, TypeError, ValueError):
            raise MapError(f"box entry {entry!r} needs numeric x and y") from None
        yaw = float(entry.get("yaw", 0.0))
        boxes.append(DynamicBox(center=(x, y), yaw=yaw))

    return WorldMap(
        tile_size=float(tile_size),
        grid=grid,
        boxes=boxes,
        bounds_wall=bool(data.get("bounds_wall", False)),
        require_loop=bool(data.get("require_loop", False)),
    )


def validate(world: WorldMap) -> list[Violation]:
    """Check connectivity, curvature and loop rules; violations are data."""
    violations: list[Violation] = []

    matched_edges: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for r in range(world.rows):
        for c in range(world.cols):
            open_edges = world.grid[r][c].open_edges()
            for edge in sorted(open_edges):
                dr, dc = _EDGE_OFFSETS[edge]
                nr, nc = r + dr, c + dc
                if not (0 <= nr < world.rows and 0 <= nc < world.cols):
                    violations.append(
                        Violation(
                            "connectivity",
                            r,
                            c,
                            f"open {EDGE_NAMES[edge]} edge runs off the map",
                        )
                    )
                    continue
                opposite = (edge + 2) % 4
                if opposite not in world.grid[nr][nc].open_edges():
                    violations.append(
                        Violation(
                            "connectivity",
                            r,
                            c,
                            f"open {EDGE_NAMES[edge]} edge faces a closed edge of "
                            f"({nr},{nc})",
                        )
                    )
                elif edge in (1, 2):  # count each matched pair once
                    matched_edges.append(((r, c), (nr, nc)))

    inner_lane_radius = world.tile_size / 2.0 - world.road_width / 4.0
    if inner_lane_radius < MIN_CURVE_RADIUS - 1e-9:
        for r in range(world.rows):
            for c in range(world.cols):
                if world.grid[r][c].type is TileType.CURVED:
                    violations.append(
                        Violation(
                            "curvature",
                            r,
                            c,
                            f"inner-lane centerline radius {inner_lane_radius:.3f} m "
                            f"is below the {MIN_CURVE_RADIUS} m minimum",
                        )
                    )

    if world.require_loop and not _has_cycle(world, matched_edges):
        violations.append(Violation("loop", None, None, "no closed loop path exists"))

    return violations


def _has_cycle(
    world: WorldMap, edges: list[tuple[tuple[int, int], tuple[int, int]]]
) -> bool:
    # Union-find: an edge joining two already-connected cells closes a loop.
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(a):
        parent.setdefault(a, a)
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        parent[ra] = rb
    return False


@dataclass(frozen=True)
class RayHit:
    range: float
    target: str  # "box" | "wall"


def _scene_segments(world: WorldMap) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """All ray-cast target segments: box edges plus the optional bounds wall.

    Flat tiles are not targets; the LIDAR scan plane sits above the road.
    """
    starts: list[Vec2] = []
    ends: list[Vec2] = []
    kinds: list[str] = []
    for box in world.boxes:
        corners = box.corners()
        for i in range(4):
            starts.append(corners[i])
            ends.append(corners[(i + 1) % 4])
            kinds.append("box")
    for a, b in world.wall_segments():
        starts.append(a)
        ends.append(b)
        kinds.append("wall")
    if not starts:
        return np.empty((0, 2)), np.empty((0, 2)), []
    return np.asarray(starts, dtype=float), np.asarray(ends, dtype=float), kinds


def raycast_batch(
    world: WorldMap,
    origin: Vec2,
    directions: np.ndarray,
    max_range: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Cast N unit rays from one origin against the whole scene.

    Returns (ranges, target_index) arrays of shape (N,); misses carry
    range = inf and target_index = -1. target_index indexes the segment
    list built by _scene_segments.
    """
    p, q = _scene_segments(world)[:2]
    n_rays = directions.shape[0]
    if p.shape[0] == 0:
        return np.full(n_rays, np.inf), np.full(n_rays, -1, dtype=int)

    o = np.asarray(origin, dtype=float)
    d = np.asarray(directions, dtype=float)  # (N, 2)
    s = q - p  # (M, 2)
    w = p - o  # (M, 2)

    # Solve o + t*d = p + u*s per (ray, segment): t = (w x s)/(d x s),
    # u = (w x d)/(d x s), with x the 2D scalar cross product.
    denom = d[:, 0:1] * s[None, :, 1] - d[:, 1:2] * s[None, :, 0]  # (N, M)
    t_num = (w[:, 0] * s[:, 1] - w[:, 1] * s[:, 0])[None, :]  # (1, M)
    u_num = w[None, :, 0] * d[:, 1:2] - w[None, :, 1] * d[:, 0:1]  # (N, M)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        u = u_num / denom
    valid = (
        (np.abs(denom) > _PARALLEL_EPS)
        & (u >= 0.0)
        & (u <= 1.0)
        & (t >= 0.0)
        & (t <= max_range)
    )
    t = np.where(valid, t, np.inf)
    ranges = t.min(axis=1)
    target_index = np.where(np.isfinite(ranges), t.argmin(axis=1), -1)
    return ranges, target_index


def raycast(
    world: WorldMap, origin: Vec2, direction: Vec2, max_range: float
) -> RayHit | None:
    """Nearest scene intersection along one ray, or None on a miss."""
    norm = math.hypot(direction[0], direction[1])
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if not max_range > 0:
        raise ValueError("max_range must be positive")
    ranges, target_index = raycast_batch(
        world, origin, np.asarray([direction], dtype=float), max_range
    )
    if not math.isfinite(ranges[0]):
        return None
    kinds = _scene_segments(world)[2]
    return RayHit(range=float(ranges[0]), target=kinds[int(target_index[0])])


# --- collision resolution -------------------------------------------------


@dataclass(frozen=True)
class OrientedRect:
    center: Vec2
    half_x: float
    half_y: float
    yaw: float

    def axes(self) -> tuple[Vec2, Vec2]:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return (c, s), (-s, c)

    def corners(self) -> list[Vec2]:
        ax, ay = self.axes()
        cx, cy = self.center
        out = []
        for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            out.append(
                (
                    cx + sx * self.half_x * ax[0] + sy * self.half_y * ay[0],
                    cy + sx * self.half_x * ax[1] + sy * self.half_y * ay[1],
                )
            )
        return out


def vehicle_rect(pose: Pose2D, geom: VehicleGeometry) -> OrientedRect:
    """Vehicle body rectangle, centered midway between the axles."""
    hx, hy = pose.heading()
    mid = 0.5 * geom.wheelbase
    return OrientedRect(
        center=(pose.x + mid * hx, pose.y + mid * hy),
        half_x=0.5 * geom.body_length,
        half_y=0.5 * geom.body_width,
        yaw=pose.yaw,
    )


def _box_rect(box: DynamicBox) -> OrientedRect:
    return OrientedRect(box.center, box.half_extent, box.half_extent, box.yaw)


def rect_overlap(a: OrientedRect, b: OrientedRect) -> tuple[float, Vec2] | None:
    """SAT minimum translation vector.

    Returns (depth, normal) with the normal pointing from b toward a (push a
    along +normal to separate), or None when already separated.
    """
    axes = a.axes() + b.axes()
    dx = a.center[0] - b.center[0]
    dy = a.center[1] - b.center[1]
    best_depth = math.inf
    best_normal: Vec2 = (0.0, 0.0)
    a_ax, a_ay = a.axes()
    b_ax, b_ay = b.axes()
    for nx, ny in axes:
        ra = a.half_x * abs(nx * a_ax[0] + ny * a_ax[1]) + a.half_y * abs(
            nx * a_ay[0] + ny * a_ay[1]
        )
        rb = b.half_x * abs(nx * b_ax[0] + ny * b_ax[1]) + b.half_y * abs(
            nx * b_ay[0] + ny * b_ay[1]
        )
        dist = dx * nx + dy * ny
        depth = ra + rb - abs(dist)
        if depth <= 0.0:
            return None
        if depth < best_depth:
            best_depth = depth
            best_normal = (nx, ny) if dist >= 0.0 else (-nx, -ny)
    return best_depth, best_normal


@dataclass
class _Body:
    rect: OrientedRect
    velocity: Vec2
    inv_mass: float
    # set while resting against a wall so pair resolution treats the body as
    # immovable; otherwise wall + pair corrections cancel and converge slowly
    pinned: bool = False

    @property
    def effective_inv_mass(self) -> float:
        return 0.0 if self.pinned else self.inv_mass


@dataclass
class CollisionResult:
    displacement: Vec2
    velocity: Vec2
    contact: bool
    boxes: list[DynamicBox]


def _separate(a: _Body, b: _Body, depth: float, normal: Vec2) -> None:
    # Positional split by inverse mass plus restitution-0 normal velocity
    # transfer; normal points from b toward a.
    total = a.effective_inv_mass + b.effective_inv_mass
    if total == 0.0:
        return
    wa = a.effective_inv_mass / total
    wb = b.effective_inv_mass / total
    nx, ny = normal
    a.rect = replace(
        a.rect, center=(a.rect.center[0] + nx * depth * wa, a.rect.center[1] + ny * depth * wa)
    )
    b.rect = replace(
        b.rect, center=(b.rect.center[0] - nx * depth * wb, b.rect.center[1] - ny * depth * wb)
    )
    rel = (a.velocity[0] - b.velocity[0]) * nx + (a.velocity[1] - b.velocity[1]) * ny
    if rel < 0.0:
        a.velocity = (a.velocity[0] - rel * wa * nx, a.velocity[1] - rel * wa * ny)
        b.velocity = (b.velocity[0] + rel * wb * nx, b.velocity[1] + rel * wb * ny)


def _wall_push(body: _Body, world: WorldMap) -> float:
    """Project a body back inside the bounds wall; returns max penetration."""
    xs = [c[0] for c in body.rect.corners()]
    ys = [c[1] for c in body.rect.corners()]
    push_x = max(0.0, -min(xs)) - max(0.0, max(xs) - world.width)
    push_y = max(0.0, -min(ys)) - max(0.0, max(ys) - world.height)
    if push_x == 0.0 and push_y == 0.0:
        return 0.0
    cx, cy = body.rect.center
    body.rect = replace(body.rect, center=(cx + push_x, cy + push_y))
    vx, vy = body.velocity
    if push_x > 0.0:
        vx = max(vx, 0.0)
    elif push_x < 0.0:
        vx = min(vx, 0.0)
    if push_y > 0.0:
        vy = max(vy, 0.0)
    elif push_y < 0.0:
        vy = min(vy, 0.0)
    body.velocity = (vx, vy)
    return max(abs(push_x), abs(push_y))


def resolve_collisions(
    world: WorldMap,
    vehicle_body: OrientedRect,
    vehicle_velocity: Vec2,
    dt: float,
    vehicle_mass: float = 2.0,
    max_passes: int = 10,
) -> CollisionResult:
    """Integrate boxes one step and resolve every overlap in the scene.

    Walls are immovable; vehicle-box and box-box contacts are split by
    inverse mass with restitution 0. Mutates world.boxes in place and also
    returns them.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")

    boxes: list[_Body] = []
    for box in world.boxes:
        vx, vy = box.velocity
        speed = math.hypot(vx, vy)
        if speed > 0.0:
            new_speed = max(0.0, speed - BOX_FRICTION_DECEL * dt)
            scale = new_speed / speed if speed else 0.0
            vx, vy = vx * scale, vy * scale
        center = (box.center[0] + vx * dt, box.center[1] + vy * dt)
        boxes.append(_Body(replace(_box_rect(box), center=center), (vx, vy), 1.0 / box.mass))

    vehicle = _Body(vehicle_body, vehicle_velocity, 1.0 / vehicle_mass)
    contact = False

    for _ in range(max_passes):
        worst = 0.0
        for body in boxes:
            hit = rect_overlap(vehicle.rect, body.rect)
            if hit is not None:
                depth, normal = hit
                worst = max(worst, depth)
                contact = True
                _separate(vehicle, body, depth, normal)
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                hit = rect_overlap(boxes[i].rect, boxes[j].rect)
                if hit is not None:
                    depth, normal = hit
                    worst = max(worst, depth)
                    _separate(boxes[i], boxes[j], depth, normal)
        if world.bounds_wall:
            for body in boxes:
                pushed = _wall_push(body, world)
                body.pinned = pushed > 0.0
                worst = max(worst, pushed)
            pushed = _wall_push(vehicle, world)
            if pushed > 0.0:
                contact = True
                worst = max(worst, pushed)
        if worst < 1e-7:
            break

    for box, body in zip(world.boxes, boxes):
        box.center = body.rect.center
        box.velocity = body.velocity

    displacement = (
        vehicle.rect.center[0] - vehicle_body.center[0],
        vehicle.rect.center[1] - vehicle_body.center[1],
    )
    return CollisionResult(
        displacement=displacement,
        velocity=vehicle.velocity,
        contact=contact,
        boxes=world.boxes,
    )
