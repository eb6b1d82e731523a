"""Shared test oracles, deliberately independent of the production code paths."""

from __future__ import annotations

import math

import numpy as np


def fit_circle(points) -> tuple[tuple[float, float], float]:
    """Least-squares (Kasa) circle fit; returns ((cx, cy), radius)."""
    pts = np.asarray(points, dtype=float)
    a = np.column_stack([2.0 * pts[:, 0], 2.0 * pts[:, 1], np.ones(len(pts))])
    b = (pts**2).sum(axis=1)
    (cx, cy, c), *_ = np.linalg.lstsq(a, b, rcond=None)
    return (float(cx), float(cy)), math.sqrt(c + cx * cx + cy * cy)


def oracle_ray_hit(origin, direction, seg_a, seg_b, max_range) -> float | None:
    """Ray/segment distance via the two-line determinant form.

    Different algebra from the production solver on purpose: build both
    infinite lines in ax + by = c form, intersect, then bounds-check.
    """
    p1 = origin
    p2 = (origin[0] + direction[0], origin[1] + direction[1])
    a1, b1 = p2[1] - p1[1], p1[0] - p2[0]
    c1 = a1 * p1[0] + b1 * p1[1]
    a2, b2 = seg_b[1] - seg_a[1], seg_a[0] - seg_b[0]
    c2 = a2 * seg_a[0] + b2 * seg_a[1]
    det = a1 * b2 - a2 * b1
    if abs(det) < 1e-15:
        return None
    x = (b2 * c1 - b1 * c2) / det
    y = (a1 * c2 - a2 * c1) / det
    if not (min(seg_a[0], seg_b[0]) - 1e-12 <= x <= max(seg_a[0], seg_b[0]) + 1e-12):
        return None
    if not (min(seg_a[1], seg_b[1]) - 1e-12 <= y <= max(seg_a[1], seg_b[1]) + 1e-12):
        return None
    t = (x - origin[0]) * direction[0] + (y - origin[1]) * direction[1]
    if t < 0.0 or t > max_range:
        return None
    return t


def oracle_scene_ranges(origin, directions, segments, max_range) -> list[float]:
    """Brute force: nearest oracle hit per ray over every segment."""
    out = []
    for d in directions:
        best = math.inf
        for seg_a, seg_b in segments:
            t = oracle_ray_hit(origin, d, seg_a, seg_b, max_range)
            if t is not None and t < best:
                best = t
        out.append(best)
    return out


def box_segments(center, half_extent, yaw) -> list[tuple[tuple, tuple]]:
    """Edges of a square box, built with an explicit corner rotation."""
    c, s = math.cos(yaw), math.sin(yaw)
    corners = []
    for lx, ly in ((half_extent, half_extent), (-half_extent, half_extent),
                   (-half_extent, -half_extent), (half_extent, -half_extent)):
        corners.append((center[0] + c * lx - s * ly, center[1] + s * lx + c * ly))
    return [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
