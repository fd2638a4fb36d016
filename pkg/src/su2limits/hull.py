"""Planar convex hulls and the variance-plane projection they are built in."""

import math

import numpy as np

# orthonormal basis of the plane x + y + z = const; (E1, E2, (1,1,1)/sqrt 3) is right-handed
E1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
E2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6)
DIAGONAL = np.ones(3) / math.sqrt(3)


def to_plane(points):
    """In-plane coordinates (u, v) of variance triplets, shape (..., 2)."""
    p = np.asarray(points, dtype=float)
    return np.stack([p @ E1, p @ E2], axis=-1)


def from_plane(uv, trace):
    """Triplets with in-plane coordinates ``uv`` on the plane of the given trace."""
    uv = np.asarray(uv, dtype=float).reshape(-1, 2)
    return trace / 3.0 * np.ones((len(uv), 3)) + uv[:, :1] * E1 + uv[:, 1:] * E2


def _discard_interior(pts, n_directions=64):
    # Akl-Toussaint: points strictly inside the polygon of directional extremes
    # can never be hull vertices
    ang = 2 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    extremes = pts[np.unique(np.argmax(pts @ dirs.T, axis=0))]
    poly = _monotone_chain(extremes)
    if len(poly) < 3:
        return pts
    a = poly
    b = np.roll(poly, -1, axis=0)
    edge = b - a
    rel_x = pts[:, None, 0] - a[None, :, 0]
    rel_y = pts[:, None, 1] - a[None, :, 1]
    cross = edge[None, :, 0] * rel_y - edge[None, :, 1] * rel_x
    scale = np.abs(pts).max() ** 2
    strictly_inside = np.all(cross > 1e-12 * scale, axis=1)
    return pts[~strictly_inside]


def convex_hull(points):
    """Monotone-chain hull; returns the vertices counterclockwise, collinear points dropped."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return pts
    for n_dir in (16, 64):
        if len(pts) > 256:
            pts = _discard_interior(pts, n_dir)
    return _monotone_chain(pts)


def _monotone_chain(pts):
    # near-duplicates (permutations of nearly degenerate triplets) give cross
    # products of random sign; snap to a relative 1e-12 grid first
    step = 1e-12 * max(float(np.abs(pts).max()), 1e-300)
    pts = np.round(pts / step) * step
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(np.diff(pts, axis=0) != 0, axis=1)
    pts = [tuple(p) for p in pts[keep]]
    if len(pts) < 3:
        return np.array(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _segment_distance(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + t * ab)))


def signed_distance(point, hull):
    """Distance from ``point`` to a CCW hull polygon: positive outside, negative inside."""
    p = np.asarray(point, dtype=float)
    h = np.asarray(hull, dtype=float)
    if len(h) == 1:
        return float(np.linalg.norm(p - h[0]))
    edges = [(h[i], h[(i + 1) % len(h)]) for i in range(len(h))]
    dist = min(_segment_distance(p, a, b) for a, b in edges)
    if len(h) < 3:
        return dist
    inside = all((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0 for a, b in edges)
    return -dist if inside else dist


def ccw_order(points3d):
    """Sort variance triplets counterclockwise about the (1,1,1) axis."""
    pts = np.asarray(points3d, dtype=float)
    uv = to_plane(pts - pts.mean(axis=0))
    order = np.argsort(np.arctan2(uv[:, 1], uv[:, 0]), kind="stable")
    return pts[order]
