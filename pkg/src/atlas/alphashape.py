"""Concave cluster boundaries: Delaunay triangulation filtered by circumradius.

Triangulation is incremental Bowyer-Watson under a super-triangle with
insertion order equal to input order. Triangles with circumradius within the
alpha radius are kept; edges on exactly one kept triangle stitch into
counterclockwise polygons. Whenever the filtered shape cannot cover every
input point with simple polygons (including the no-triangle case), the
convex hull is returned instead, so callers always get a covering boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_IN_CIRCLE_EPS = 1e-12
_ON_BOUNDARY_EPS = 1e-9


class DegenerateGeometryError(ValueError):
    """All points coincide or are collinear: no polygon exists."""


@dataclass(frozen=True, slots=True)
class Polygon:
    """Closed simple polygon, counterclockwise, vertices not repeated."""

    vertices: tuple[tuple[float, float], ...]

    def signed_area(self) -> float:
        total = 0.0
        pts = self.vertices
        for i in range(len(pts)):
            x1, y1 = pts[i]
            x2, y2 = pts[(i + 1) % len(pts)]
            total += x1 * y2 - x2 * y1
        return total / 2.0

    def is_simple(self) -> bool:
        pts = self.vertices
        k = len(pts)
        if k < 3:
            return False
        segs = [(pts[i], pts[(i + 1) % k]) for i in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                if j == i + 1 or (i == 0 and j == k - 1):
                    continue  # adjacent segments share a vertex by design
                if _segments_cross(segs[i], segs[j]):
                    return False
        return True


def _segments_cross(s1, s2) -> bool:
    (p1, p2), (p3, p4) = s1, s2

    def orient(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    return False


def point_in_polygon(
    point: tuple[float, float], polygon: Polygon, eps: float = _ON_BOUNDARY_EPS
) -> bool:
    """Inside-or-on test: boundary membership via the signed-area (cross) test."""
    x, y = point
    pts = polygon.vertices
    k = len(pts)
    inside = False
    for i in range(k):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % k]
        # On-segment check with cross-product tolerance.
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) <= eps:
            if min(x1, x2) - eps <= x <= max(x1, x2) + eps and min(y1, y2) - eps <= y <= max(
                y1, y2
            ) + eps:
                return True
        if (y1 > y) != (y2 > y):
            x_at = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < x_at:
                inside = not inside
    return inside


def convex_hull(points: np.ndarray) -> Polygon:
    """Monotone-chain convex hull, counterclockwise."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) < 3:
        raise DegenerateGeometryError("convex hull needs at least 3 distinct points")

    def cross(o, a, b) -> float:
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateGeometryError("points are collinear")
    return Polygon(tuple(hull))


class _Triangulation:
    """Bowyer-Watson state: triangle soup with cached circumcircles."""

    def __init__(self, capacity: int):
        self.v = np.zeros((capacity, 3), dtype=np.int64)
        self.ccx = np.zeros(capacity)
        self.ccy = np.zeros(capacity)
        self.r2 = np.zeros(capacity)
        self.alive = np.zeros(capacity, dtype=bool)
        self.count = 0

    def _grow(self) -> None:
        cap = len(self.alive) * 2
        self.v = np.resize(self.v, (cap, 3))
        self.ccx = np.resize(self.ccx, cap)
        self.ccy = np.resize(self.ccy, cap)
        self.r2 = np.resize(self.r2, cap)
        alive = np.zeros(cap, dtype=bool)
        alive[: self.count] = self.alive[: self.count]
        self.alive = alive

    def add(self, a: int, b: int, c: int, coords: np.ndarray) -> None:
        ax, ay = coords[a]
        bx, by = coords[b]
        cx, cy = coords[c]
        if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) < 0:
            b, c = c, b
            bx, by, cx, cy = cx, cy, bx, by
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if abs(d) < 1e-30:
            ux, uy, r2 = ax, ay, math.inf  # degenerate: swallowed by any insertion
        else:
            a2 = ax * ax + ay * ay
            b2 = bx * bx + by * by
            c2 = cx * cx + cy * cy
            ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
            uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
            r2 = (ux - ax) ** 2 + (uy - ay) ** 2
        if self.count == len(self.alive):
            self._grow()
        i = self.count
        self.v[i] = (a, b, c)
        self.ccx[i] = ux
        self.ccy[i] = uy
        self.r2[i] = r2
        self.alive[i] = True
        self.count += 1

    def bad_triangles(self, x: float, y: float) -> np.ndarray:
        n = self.count
        d2 = (self.ccx[:n] - x) ** 2 + (self.ccy[:n] - y) ** 2
        return np.flatnonzero(self.alive[:n] & (d2 <= self.r2[:n] * (1 + _IN_CIRCLE_EPS)))


def delaunay(points: np.ndarray) -> list[tuple[int, int, int]]:
    """Delaunay triangles over distinct points, as index triples into the input.

    Inserts points in input order (duplicates skipped); raises
    DegenerateGeometryError when fewer than 3 distinct points exist or all
    are collinear.
    """
    pts = np.asarray(points, dtype=np.float64)
    seen: dict[tuple[float, float], int] = {}
    order: list[int] = []
    for i, p in enumerate(pts):
        key = (float(p[0]), float(p[1]))
        if key not in seen:
            seen[key] = i
            order.append(i)
    if len(order) < 3:
        raise DegenerateGeometryError("need at least 3 distinct points")

    xs, ys = pts[order, 0], pts[order, 1]
    cx, cy = float(xs.mean()), float(ys.mean())
    span = max(float(xs.max() - xs.min()), float(ys.max() - ys.min()), 1.0)
    big = 64.0 * span
    n = len(pts)
    coords = np.vstack(
        [pts, [[cx - big, cy - big], [cx + big, cy - big], [cx, cy + big]]]
    )
    s0, s1, s2 = n, n + 1, n + 2

    tri = _Triangulation(capacity=max(16, 8 * len(order)))
    tri.add(s0, s1, s2, coords)

    for idx in order:
        x, y = float(coords[idx, 0]), float(coords[idx, 1])
        bad = tri.bad_triangles(x, y)
        if len(bad) == 0:
            # Numerically outside every circumcircle; cannot happen inside
            # the super-triangle, treat as degenerate.
            raise DegenerateGeometryError("point location failed")
        edge_count: dict[tuple[int, int], tuple[int, int]] = {}
        for t in bad:
            a, b, c = (int(v) for v in tri.v[t])
            for u, w in ((a, b), (b, c), (c, a)):
                key = (u, w) if u < w else (w, u)
                if key in edge_count:
                    edge_count.pop(key)
                else:
                    edge_count[key] = (u, w)
            tri.alive[t] = False
        for u, w in edge_count.values():
            tri.add(u, w, idx, coords)

    result = []
    for t in range(tri.count):
        if not tri.alive[t]:
            continue
        a, b, c = (int(v) for v in tri.v[t])
        if a >= n or b >= n or c >= n:
            continue
        result.append((a, b, c))
    if not result:
        raise DegenerateGeometryError("points are collinear")
    return result


def _circumradius(coords: np.ndarray, t: tuple[int, int, int]) -> float:
    a, b, c = (coords[i] for i in t)
    la = math.dist(a, b)
    lb = math.dist(b, c)
    lc = math.dist(c, a)
    area2 = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    if area2 < 1e-30:
        return math.inf
    return la * lb * lc / (2.0 * area2)


def median_nn_distance(points: np.ndarray) -> float:
    """Median distance from each distinct point to its nearest distinct neighbor."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if len(pts) < 2:
        return 0.0
    d2 = (
        np.sum(pts**2, axis=1)[:, None]
        + np.sum(pts**2, axis=1)[None, :]
        - 2.0 * pts @ pts.T
    )
    np.fill_diagonal(d2, np.inf)
    return float(np.median(np.sqrt(np.maximum(d2.min(axis=1), 0.0))))


def _stitch_boundary(
    coords: np.ndarray, kept: list[tuple[int, int, int]]
) -> list[list[int]] | None:
    """Stitch once-used edges into loops; interior stays on the left.

    Returns None when the walk gets stuck (open chains), which callers treat
    as a fallback trigger.
    """
    boundary: dict[tuple[int, int], int] = {}
    for a, b, c in kept:
        for u, w in ((a, b), (b, c), (c, a)):
            key = (u, w) if u < w else (w, u)
            boundary[key] = boundary.get(key, 0) + 1
    directed: set[tuple[int, int]] = set()
    for a, b, c in kept:
        for u, w in ((a, b), (b, c), (c, a)):
            key = (u, w) if u < w else (w, u)
            if boundary[key] == 1:
                directed.add((u, w))

    outgoing: dict[int, list[int]] = {}
    for u, w in directed:
        outgoing.setdefault(u, []).append(w)
    for lst in outgoing.values():
        lst.sort()

    unused = set(directed)
    loops: list[list[int]] = []
    while unused:
        start = min(unused)
        loop = [start[0]]
        cur = start
        while True:
            unused.discard(cur)
            loop.append(cur[1])
            if cur[1] == start[0]:
                break
            candidates = [w for w in outgoing.get(cur[1], ()) if (cur[1], w) in unused]
            if not candidates:
                return None
            if len(candidates) == 1:
                nxt = candidates[0]
            else:
                # Pinch vertex: take the sharpest left turn to keep the loop simple.
                ux, uy = coords[cur[0]]
                vx, vy = coords[cur[1]]
                back = math.atan2(uy - vy, ux - vx)
                nxt = min(
                    candidates,
                    key=lambda w: (
                        (math.atan2(coords[w][1] - vy, coords[w][0] - vx) - back)
                        % math.tau,
                        w,
                    ),
                )
            cur = (cur[1], nxt)
        loops.append(loop[:-1])
    return loops


def alpha_shape(points: np.ndarray, alpha_radius: float | None = None) -> list[Polygon]:
    """Boundary polygons of a point set at the given alpha radius.

    Keeps Delaunay triangles with circumradius at most ``alpha_radius``
    (default: twice the median nearest-neighbor distance); the boundary is
    the set of edges on exactly one kept triangle, stitched counterclockwise.
    Falls back to the convex hull when no triangle survives or the filtered
    shape fails to cover every point with simple polygons. Raises
    DegenerateGeometryError for collinear input.
    """
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 3:
        raise DegenerateGeometryError("alpha shape needs at least 3 points")
    if alpha_radius is None:
        alpha_radius = 2.0 * median_nn_distance(pts)
    elif alpha_radius <= 0:
        raise ValueError("alpha_radius must be positive")

    triangles = delaunay(pts)  # raises for collinear input
    kept = [t for t in triangles if _circumradius(pts, t) <= alpha_radius]
    if not kept:
        return [convex_hull(pts)]

    covered = set()
    for t in kept:
        covered.update(t)
    distinct = {(float(p[0]), float(p[1])) for p in pts}
    vertex_points = {(float(pts[i][0]), float(pts[i][1])) for i in covered}
    if vertex_points != distinct:
        return [convex_hull(pts)]

    loops = _stitch_boundary(pts, kept)
    if loops is None:
        return [convex_hull(pts)]
    polygons = []
    for loop in loops:
        poly = Polygon(tuple((float(pts[i][0]), float(pts[i][1])) for i in loop))
        if poly.signed_area() <= 0:
            continue  # hole rings are implied by the outer boundary
        if not poly.is_simple():
            return [convex_hull(pts)]
        polygons.append(poly)
    if not polygons:
        return [convex_hull(pts)]
    for p in pts:
        point = (float(p[0]), float(p[1]))
        if not any(point_in_polygon(point, poly) for poly in polygons):
            return [convex_hull(pts)]
    return polygons
