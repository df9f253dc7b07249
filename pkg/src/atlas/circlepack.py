"""Hierarchical circle packing, smallest enclosing circle, and ring routing.

The overview layout packs each ontology node's children with a front-chain
sweep (largest circle first), wraps the result in the smallest enclosing
circle plus padding, and recurses bottom-up. Hyper-edge routes leave the
source group at the angle facing the target, ride the parent rings, and
bridge between rings with a single cubic.

All functions are pure and deterministic for identical inputs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .ingest import HyperEdge
from .model import AssembledGraph, OntologyNode


@dataclass(frozen=True, slots=True)
class Circle:
    x: float
    y: float
    r: float


class _C:
    """Mutable circle used while packing."""

    __slots__ = ("x", "y", "r", "id")

    def __init__(self, r: float, cid: str = ""):
        self.x = 0.0
        self.y = 0.0
        self.r = r
        self.id = cid


class _Node:
    __slots__ = ("c", "next", "previous")

    def __init__(self, c: _C):
        self.c = c
        self.next: _Node | None = None
        self.previous: _Node | None = None


def _place(b: _C, a: _C, c: _C) -> None:
    """Position c tangent to circles b and a."""
    dx = b.x - a.x
    dy = b.y - a.y
    d2 = dx * dx + dy * dy
    if d2:
        a2 = a.r + c.r
        a2 *= a2
        b2 = b.r + c.r
        b2 *= b2
        if a2 > b2:
            x = (d2 + b2 - a2) / (2 * d2)
            y = math.sqrt(max(0.0, b2 / d2 - x * x))
            c.x = b.x - x * dx - y * dy
            c.y = b.y - x * dy + y * dx
        else:
            x = (d2 + a2 - b2) / (2 * d2)
            y = math.sqrt(max(0.0, a2 / d2 - x * x))
            c.x = a.x + x * dx - y * dy
            c.y = a.y + x * dy + y * dx
    else:
        c.x = a.x + a.r + c.r
        c.y = a.y


def _intersects(a: _C, b: _C) -> bool:
    dr = a.r + b.r - 1e-6
    dx = b.x - a.x
    dy = b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _score(node: _Node) -> float:
    a = node.c
    b = node.next.c
    ab = a.r + b.r
    dx = (a.x * b.r + b.x * a.r) / ab
    dy = (a.y * b.r + b.y * a.r) / ab
    return dx * dx + dy * dy


def _pack_siblings(circles: list[_C]) -> _C:
    """Front-chain packing; mutates circle positions and returns the enclosure.

    Circles must already be in placement order (decreasing radius here).
    """
    n = len(circles)
    if n == 0:
        raise ValueError("cannot pack zero circles")
    a = circles[0]
    a.x = a.y = 0.0
    if n > 1:
        b = circles[1]
        a.x = -b.r
        b.x = a.r
        b.y = 0.0
    if n > 2:
        c = circles[2]
        _place(b, a, c)
        na, nb, nc = _Node(a), _Node(b), _Node(c)
        na.next = nc.previous = nb
        nb.next = na.previous = nc
        nc.next = nb.previous = na
        a_node, b_node = na, nb

        i = 3
        while i < n:
            cc = circles[i]
            _place(a_node.c, b_node.c, cc)
            c_node = _Node(cc)

            # Find the closest intersecting circle on the front chain, scanning
            # outward from the insertion point in both directions.
            j = b_node.next
            k = a_node.previous
            sj = b_node.c.r
            sk = a_node.c.r
            retry = False
            while True:
                if sj <= sk:
                    if _intersects(j.c, c_node.c):
                        b_node = j
                        a_node.next = b_node
                        b_node.previous = a_node
                        retry = True
                        break
                    sj += j.c.r
                    j = j.next
                else:
                    if _intersects(k.c, c_node.c):
                        a_node = k
                        a_node.next = b_node
                        b_node.previous = a_node
                        retry = True
                        break
                    sk += k.c.r
                    k = k.previous
                if j is k.next:
                    break
            if retry:
                continue

            # Success: insert c between a and b on the chain.
            c_node.previous = a_node
            c_node.next = b_node
            a_node.next = b_node.previous = c_node
            b_node = c_node

            # Rescan for the chain pair closest to the origin.
            aa = _score(a_node)
            cur = c_node.next
            while cur is not b_node:
                ca = _score(cur)
                if ca < aa:
                    a_node = cur
                    aa = ca
                cur = cur.next
            b_node = a_node.next
            i += 1

    enclosure = _enclose(circles)
    for circ in circles:
        circ.x -= enclosure.x
        circ.y -= enclosure.y
    return _C(enclosure.r)


# --- smallest enclosing circle of circles (randomized incremental) ---


def _encloses_not(a: _C, b: _C) -> bool:
    dr = a.r - b.r
    dx = b.x - a.x
    dy = b.y - a.y
    return dr < 0 or dr * dr < dx * dx + dy * dy


def _encloses_weak(a: _C, b: _C) -> bool:
    dr = a.r - b.r + max(a.r, b.r, 1.0) * 1e-9
    dx = b.x - a.x
    dy = b.y - a.y
    return dr > 0 and dr * dr > dx * dx + dy * dy


def _encloses_weak_all(a: _C, basis: list[_C]) -> bool:
    return all(_encloses_weak(a, b) for b in basis)


def _basis_1(a: _C) -> _C:
    e = _C(a.r)
    e.x, e.y = a.x, a.y
    return e


def _basis_2(a: _C, b: _C) -> _C:
    x21 = b.x - a.x
    y21 = b.y - a.y
    r21 = b.r - a.r
    length = math.sqrt(x21 * x21 + y21 * y21)
    e = _C((length + a.r + b.r) / 2)
    e.x = (a.x + b.x + x21 / length * r21) / 2 if length else a.x
    e.y = (a.y + b.y + y21 / length * r21) / 2 if length else a.y
    if not length:
        e.r = max(a.r, b.r)
    return e


def _basis_3(a: _C, b: _C, c: _C) -> _C:
    # Solve for the circle internally tangent to all three: subtracting the
    # tangency equations pairwise gives two linear relations in (x, y, r);
    # substituting back yields a quadratic in r.
    a2 = a.x - b.x
    a3 = a.x - c.x
    b2 = a.y - b.y
    b3 = a.y - c.y
    c2 = b.r - a.r
    c3 = c.r - a.r
    d1 = a.x * a.x + a.y * a.y - a.r * a.r
    d2 = d1 - b.x * b.x - b.y * b.y + b.r * b.r
    d3 = d1 - c.x * c.x - c.y * c.y + c.r * c.r
    ab = a3 * b2 - a2 * b3
    xa = (b2 * d3 - b3 * d2) / (ab * 2) - a.x
    xb = (b3 * c2 - b2 * c3) / ab
    ya = (a3 * d2 - a2 * d3) / (ab * 2) - a.y
    yb = (a2 * c3 - a3 * c2) / ab
    qa = xb * xb + yb * yb - 1
    qb = 2 * (a.r + xa * xb + ya * yb)
    qc = xa * xa + ya * ya - a.r * a.r
    if abs(qa) > 1e-6:
        r = -(qb + math.sqrt(max(0.0, qb * qb - 4 * qa * qc))) / (2 * qa)
    else:
        r = -qc / qb
    e = _C(r)
    e.x = a.x + xa + xb * r
    e.y = a.y + ya + yb * r
    return e


def _enclose_basis(basis: list[_C]) -> _C:
    if len(basis) == 1:
        return _basis_1(basis[0])
    if len(basis) == 2:
        return _basis_2(basis[0], basis[1])
    return _basis_3(basis[0], basis[1], basis[2])


def _extend_basis(basis: list[_C], p: _C) -> list[_C]:
    if _encloses_weak_all(p, basis):
        return [p]
    for i in range(len(basis)):
        if _encloses_not(p, basis[i]) and _encloses_weak_all(_basis_2(basis[i], p), basis):
            return [basis[i], p]
    for i in range(len(basis) - 1):
        for j in range(i + 1, len(basis)):
            bi, bj = basis[i], basis[j]
            if (
                _encloses_not(_basis_2(bi, bj), p)
                and _encloses_not(_basis_2(bi, p), bj)
                and _encloses_not(_basis_2(bj, p), bi)
                and _encloses_weak_all(_basis_3(bi, bj, p), basis)
            ):
                return [bi, bj, p]
    raise RuntimeError("enclosing basis construction failed")


_SHUFFLE_SEED = 0x5EED


def _enclose(circles: list[_C]) -> _C:
    shuffled = list(circles)
    random.Random(_SHUFFLE_SEED).shuffle(shuffled)
    basis: list[_C] = []
    e: _C | None = None
    i = 0
    while i < len(shuffled):
        p = shuffled[i]
        if e is not None and _encloses_weak(e, p):
            i += 1
        else:
            basis = _extend_basis(basis, p)
            e = _enclose_basis(basis)
            i = 0
    assert e is not None
    return e


def min_enclosing_circle(circles: list[Circle]) -> Circle:
    """Smallest circle containing every input circle entirely.

    Exact for up to three support circles; randomized incremental with a
    deterministic seeded shuffle. An empty input is a precondition error.
    """
    if not circles:
        raise ValueError("min_enclosing_circle requires at least one circle")
    work = []
    for c in circles:
        mc = _C(c.r)
        mc.x, mc.y = c.x, c.y
        work.append(mc)
    e = _enclose(work)
    return Circle(e.x, e.y, e.r)


# --- hierarchical packing over the ontology ---


@dataclass(frozen=True, slots=True)
class CirclePack:
    """Packed geometry for every ontology node, root centered at the origin."""

    circles: dict[str, Circle]
    parent: dict[str, str | None]
    children: dict[str, tuple[str, ...]]
    depth: dict[str, int]
    root_id: str

    def max_depth(self) -> int:
        return max(self.depth.values())


def leaf_weights(graph: AssembledGraph, mode: str = "degree") -> dict[str, float]:
    """Weight per leaf category: 1 + undirected degree summed over member agents.

    ``uniform`` mode gives every leaf weight 1. Empty leaves get weight 1.
    """
    if mode not in ("uniform", "degree"):
        raise ValueError(f"unknown leaf weight mode {mode!r}")
    weights: dict[str, float] = {}
    for node in graph.ontology.walk():
        if not node.is_leaf:
            continue
        if mode == "uniform" or not node.member_agents:
            weights[node.id] = 1.0
        else:
            weights[node.id] = float(
                sum(1 + graph.degree(aid) for aid in node.member_agents)
            )
    return weights


def pack(
    ontology: OntologyNode,
    weights: dict[str, float] | None = None,
    padding: float | None = None,
    base: float = 1.0,
) -> CirclePack:
    """Pack the ontology tree bottom-up into nested circles.

    Leaf radius is ``base * sqrt(weight)``; siblings are placed by front-chain
    packing in decreasing-radius order (ties by id ascending); each parent is
    the smallest enclosing circle of its children inflated by ``padding``
    (default: 2% of the enclosing radius with a floor of one layout unit).
    """
    rel: dict[str, tuple[float, float]] = {}
    radius: dict[str, float] = {}

    def pack_node(node: OntologyNode) -> float:
        if node.is_leaf:
            w = 1.0 if weights is None else weights.get(node.id, 1.0)
            if w <= 0:
                raise ValueError(f"leaf weight must be positive for {node.id!r}")
            radius[node.id] = base * math.sqrt(w)
            return radius[node.id]
        for child in node.children:
            pack_node(child)
        kids = sorted(node.children, key=lambda ch: (-radius[ch.id], ch.id))
        work = [_C(radius[child.id], child.id) for child in kids]
        enclosure = _pack_siblings(work)
        for mc in work:
            rel[mc.id] = (mc.x, mc.y)
        pad = padding if padding is not None else max(0.02 * enclosure.r, 1.0)
        radius[node.id] = enclosure.r + pad
        return radius[node.id]

    pack_node(ontology)

    circles: dict[str, Circle] = {}
    parent: dict[str, str | None] = {}
    children: dict[str, tuple[str, ...]] = {}
    depth: dict[str, int] = {}

    def position(node: OntologyNode, cx: float, cy: float, par: str | None, d: int) -> None:
        circles[node.id] = Circle(cx, cy, radius[node.id])
        parent[node.id] = par
        children[node.id] = tuple(ch.id for ch in node.children)
        depth[node.id] = d
        for child in node.children:
            dx, dy = rel[child.id]
            position(child, cx + dx, cy + dy, node.id, d + 1)

    position(ontology, 0.0, 0.0, None, 0)
    return CirclePack(
        circles=circles,
        parent=parent,
        children=children,
        depth=depth,
        root_id=ontology.id,
    )


# --- hyper-edge routing ---


@dataclass(frozen=True, slots=True)
class ArcSegment:
    circle: Circle
    start: float  # radians
    end: float
    ccw: bool

    def start_point(self) -> tuple[float, float]:
        return _on_circle(self.circle, self.start)

    def end_point(self) -> tuple[float, float]:
        return _on_circle(self.circle, self.end)

    def as_dict(self) -> dict:
        return {
            "kind": "arc",
            "cx": self.circle.x,
            "cy": self.circle.y,
            "r": self.circle.r,
            "start": self.start,
            "end": self.end,
            "ccw": self.ccw,
        }


@dataclass(frozen=True, slots=True)
class CubicSegment:
    p0: tuple[float, float]
    c1: tuple[float, float]
    c2: tuple[float, float]
    p1: tuple[float, float]

    def start_point(self) -> tuple[float, float]:
        return self.p0

    def end_point(self) -> tuple[float, float]:
        return self.p1

    def as_dict(self) -> dict:
        return {
            "kind": "cubic",
            "p0": list(self.p0),
            "c1": list(self.c1),
            "c2": list(self.c2),
            "p1": list(self.p1),
        }


Segment = ArcSegment | CubicSegment


@dataclass(frozen=True, slots=True)
class RoutedPath:
    hyper_edge: str
    segments: tuple[Segment, ...]
    brightness: float


def _on_circle(c: Circle, angle: float) -> tuple[float, float]:
    return (c.x + c.r * math.cos(angle), c.y + c.r * math.sin(angle))


def _angle_from(c: Circle, point: tuple[float, float]) -> float:
    return math.atan2(point[1] - c.y, point[0] - c.x)


def _short_arc(circle: Circle, start: float, target: float) -> ArcSegment:
    """Arc from start toward target angle, at most pi radians, ties CCW."""
    delta = math.remainder(target - start, math.tau)
    if abs(abs(delta) - math.pi) < 1e-12:
        delta = math.pi  # tie: counterclockwise
    return ArcSegment(circle=circle, start=start, end=start + delta, ccw=delta >= 0)


def _line_cubic(p0: tuple[float, float], p1: tuple[float, float]) -> CubicSegment:
    c1 = (p0[0] + (p1[0] - p0[0]) / 3, p0[1] + (p1[1] - p0[1]) / 3)
    c2 = (p0[0] + 2 * (p1[0] - p0[0]) / 3, p0[1] + 2 * (p1[1] - p0[1]) / 3)
    return CubicSegment(p0, c1, c2, p1)


_BRIDGE_FLARE = 1.35  # radial factor pushing bridge controls outside the rings
_LOOP_EXIT = 2.0  # fixed angles for self-bundle loops, radians
_LOOP_ENTRY = 1.0


def route_hyper_edge(
    hyper_edge: HyperEdge, pack_: CirclePack, max_count: int | None = None
) -> RoutedPath:
    """Route one bundle: boundary exit, parent-ring arcs, one bridging cubic.

    The first point lies on the source group's circle, the last on the
    target's, and consecutive segments share endpoints exactly.
    """
    src_id = hyper_edge.source_category
    dst_id = hyper_edge.target_category
    if src_id not in pack_.circles:
        raise KeyError(f"unknown category {src_id!r}")
    if dst_id not in pack_.circles:
        raise KeyError(f"unknown category {dst_id!r}")
    brightness = bundle_brightness(
        hyper_edge.count, hyper_edge.count if max_count is None else max_count
    )
    src = pack_.circles[src_id]
    dst = pack_.circles[dst_id]

    if src_id == dst_id:
        p0 = _on_circle(src, _LOOP_EXIT)
        p1 = _on_circle(src, _LOOP_ENTRY)
        c1 = (src.x + _BRIDGE_FLARE * (p0[0] - src.x), src.y + _BRIDGE_FLARE * (p0[1] - src.y))
        c2 = (src.x + _BRIDGE_FLARE * (p1[0] - src.x), src.y + _BRIDGE_FLARE * (p1[1] - src.y))
        return RoutedPath(
            hyper_edge=hyper_edge.id,
            segments=(CubicSegment(p0, c1, c2, p1),),
            brightness=brightness,
        )

    src_ring = pack_.circles[pack_.parent[src_id] or src_id]
    dst_ring = pack_.circles[pack_.parent[dst_id] or dst_id]

    # Exit the source group facing the target, then climb onto the parent ring.
    exit_angle = math.atan2(dst.y - src.y, dst.x - src.x)
    p0 = _on_circle(src, exit_angle)
    q0 = _on_circle(src_ring, _angle_from(src_ring, p0))
    segments: list[Segment] = [_line_cubic(p0, q0)]

    # Ride the source ring toward the target direction.
    toward_dst = math.atan2(dst.y - src_ring.y, dst.x - src_ring.x)
    arc_out = _short_arc(src_ring, _angle_from(src_ring, q0), toward_dst)
    segments.append(arc_out)
    q1 = arc_out.end_point()

    # Bridge between the two rings with controls pushed radially outward.
    r1 = _on_circle(dst_ring, _angle_from(dst_ring, q1))
    c1 = (
        src_ring.x + _BRIDGE_FLARE * (q1[0] - src_ring.x),
        src_ring.y + _BRIDGE_FLARE * (q1[1] - src_ring.y),
    )
    c2 = (
        dst_ring.x + _BRIDGE_FLARE * (r1[0] - dst_ring.x),
        dst_ring.y + _BRIDGE_FLARE * (r1[1] - dst_ring.y),
    )
    segments.append(CubicSegment(q1, c1, c2, r1))

    # Ride the target ring, then descend to the entry point facing the source.
    entry_angle = math.atan2(src.y - dst.y, src.x - dst.x)
    p1 = _on_circle(dst, entry_angle)
    arc_in = _short_arc(dst_ring, _angle_from(dst_ring, r1), _angle_from(dst_ring, p1))
    segments.append(arc_in)
    segments.append(_line_cubic(arc_in.end_point(), p1))

    return RoutedPath(
        hyper_edge=hyper_edge.id, segments=tuple(segments), brightness=brightness
    )


def bundle_brightness(count: int, max_count: int) -> float:
    """ln(1 + count) / ln(1 + max_count), mapping bundle size to [0, 1]."""
    if count < 1 or max_count < 1:
        raise ValueError("count and max_count must be positive")
    if count > max_count:
        raise ValueError(f"count {count} exceeds max_count {max_count}")
    return math.log1p(count) / math.log1p(max_count)


def lod_depth(zoom_scale: float, pack_: CirclePack, threshold_px: float = 50.0) -> set[str]:
    """Visible ontology node ids at a zoom level.

    A node disclosed (projected radius >= threshold) contributes its children
    to the visible set and recurses; undisclosed frontier nodes stay as-is.
    The root is always visible.
    """
    if zoom_scale <= 0:
        raise ValueError("zoom_scale must be positive")
    if threshold_px <= 0:
        raise ValueError("threshold_px must be positive")
    visible: set[str] = set()

    def visit(node_id: str) -> None:
        visible.add(node_id)
        circle = pack_.circles[node_id]
        if circle.r * zoom_scale >= threshold_px:
            for child in pack_.children[node_id]:
                visit(child)

    visit(pack_.root_id)
    return visible
