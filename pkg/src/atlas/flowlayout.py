"""Layered left-to-right flow layout for extracted subgraphs.

Phases:
  1. Cycle removal (greedy sink/source peeling, then best out-in delta)
  2. Longest-path layering
  3. Dummy insertion for edges spanning multiple layers
  4. Crossing minimization (barycenter sweeps, best ordering kept)
  5. Coordinates (x from layer, y from slot plus one median-alignment pass)

Undirected edges are oriented subject -> object up front and participate
like any other edge. The whole pipeline is pure and deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SubgraphEdge:
    """Minimal edge view the layout needs: id plus stored orientation."""

    id: str
    subj: str
    obj: str


@dataclass(frozen=True, slots=True)
class FlowLayout:
    positions: dict[str, tuple[float, float]]
    layer_of: dict[str, int]
    reversed_edges: frozenset[str]
    dummy_chains: dict[str, tuple[tuple[float, float], ...]]
    crossings: int


def remove_cycles(nodes: list[str], edges: list[SubgraphEdge]) -> set[str]:
    """Edge ids to treat as reversed so the remaining orientation is acyclic.

    Greedy ordering: repeatedly peel sinks (to the tail) and sources (to the
    head); when neither exists, take the node maximizing out-degree minus
    in-degree, ties by node id ascending. Edges pointing backwards in the
    resulting order are reversed.
    """
    if not nodes:
        raise ValueError("subgraph must be nonempty")
    out_deg = {n: 0 for n in nodes}
    in_deg = {n: 0 for n in nodes}
    succs: dict[str, list[str]] = {n: [] for n in nodes}
    preds: dict[str, list[str]] = {n: [] for n in nodes}
    for e in edges:
        out_deg[e.subj] += 1
        in_deg[e.obj] += 1
        succs[e.subj].append(e.obj)
        preds[e.obj].append(e.subj)

    active = set(nodes)
    head: list[str] = []
    tail: list[str] = []

    def drop(node: str) -> None:
        active.remove(node)
        for s in succs[node]:
            if s in active:
                in_deg[s] -= 1
        for p in preds[node]:
            if p in active:
                out_deg[p] -= 1

    while active:
        changed = True
        while changed:
            changed = False
            sinks = sorted(n for n in active if out_deg[n] == 0)
            for n in sinks:
                drop(n)
                tail.append(n)
                changed = True
            sources = sorted(n for n in active if in_deg[n] == 0)
            for n in sources:
                drop(n)
                head.append(n)
                changed = True
        if active:
            best = min(active, key=lambda n: (-(out_deg[n] - in_deg[n]), n))
            drop(best)
            head.append(best)

    order = head + list(reversed(tail))
    position = {n: i for i, n in enumerate(order)}
    return {e.id for e in edges if position[e.subj] > position[e.obj]}


def layer(nodes: list[str], edges: list[SubgraphEdge]) -> dict[str, int]:
    """Longest-path layering of an acyclic orientation.

    Sources sit at layer 0; every other node at 1 + max over predecessors,
    so some incoming edge of each non-source spans exactly one layer.
    Raises ValueError on cyclic input.
    """
    in_deg = {n: 0 for n in nodes}
    succs: dict[str, list[str]] = {n: [] for n in nodes}
    for e in edges:
        in_deg[e.obj] += 1
        succs[e.subj].append(e.obj)
    layers = {n: 0 for n in nodes}
    ready = sorted(n for n in nodes if in_deg[n] == 0)
    seen = 0
    while ready:
        node = ready.pop()
        seen += 1
        for s in succs[node]:
            if layers[s] < layers[node] + 1:
                layers[s] = layers[node] + 1
            in_deg[s] -= 1
            if in_deg[s] == 0:
                ready.append(s)
    if seen != len(nodes):
        raise ValueError("layering requires an acyclic graph")
    return layers


# Dummy node ids join the owning edge id with a NUL so they can never
# collide with real node ids.
_DUMMY_SEP = chr(0)


@dataclass(frozen=True, slots=True)
class _LayeredGraph:
    """Layered graph after dummy insertion; adjacency between adjacent layers."""

    orderings: tuple[tuple[str, ...], ...]
    up_neighbors: dict[str, tuple[str, ...]]  # node -> neighbors one layer left
    down_neighbors: dict[str, tuple[str, ...]]  # node -> neighbors one layer right
    dummy_of: dict[str, tuple[str, ...]]  # edge id -> dummy node ids, in span order
    layer_of: dict[str, int]


def _insert_dummies(
    nodes: list[str], edges: list[SubgraphEdge], layers: dict[str, int]
) -> _LayeredGraph:
    layer_of = dict(layers)
    up: dict[str, list[str]] = {n: [] for n in nodes}
    down: dict[str, list[str]] = {n: [] for n in nodes}
    dummy_of: dict[str, tuple[str, ...]] = {}
    for e in edges:
        lu, lv = layer_of[e.subj], layer_of[e.obj]
        span = lv - lu
        if span <= 1:
            down[e.subj].append(e.obj)
            up[e.obj].append(e.subj)
            continue
        chain = []
        prev = e.subj
        for step in range(1, span):
            dummy = e.id + _DUMMY_SEP + str(step)
            layer_of[dummy] = lu + step
            up[dummy] = [prev]
            down[dummy] = []
            down[prev].append(dummy)
            chain.append(dummy)
            prev = dummy
        down[prev].append(e.obj)
        up[e.obj].append(prev)
        dummy_of[e.id] = tuple(chain)

    n_layers = max(layer_of.values()) + 1 if layer_of else 0
    per_layer: list[list[str]] = [[] for _ in range(n_layers)]
    for node, l in layer_of.items():
        per_layer[l].append(node)
    for slot in per_layer:
        slot.sort()  # initial order: node id ascending
    return _LayeredGraph(
        orderings=tuple(tuple(slot) for slot in per_layer),
        up_neighbors={k: tuple(v) for k, v in up.items()},
        down_neighbors={k: tuple(v) for k, v in down.items()},
        dummy_of=dummy_of,
        layer_of=layer_of,
    )


def _count_crossings(orderings: list[list[str]], lg: _LayeredGraph) -> int:
    total = 0
    for idx in range(len(orderings) - 1):
        right_pos = {n: i for i, n in enumerate(orderings[idx + 1])}
        ends: list[int] = []
        for node in orderings[idx]:
            targets = sorted(right_pos[t] for t in lg.down_neighbors.get(node, ()))
            ends.extend(targets)
        # inversion count of the target-position sequence
        for i in range(len(ends)):
            for j in range(i + 1, len(ends)):
                if ends[i] > ends[j]:
                    total += 1
    return total


def _barycenter_pass(
    orderings: list[list[str]], lg: _LayeredGraph, downward: bool
) -> None:
    rng = (
        range(1, len(orderings))
        if downward
        else range(len(orderings) - 2, -1, -1)
    )
    for idx in rng:
        ref = orderings[idx - 1] if downward else orderings[idx + 1]
        ref_pos = {n: i for i, n in enumerate(ref)}
        neigh = lg.up_neighbors if downward else lg.down_neighbors
        cur_pos = {n: i for i, n in enumerate(orderings[idx])}

        def key(node: str) -> float:
            ns = neigh.get(node, ())
            if not ns:
                return float(cur_pos[node])  # keep relative position
            return sum(ref_pos[v] for v in ns) / len(ns)

        orderings[idx].sort(key=key)  # stable: ties keep current order


def order(
    nodes: list[str], edges: list[SubgraphEdge], layers: dict[str, int]
) -> tuple[list[list[str]], _LayeredGraph, int]:
    """Crossing-minimizing per-layer orderings after dummy insertion.

    Runs barycenter sweeps (down then up) for at most 8 iterations, keeping
    the best ordering seen; never returns more crossings than the initial
    id-ascending ordering.
    """
    lg = _insert_dummies(nodes, edges, layers)
    orderings = [list(slot) for slot in lg.orderings]
    best = [list(slot) for slot in orderings]
    best_crossings = _count_crossings(orderings, lg)
    for _ in range(8):
        before = [list(slot) for slot in orderings]
        for downward in (True, False):
            _barycenter_pass(orderings, lg, downward=downward)
            crossings = _count_crossings(orderings, lg)
            if crossings < best_crossings:
                best_crossings = crossings
                best = [list(slot) for slot in orderings]
        if orderings == before:  # fixed point: further sweeps cannot improve
            break
    return best, lg, best_crossings


def flow_layout(
    nodes: list[str],
    edges: list[SubgraphEdge],
    layer_gap: float = 1.0,
    node_gap: float = 1.0,
) -> FlowLayout:
    """Full pipeline: cycle removal, layering, ordering, coordinates.

    Reversed edge ids are reported so callers can draw original arrow
    directions; dummy chain positions are listed from the original subject
    toward the original object.
    """
    if not nodes:
        raise ValueError("subgraph must be nonempty")
    if layer_gap <= 0 or node_gap <= 0:
        raise ValueError("gaps must be positive")
    reversed_ids = remove_cycles(nodes, edges)
    oriented = [
        SubgraphEdge(e.id, e.obj, e.subj) if e.id in reversed_ids else e for e in edges
    ]
    # Self-referential after reversal is impossible here: assembly rejects loops.
    layers = layer(nodes, oriented)
    orderings, lg, crossings = order(nodes, oriented, layers)

    ys: dict[str, float] = {}
    for slot_list in orderings:
        for slot, node in enumerate(slot_list):
            ys[node] = slot * node_gap

    # One median-alignment pass, left to right, preserving slot order.
    for idx in range(1, len(orderings)):
        desired: dict[str, float] = {}
        for node in orderings[idx]:
            neigh = lg.up_neighbors.get(node, ())
            if neigh:
                vals = sorted(ys[v] for v in neigh)
                mid = len(vals) // 2
                desired[node] = (
                    vals[mid]
                    if len(vals) % 2 == 1
                    else (vals[mid - 1] + vals[mid]) / 2
                )
            else:
                desired[node] = ys[node]
        floor = None
        for node in orderings[idx]:
            y = desired[node]
            if floor is not None and y < floor + node_gap:
                y = floor + node_gap
            ys[node] = y
            floor = y

    positions: dict[str, tuple[float, float]] = {}
    for node in nodes:
        positions[node] = (lg.layer_of[node] * layer_gap, ys[node])

    dummy_chains: dict[str, tuple[tuple[float, float], ...]] = {}
    for edge_id, chain in lg.dummy_of.items():
        pts = tuple((lg.layer_of[d] * layer_gap, ys[d]) for d in chain)
        if edge_id in reversed_ids:
            pts = tuple(reversed(pts))  # report from original subject to object
        dummy_chains[edge_id] = pts

    return FlowLayout(
        positions=positions,
        layer_of={n: lg.layer_of[n] for n in nodes},
        reversed_edges=frozenset(reversed_ids),
        dummy_chains=dummy_chains,
        crossings=crossings,
    )


def edge_points(
    layout: FlowLayout, edge: SubgraphEdge
) -> list[tuple[float, float]]:
    """Polyline for an edge in original direction: subject, dummies, object."""
    return [
        layout.positions[edge.subj],
        *layout.dummy_chains.get(edge.id, ()),
        layout.positions[edge.obj],
    ]
