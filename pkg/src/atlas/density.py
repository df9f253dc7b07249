"""Hierarchical density clustering with noise (HDBSCAN procedure).

Pipeline: core distances (distance to the min_samples-th nearest neighbor),
mutual reachability, minimum spanning tree, single-linkage dendrogram,
condensed tree at min_cluster_size, excess-of-mass cluster selection.

Two display levels are distilled from the condensed tree: the selected
clusters themselves ("fine") and their nearest non-root condensed-tree
ancestors ("coarse"; a selected root child is its own coarse cluster).
Fine clusters inherit the hue index of their coarse parent so color is
preserved across levels. The whole computation is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Cluster:
    id: int
    parent: int | None  # coarse record id for fine clusters, None for coarse
    level: str  # "coarse" | "fine"
    members: frozenset[int]  # row indices
    stability: float
    hue: int


@dataclass(frozen=True, slots=True)
class ClusterTree:
    clusters: tuple[Cluster, ...]
    noise: frozenset[int]
    n_points: int

    def fine(self) -> tuple[Cluster, ...]:
        return tuple(c for c in self.clusters if c.level == "fine")

    def coarse(self) -> tuple[Cluster, ...]:
        return tuple(c for c in self.clusters if c.level == "coarse")

    def labels(self) -> np.ndarray:
        """Fine cluster id per row; -1 for noise."""
        out = np.full(self.n_points, -1, dtype=np.int64)
        for c in self.fine():
            for row in c.members:
                out[row] = c.id
        return out


def _core_distances(coords: np.ndarray, min_samples: int) -> np.ndarray:
    n = len(coords)
    k = min(min_samples, n - 1)
    d2 = (
        np.sum(coords**2, axis=1)[:, None]
        + np.sum(coords**2, axis=1)[None, :]
        - 2.0 * coords @ coords.T
    )
    np.maximum(d2, 0.0, out=d2)
    dist = np.sqrt(d2)
    # k-th nearest excluding self: the row includes the zero self-distance.
    part = np.partition(dist, k, axis=1)
    return part[:, k], dist


def _mst(mreach: np.ndarray) -> list[tuple[float, int, int]]:
    """Prim's algorithm over the dense mutual-reachability matrix."""
    n = mreach.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best_from = np.zeros(n, dtype=np.int64)
    edges: list[tuple[float, int, int]] = []
    current = 0
    in_tree[0] = True
    for _ in range(n - 1):
        row = mreach[current]
        update = ~in_tree & (row < best)
        best[update] = row[update]
        best_from[update] = current
        masked = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(masked))
        edges.append((float(best[nxt]), int(best_from[nxt]), nxt))
        in_tree[nxt] = True
        current = nxt
    return edges


@dataclass(slots=True)
class _CondensedNode:
    id: int
    parent: int | None
    birth_lambda: float
    members: set[int]
    children: list[int]
    stability: float = 0.0


def _single_linkage(n: int, edges: list[tuple[float, int, int]]):
    """Merge order as (distance, left cluster, right cluster, new cluster id)."""
    order = sorted(range(len(edges)), key=lambda i: (edges[i][0], i))
    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merges = []
    next_id = n
    for idx in order:
        dist, a, b = edges[idx]
        ra, rb = find(a), find(b)
        parent[ra] = parent[rb] = next_id
        merges.append((dist, ra, rb, next_id))
        next_id += 1
    return merges


def _condense(
    n: int, merges: list[tuple[float, int, int, int]], min_cluster_size: int
) -> dict[int, _CondensedNode]:
    """Condensed tree: clusters persist over lambda; small splits fall out as points."""
    children_of: dict[int, tuple[int, int, float]] = {}
    for dist, a, b, new in merges:
        children_of[new] = (a, b, dist)

    def leaves_under(node: int) -> set[int]:
        stack, out = [node], set()
        while stack:
            cur = stack.pop()
            if cur < n:
                out.add(cur)
            else:
                a, b, _ = children_of[cur]
                stack.extend((a, b))
        return out

    sizes: dict[int, int] = {}

    def size_of(node: int) -> int:
        if node < n:
            return 1
        if node not in sizes:
            a, b, _ = children_of[node]
            sizes[node] = size_of(a) + size_of(b)
        return sizes[node]

    condensed: dict[int, _CondensedNode] = {}
    root_dendro = merges[-1][3] if merges else None
    next_cluster = [0]

    def new_cluster(parent: int | None, birth_lambda: float, members: set[int]) -> int:
        cid = next_cluster[0]
        next_cluster[0] += 1
        condensed[cid] = _CondensedNode(
            id=cid, parent=parent, birth_lambda=birth_lambda, members=members, children=[]
        )
        if parent is not None:
            condensed[parent].children.append(cid)
        return cid

    if root_dendro is None:  # single point: nothing to condense
        new_cluster(None, 0.0, {0} if n == 1 else set())
        return condensed

    root_cid = new_cluster(None, 0.0, leaves_under(root_dendro))

    # Walk the dendrogram top-down. Falling out of cluster `cid` at `lam`
    # accrues (lam - birth) per departing point into the cluster stability.
    stack = [(root_dendro, root_cid)]
    while stack:
        node, cid = stack.pop()
        if node < n:
            continue
        a, b, dist = children_of[node]
        lam = (1.0 / dist) if dist > 0 else np.inf
        size_a, size_b = size_of(a), size_of(b)
        cluster = condensed[cid]
        birth = cluster.birth_lambda
        if size_a >= min_cluster_size and size_b >= min_cluster_size:
            for child in (a, b):
                child_cid = new_cluster(cid, lam, leaves_under(child))
                stack.append((child, child_cid))
            cluster.stability += (lam - birth) * (size_a + size_b)
        elif size_a >= min_cluster_size or size_b >= min_cluster_size:
            keep, drop = (a, b) if size_a >= min_cluster_size else (b, a)
            cluster.stability += (lam - birth) * size_of(drop)
            stack.append((keep, cid))
        else:
            cluster.stability += (lam - birth) * (size_a + size_b)

    return condensed


def _select_eom(condensed: dict[int, _CondensedNode]) -> list[int]:
    """Excess-of-mass selection over non-root condensed clusters."""
    root_id = next(cid for cid, node in condensed.items() if node.parent is None)
    selected = {cid: True for cid in condensed if cid != root_id}
    subtree_stability: dict[int, float] = {}
    # Children always have larger ids than parents (BFS-ish creation order).
    for cid in sorted(condensed, reverse=True):
        node = condensed[cid]
        if cid == root_id:
            continue
        if not node.children:
            subtree_stability[cid] = node.stability
            continue
        child_sum = sum(subtree_stability[ch] for ch in node.children)
        if node.stability >= child_sum:
            subtree_stability[cid] = node.stability
        else:
            subtree_stability[cid] = child_sum
            selected[cid] = False

    # Keep only selected clusters with no selected ancestor.
    chosen: list[int] = []
    for cid in sorted(condensed):
        if cid == root_id or not selected[cid]:
            continue
        ancestor = condensed[cid].parent
        shadowed = False
        while ancestor is not None:
            if ancestor != root_id and selected[ancestor]:
                shadowed = True
                break
            ancestor = condensed[ancestor].parent
        if not shadowed:
            chosen.append(cid)
    return chosen


def cluster(coords: np.ndarray, min_cluster_size: int, min_samples: int) -> ClusterTree:
    """Cluster 2D coordinates into nested density clusters plus noise.

    ``min_cluster_size`` must be at least 2 and at most the number of points;
    ``min_samples`` at least 1 (clamped to n - 1). When the condensed tree has
    no sub-cluster at all, the root is the single fine cluster, so a tight
    blob of exactly ``min_cluster_size`` points forms one cluster, no noise.
    """
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("coords must be an n x 2 array")
    n = len(pts)
    if min_cluster_size < 2:
        raise ValueError("min_cluster_size must be at least 2")
    if min_samples < 1:
        raise ValueError("min_samples must be at least 1")
    if n < min_cluster_size:
        raise ValueError(
            f"need at least min_cluster_size={min_cluster_size} points, got {n}"
        )

    core, dist = _core_distances(pts, min_samples)
    mreach = np.maximum(dist, np.maximum(core[:, None], core[None, :]))
    np.fill_diagonal(mreach, 0.0)
    edges = _mst(mreach)
    merges = _single_linkage(n, edges)
    condensed = _condense(n, merges, min_cluster_size)
    root_id = next(cid for cid, node in condensed.items() if node.parent is None)
    fine_ids = _select_eom(condensed)
    if not fine_ids:
        fine_ids = [root_id]  # no sub-structure: everything is one cluster

    def coarse_of(cid: int) -> int:
        """Nearest non-root condensed ancestor; a root child maps to itself."""
        node = condensed[cid]
        if node.parent is None or node.parent == root_id:
            return cid
        return node.parent

    coarse_ids = sorted({coarse_of(cid) for cid in fine_ids})
    records: list[Cluster] = []
    coarse_record_id: dict[int, int] = {}
    next_id = 0
    for cid in coarse_ids:
        coarse_record_id[cid] = next_id
        records.append(
            Cluster(
                id=next_id,
                parent=None,
                level="coarse",
                members=frozenset(condensed[cid].members),
                stability=float(condensed[cid].stability),
                hue=len(coarse_record_id) - 1,
            )
        )
        next_id += 1
    clustered: set[int] = set()
    for cid in sorted(fine_ids):
        parent_rec = coarse_record_id[coarse_of(cid)]
        members = frozenset(condensed[cid].members)
        clustered |= members
        records.append(
            Cluster(
                id=next_id,
                parent=parent_rec,
                level="fine",
                members=members,
                stability=float(condensed[cid].stability),
                hue=records[parent_rec].hue,
            )
        )
        next_id += 1

    noise = frozenset(range(n)) - clustered
    return ClusterTree(clusters=tuple(records), noise=noise, n_points=n)
