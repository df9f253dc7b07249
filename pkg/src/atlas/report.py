"""Render dataset reports: matplotlib figures plus delimited summaries.

Each report writes a PNG figure and CSV files side by side under the output
directory, so layouts and clusterings can be inspected without the browser
UI: the packed overview with routed hyper-edges, the corpus clusters with
their boundaries, and a flow layout of a chosen subgraph.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection

from .circlepack import ArcSegment, CubicSegment
from .dataset import Dataset, GraphBundle, overview_export
from .flowlayout import SubgraphEdge, edge_points, flow_layout
from .model import Polarity

_POLARITY_COLOR = {
    Polarity.POSITIVE: "#2b6cb0",
    Polarity.NEGATIVE: "#c53030",
    Polarity.UNKNOWN: "#718096",
}

_HUE_CYCLE = (
    "#2b6cb0", "#c05621", "#2f855a", "#6b46c1", "#b83280",
    "#0987a0", "#975a16", "#702459",
)


def _segment_polyline(segment, samples: int = 24) -> list[tuple[float, float]]:
    if isinstance(segment, ArcSegment):
        pts = []
        for i in range(samples + 1):
            angle = segment.start + (segment.end - segment.start) * i / samples
            pts.append(
                (
                    segment.circle.x + segment.circle.r * math.cos(angle),
                    segment.circle.y + segment.circle.r * math.sin(angle),
                )
            )
        return pts
    assert isinstance(segment, CubicSegment)
    p0, c1, c2, p1 = segment.p0, segment.c1, segment.c2, segment.p1
    pts = []
    for i in range(samples + 1):
        t = i / samples
        mt = 1 - t
        x = mt**3 * p0[0] + 3 * mt**2 * t * c1[0] + 3 * mt * t**2 * c2[0] + t**3 * p1[0]
        y = mt**3 * p0[1] + 3 * mt**2 * t * c1[1] + 3 * mt * t**2 * c2[1] + t**3 * p1[1]
        pts.append((x, y))
    return pts


def render_overview(gb: GraphBundle, level: int, out_dir: str | Path) -> list[Path]:
    """Overview figure at one bundling level plus circles/hyper-edges CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    level = max(0, min(level, gb.max_level))

    fig, ax = plt.subplots(figsize=(9, 9))
    for nid in sorted(gb.pack.circles):
        c = gb.pack.circles[nid]
        depth = gb.pack.depth[nid]
        is_leaf = not gb.pack.children[nid]
        ax.add_patch(
            plt.Circle(
                (c.x, c.y),
                c.r,
                fill=is_leaf,
                facecolor="#f6ad55" if is_leaf else "none",
                edgecolor="#2c5282",
                linewidth=max(0.4, 1.6 - 0.35 * depth),
                alpha=0.9 if is_leaf else 0.8,
            )
        )
    lines, alphas = [], []
    for route in gb.routes[level]:
        pts: list[tuple[float, float]] = []
        for seg in route.segments:
            pts.extend(_segment_polyline(seg))
        lines.append(pts)
        alphas.append(0.15 + 0.85 * route.brightness)
    if lines:
        lc = LineCollection(lines, colors=[(0.1, 0.1, 0.25, a) for a in alphas], linewidths=1.0)
        ax.add_collection(lc)
    root = gb.pack.circles[gb.pack.root_id]
    pad = root.r * 1.25
    ax.set_xlim(root.x - pad, root.x + pad)
    ax.set_ylim(root.y - pad, root.y + pad)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(f"{gb.name}: overview, bundling level {level}")
    fig_path = out / f"overview_level{level}.png"
    fig.savefig(fig_path, dpi=150, bbox_inches="tight")
    plt.close(fig)

    circles_path = out / "circles.csv"
    with open(circles_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "depth", "x", "y", "r"])
        for nid in sorted(gb.pack.circles):
            c = gb.pack.circles[nid]
            writer.writerow([nid, gb.pack.depth[nid], f"{c.x:.6f}", f"{c.y:.6f}", f"{c.r:.6f}"])

    hyper_path = out / f"hyperedges_level{level}.csv"
    with open(hyper_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "source_category", "target_category", "count", "brightness"])
        for h, route in zip(gb.bundles[level], gb.routes[level]):
            writer.writerow(
                [h.id, h.source_category, h.target_category, h.count, f"{route.brightness:.6f}"]
            )

    # the layout export in the same shape the overview route serves
    export_path = out / f"overview_level{level}.json"
    export_path.write_text(
        json.dumps(overview_export(gb, level), sort_keys=True), encoding="utf-8"
    )
    return [fig_path, circles_path, hyper_path, export_path]


def render_clusters(dataset: Dataset, out_dir: str | Path) -> list[Path]:
    """Cluster topology figure plus a per-document CSV of coordinates and labels."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tree = dataset.cluster_tree
    coords = dataset.coords

    fig, ax = plt.subplots(figsize=(9, 7))
    fine_of_row: dict[int, int] = {}
    hue_of_fine: dict[int, int] = {}
    if tree is not None:
        for c in tree.fine():
            hue_of_fine[c.id] = c.hue
            for row in c.members:
                fine_of_row[row] = c.id
        for c in tree.clusters:
            poly = dataset.boundaries.get(c.id)
            if poly is None:
                continue
            xs = [v[0] for v in poly.vertices] + [poly.vertices[0][0]]
            ys = [v[1] for v in poly.vertices] + [poly.vertices[0][1]]
            color = _HUE_CYCLE[c.hue % len(_HUE_CYCLE)]
            alpha = 0.25 if c.level == "coarse" else 0.6
            ax.fill(xs, ys, facecolor=color, alpha=alpha * 0.25, edgecolor=color, linewidth=1.2)
    for doc in dataset.corpus.documents:
        cid = fine_of_row.get(doc.row)
        color = (
            "#a0aec0"
            if cid is None
            else _HUE_CYCLE[hue_of_fine[cid] % len(_HUE_CYCLE)]
        )
        ax.plot(coords[doc.row, 0], coords[doc.row, 1], "o", color=color, markersize=3)
    ax.set_title(f"corpus topology: {len(dataset.corpus)} documents")
    ax.set_aspect("equal")
    fig_path = out / "clusters.png"
    fig.savefig(fig_path, dpi=150, bbox_inches="tight")
    plt.close(fig)

    csv_path = out / "clusters.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doi", "x", "y", "cluster", "noise"])
        for doc in dataset.corpus.documents:
            cid = fine_of_row.get(doc.row)
            writer.writerow(
                [
                    doc.doi,
                    f"{coords[doc.row, 0]:.6f}",
                    f"{coords[doc.row, 1]:.6f}",
                    "" if cid is None else cid,
                    "yes" if cid is None else "no",
                ]
            )
    return [fig_path, csv_path]


def render_flow(
    gb: GraphBundle, edge_ids: list[str], out_dir: str | Path, name: str = "flow"
) -> list[Path]:
    """Flow layout figure of a subgraph given by edge ids, plus node/edge CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    edges = []
    nodes: set[str] = set()
    for eid in edge_ids:
        edge = gb.graph.edges[eid]
        edges.append(SubgraphEdge(edge.id, edge.subj, edge.obj))
        nodes.update((edge.subj, edge.obj))
    layout = flow_layout(sorted(nodes), edges, layer_gap=3.0, node_gap=1.0)

    fig, ax = plt.subplots(figsize=(10, 6))
    for e in edges:
        record = gb.graph.edges[e.id]
        pts = edge_points(layout, e)
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, color=_POLARITY_COLOR[record.polarity], linewidth=1.4, zorder=1)
        if record.directed:
            ax.annotate(
                "",
                xy=pts[-1],
                xytext=pts[-2],
                arrowprops={"arrowstyle": "-|>", "color": _POLARITY_COLOR[record.polarity]},
            )
    for nid in sorted(nodes):
        x, y = layout.positions[nid]
        ax.plot(x, y, "o", color="#2d3748", markersize=6, zorder=2)
        ax.annotate(gb.graph.agents[nid].name, (x, y), textcoords="offset points",
                    xytext=(6, 6), fontsize=8)
    ax.set_title(f"{gb.name}: flow layout ({len(nodes)} nodes, crossings {layout.crossings})")
    ax.axis("off")
    fig_path = out / f"{name}.png"
    fig.savefig(fig_path, dpi=150, bbox_inches="tight")
    plt.close(fig)

    nodes_path = out / f"{name}_nodes.csv"
    with open(nodes_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "layer", "x", "y"])
        for nid in sorted(nodes):
            x, y = layout.positions[nid]
            writer.writerow([nid, layout.layer_of[nid], f"{x:.6f}", f"{y:.6f}"])
    edges_path = out / f"{name}_edges.csv"
    with open(edges_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "subj", "obj", "polarity", "curated", "evidence_count", "reversed"])
        for e in edges:
            record = gb.graph.edges[e.id]
            writer.writerow(
                [
                    e.id,
                    record.subj,
                    record.obj,
                    record.polarity.value,
                    record.curated,
                    record.evidence_count,
                    e.id in layout.reversed_edges,
                ]
            )
    return [fig_path, nodes_path, edges_path]


def render_all(dataset: Dataset, out_dir: str | Path, level: int = 1) -> list[Path]:
    """Full report for every graph plus the corpus clusters."""
    out = Path(out_dir)
    written: list[Path] = []
    for gid, gb in sorted(dataset.graphs.items()):
        gdir = out / gid
        written.extend(render_overview(gb, level, gdir))
        # Sample subgraph for the flow report: the best-evidenced edges.
        top_edges = sorted(
            gb.graph.edges.values(), key=lambda e: (-e.evidence_count, e.id)
        )[:12]
        if top_edges:
            written.extend(render_flow(gb, [e.id for e in top_edges], gdir))
    written.extend(render_clusters(dataset, out))
    return written
