"""Dataset loading and precomputation.

Loading parses and assembles every manifest graph, packs its ontology,
bundles edges at every ontology level and routes the bundles, clusters the
corpus, and builds the DOI inverse index. Everything is computed before the
dataset is handed out, deterministically, and the result is immutable; a
version hash over the serialized precomputation lets clients detect dataset
changes.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import circlepack
from .circlepack import CirclePack, RoutedPath, lod_depth, route_hyper_edge
from .corpus import (
    CorpusIndex,
    build_doi_index,
    cluster_boundary,
    parse_documents,
)
from .density import ClusterTree, cluster
from .ingest import (
    HyperEdge,
    bundle,
    parse_agents,
    parse_statements,
    read_embeddings,
)
from .ingest import assemble
from .model import AssembledGraph
from .projection import DegenerateInputError, project_2d
from .queries import QueryEngine


class DatasetError(Exception):
    """Dataset directory is malformed; the message names the offending file."""


@dataclass(frozen=True, slots=True)
class LoadOptions:
    min_belief: float = 0.0
    alpha_radius: float | None = None
    min_cluster_size: int = 25
    min_samples: int = 5
    lod_threshold_px: float = 50.0
    leaf_weight_mode: str = "degree"


@dataclass(frozen=True, slots=True)
class GraphBundle:
    """One loaded graph with its precomputed layout artifacts."""

    graph: AssembledGraph
    name: str
    engine: QueryEngine
    pack: CirclePack
    bundles: dict[int, list[HyperEdge]]
    routes: dict[int, list[RoutedPath]]

    @property
    def max_level(self) -> int:
        return max(self.bundles)


@dataclass(frozen=True, slots=True)
class Dataset:
    name: str
    path: Path
    options: LoadOptions
    graphs: dict[str, GraphBundle]
    corpus: CorpusIndex
    coords: np.ndarray
    cluster_tree: ClusterTree | None
    boundaries: dict[int, object]
    doi_index: dict[str, list[tuple[str, list[str]]]]
    version_hash: str = field(default="", compare=False)


def _require(path: Path, base: Path) -> Path:
    if not path.is_file():
        raise DatasetError(f"missing file: {path.relative_to(base)}")
    return path


def load_dataset(directory: str | Path, options: LoadOptions | None = None) -> Dataset:
    """Load a dataset directory and run all precomputation."""
    base = Path(directory)
    options = options or LoadOptions()
    if not base.is_dir():
        raise DatasetError(f"not a dataset directory: {base}")
    manifest_path = base / "manifest.json"
    if not manifest_path.is_file():
        raise DatasetError("missing file: manifest.json")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DatasetError(f"manifest.json: {exc.msg}") from exc

    graphs: dict[str, GraphBundle] = {}
    for entry in manifest.get("graphs", []):
        gid = entry["id"]
        gdir = base / "graphs" / gid
        agents_path = _require(gdir / "agents.jsonl", base)
        statements_path = _require(gdir / "statements.jsonl", base)
        with open(agents_path, "rb") as fh:
            agents = parse_agents(fh)
        with open(statements_path, "rb") as fh:
            statements = parse_statements(fh)
        declared = entry.get("counts")
        if declared:
            if declared.get("agents") not in (None, len(agents)):
                raise DatasetError(
                    f"{gid}: manifest declares {declared['agents']} agents, "
                    f"file has {len(agents)}"
                )
            if declared.get("statements") not in (None, len(statements)):
                raise DatasetError(
                    f"{gid}: manifest declares {declared['statements']} statements, "
                    f"file has {len(statements)}"
                )
        if options.min_belief > 0.0:
            statements = [s for s in statements if s.belief >= options.min_belief]
        graph = assemble(statements, agents, graph_id=gid)
        if declared and declared.get("edges") not in (None, len(graph.edges)):
            raise DatasetError(
                f"{gid}: manifest declares {declared['edges']} edges, "
                f"assembly produced {len(graph.edges)}"
            )
        weights = circlepack.leaf_weights(graph, options.leaf_weight_mode)
        pack = circlepack.pack(graph.ontology, weights)
        bundles: dict[int, list[HyperEdge]] = {}
        routes: dict[int, list[RoutedPath]] = {}
        for level in range(pack.max_depth() + 1):
            level_bundles = bundle(graph, level)
            bundles[level] = level_bundles
            max_count = max((h.count for h in level_bundles), default=1)
            routes[level] = [
                route_hyper_edge(h, pack, max_count=max_count) for h in level_bundles
            ]
        graphs[gid] = GraphBundle(
            graph=graph,
            name=entry.get("name", gid),
            engine=QueryEngine(graph),
            pack=pack,
            bundles=bundles,
            routes=routes,
        )

    corpus_cfg = manifest.get("corpus", {})
    documents_path = _require(base / corpus_cfg.get("documents", "corpus/documents.jsonl"), base)
    embeddings_path = _require(base / corpus_cfg.get("embeddings", "corpus/embeddings.bin"), base)
    with open(documents_path, "rb") as fh:
        documents = parse_documents(fh)
    embeddings = read_embeddings(embeddings_path)
    if len(embeddings) != len(documents):
        raise DatasetError(
            f"embedding count {len(embeddings)} != document count {len(documents)}"
        )
    corpus = CorpusIndex(documents, embeddings)

    coords_rel = corpus_cfg.get("coords")
    if coords_rel and (base / coords_rel).is_file():
        coords = read_embeddings(base / coords_rel).astype(np.float64)
        if coords.shape != (len(documents), 2):
            raise DatasetError(f"{coords_rel}: expected {len(documents)} x 2 coordinates")
    elif len(documents) >= 2 and embeddings.shape[1] >= 2:
        try:
            coords = project_2d(embeddings)
        except DegenerateInputError:
            coords = np.zeros((len(documents), 2))
    else:
        coords = np.zeros((len(documents), 2))

    tree: ClusterTree | None = None
    boundaries: dict[int, object] = {}
    if len(documents) >= 2:
        mcs = max(2, min(options.min_cluster_size, len(documents)))
        ms = max(1, min(options.min_samples, len(documents) - 1))
        tree = cluster(coords, min_cluster_size=mcs, min_samples=ms)
        for c in tree.clusters:
            member_coords = coords[sorted(c.members)]
            boundaries[c.id] = cluster_boundary(member_coords, options.alpha_radius)

    doi_index = build_doi_index({gid: gb.graph for gid, gb in graphs.items()})

    dataset = Dataset(
        name=manifest.get("name", base.name),
        path=base,
        options=options,
        graphs=graphs,
        corpus=corpus,
        coords=coords,
        cluster_tree=tree,
        boundaries=boundaries,
        doi_index=doi_index,
    )
    digest = hashlib.sha256(serialize_precomputation(dataset)).hexdigest()
    object.__setattr__(dataset, "version_hash", digest)
    return dataset


def overview_export(gb: GraphBundle, depth: int, lod_threshold_px: float | None = None) -> dict:
    """Depth-sliced overview: circles to ``depth`` plus hyper-edges at that level."""
    level = max(0, min(depth, gb.max_level))
    circles = [
        {
            "id": nid,
            "x": gb.pack.circles[nid].x,
            "y": gb.pack.circles[nid].y,
            "r": gb.pack.circles[nid].r,
            "depth": gb.pack.depth[nid],
        }
        for nid in sorted(gb.pack.circles)
        if gb.pack.depth[nid] <= level
    ]
    hyper = []
    for h, route in zip(gb.bundles[level], gb.routes[level]):
        hyper.append(
            {
                "id": h.id,
                "level": h.level,
                "src": h.source_category,
                "dst": h.target_category,
                "count": h.count,
                "brightness": route.brightness,
                "segments": [seg.as_dict() for seg in route.segments],
            }
        )
    return {"circles": circles, "hyperEdges": hyper}


def visible_nodes(gb: GraphBundle, zoom_scale: float, threshold_px: float) -> set[str]:
    return lod_depth(zoom_scale, gb.pack, threshold_px)


def serialize_precomputation(dataset: Dataset) -> bytes:
    """Canonical bytes of everything derived at load, for change detection.

    Loading the same directory twice yields identical bytes.
    """
    doc: dict = {"name": dataset.name, "graphs": {}, "corpus": {}}
    for gid in sorted(dataset.graphs):
        gb = dataset.graphs[gid]
        doc["graphs"][gid] = {
            "agents": len(gb.graph.agents),
            "edges": len(gb.graph.edges),
            "circles": [
                [nid, c.x, c.y, c.r]
                for nid, c in sorted(gb.pack.circles.items())
            ],
            "bundles": {
                str(level): [[h.id, h.count] for h in hs]
                for level, hs in sorted(gb.bundles.items())
            },
        }
    doc["corpus"]["documents"] = len(dataset.corpus)
    doc["corpus"]["coords"] = [[float(x), float(y)] for x, y in dataset.coords]
    if dataset.cluster_tree is not None:
        doc["corpus"]["clusters"] = [
            {
                "id": c.id,
                "parent": c.parent,
                "level": c.level,
                "members": sorted(c.members),
                "stability": c.stability,
                "hue": c.hue,
            }
            for c in dataset.cluster_tree.clusters
        ]
        doc["corpus"]["noise"] = sorted(dataset.cluster_tree.noise)
        doc["corpus"]["boundaries"] = {
            str(cid): list(map(list, poly.vertices)) if poly else None
            for cid, poly in sorted(dataset.boundaries.items())
        }
    doc["doi_index"] = {
        doi: links for doi, links in sorted(dataset.doi_index.items())
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
