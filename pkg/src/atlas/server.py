"""Stateless JSON API over a loaded dataset.

All routes live under /api and only read the immutable dataset, so request
handling is safe to parallelize. Every response carries an
``X-Dataset-Version`` header for client cache coherence. Query chains
arrive whole per request and are re-evaluated from the full graph.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .corpus import SearchFacets, UnknownDocumentError, cluster_export
from .dataset import Dataset, GraphBundle, overview_export
from .flowlayout import SubgraphEdge, edge_points, flow_layout
from .queries import (
    QueryParseError,
    UnknownEntityError,
    parse_query,
    result_to_dict,
)

DEFAULT_NEIGHBOR_K = 5


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(dataset: Dataset) -> FastAPI:
    app = FastAPI(title="atlas", docs_url=None, redoc_url=None)

    @app.middleware("http")
    async def version_header(request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Dataset-Version"] = dataset.version_hash
        return response

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        return _error(exc.status_code, str(exc.detail))

    @app.exception_handler(QueryParseError)
    async def parse_error(request: Request, exc: QueryParseError):
        return _error(400, str(exc))

    @app.exception_handler(UnknownEntityError)
    async def unknown_entity(request: Request, exc: UnknownEntityError):
        return _error(404, str(exc))

    @app.exception_handler(UnknownDocumentError)
    async def unknown_document(request: Request, exc: UnknownDocumentError):
        return _error(404, f"unknown document {exc.args[0]!r}")

    @app.exception_handler(ValueError)
    async def bad_value(request: Request, exc: ValueError):
        return _error(400, str(exc))

    def graph_or_404(graph_id: str) -> GraphBundle:
        gb = dataset.graphs.get(graph_id)
        if gb is None:
            raise StarletteHTTPException(status_code=404, detail=f"unknown graph {graph_id!r}")
        return gb

    @app.get("/api/graphs")
    def list_graphs():
        return [
            {
                "id": gid,
                "name": gb.name,
                "nodes": len(gb.graph.agents),
                "edges": len(gb.graph.edges),
                "maxDepth": gb.max_level,
            }
            for gid, gb in sorted(dataset.graphs.items())
        ]

    @app.get("/api/graphs/{graph_id}/overview")
    def overview(graph_id: str, depth: int = Query(default=1, ge=0)):
        gb = graph_or_404(graph_id)
        # plain JSONResponse: skips the framework encoder on large payloads
        return JSONResponse(overview_export(gb, depth))

    @app.post("/api/graphs/{graph_id}/query")
    async def run_query(graph_id: str, request: Request):
        gb = graph_or_404(graph_id)
        body = await request.body()
        chain = parse_query(body.decode("utf-8"))
        result = gb.engine.run_chain(chain)
        return JSONResponse(result_to_dict(result))

    @app.get("/api/graphs/{graph_id}/nodes/{node_id}")
    def node_info(
        graph_id: str,
        node_id: str,
        direction: str = Query(default="out", pattern="^(in|out)$"),
        subgraph: str = Query(default=""),
    ):
        gb = graph_or_404(graph_id)
        agent = gb.graph.agents.get(node_id)
        if agent is None:
            raise UnknownEntityError(f"unknown agent id {node_id!r}")
        from .queries import Subgraph

        edge_ids = frozenset(e for e in subgraph.split(",") if e)
        current = Subgraph(nodes=frozenset(), edges=edge_ids)
        suggestions = gb.engine.suggest_neighbors(
            current, node_id, "outgoing" if direction == "out" else "incoming"
        )
        return {
            "id": agent.id,
            "name": agent.name,
            "category": agent.category_path,
            "description": agent.description,
            "degree": gb.graph.degree(node_id),
            "in_degree": gb.graph.in_degree(node_id),
            "out_degree": gb.graph.out_degree(node_id),
            "suggestions": [
                {
                    "edge": s.edge_id,
                    "neighbor": {
                        "id": s.neighbor,
                        "name": gb.graph.agents[s.neighbor].name,
                    },
                    "polarity": s.polarity.value,
                    "evidence_count": s.evidence_count,
                    "curated": s.curated,
                    "directed": s.directed,
                }
                for s in suggestions
            ],
        }

    @app.get("/api/graphs/{graph_id}/edges/{edge_id:path}/evidence")
    def edge_evidence(graph_id: str, edge_id: str):
        gb = graph_or_404(graph_id)
        edge = gb.graph.edges.get(edge_id)
        if edge is None:
            raise UnknownEntityError(f"unknown edge id {edge_id!r}")
        items = []
        for ev in edge.evidence:
            doc = dataset.corpus.by_doi.get(ev.doi)
            neighbors: list[str] = []
            if doc is not None and len(dataset.corpus) > 1:
                k = min(DEFAULT_NEIGHBOR_K, len(dataset.corpus) - 1)
                neighbors = [d.doi for d, _ in dataset.corpus.semantic_neighbors(ev.doi, k)]
            items.append(
                {
                    "text": ev.text,
                    "doi": ev.doi,
                    "source": ev.source,
                    "document": doc.as_dict() if doc is not None else None,
                    "neighbors": neighbors,
                }
            )
        return items

    @app.post("/api/graphs/{graph_id}/layout")
    async def layout(graph_id: str, request: Request):
        gb = graph_or_404(graph_id)
        try:
            body = json.loads((await request.body()).decode("utf-8"))
        except json.JSONDecodeError as exc:
            raise QueryParseError(f"malformed JSON: {exc.msg}") from exc
        if not isinstance(body, dict):
            raise QueryParseError("layout body must be an object")
        node_ids = body.get("nodes") or []
        edge_ids = body.get("edges") or []
        for nid in node_ids:
            if nid not in gb.graph.agents:
                raise UnknownEntityError(f"unknown agent id {nid!r}")
        edges = []
        nodes = set(node_ids)
        for eid in edge_ids:
            edge = gb.graph.edges.get(eid)
            if edge is None:
                raise UnknownEntityError(f"unknown edge id {eid!r}")
            nodes.add(edge.subj)
            nodes.add(edge.obj)
            edges.append(SubgraphEdge(edge.id, edge.subj, edge.obj))
        if not nodes:
            raise QueryParseError("layout requires at least one node or edge")
        result = flow_layout(sorted(nodes), edges, layer_gap=160.0, node_gap=60.0)
        return {
            "nodes": [
                {
                    "id": nid,
                    "layer": result.layer_of[nid],
                    "x": result.positions[nid][0],
                    "y": result.positions[nid][1],
                }
                for nid in sorted(nodes)
            ],
            "edges": [
                {
                    "id": e.id,
                    "points": [list(p) for p in edge_points(result, e)],
                    "reversed": e.id in result.reversed_edges,
                }
                for e in edges
            ],
            "crossings": result.crossings,
        }

    @app.get("/api/corpus/documents")
    def search_documents(
        text: str | None = None,
        author: str | None = None,
        publisher: str | None = None,
        year_min: int | None = None,
        year_max: int | None = None,
        has_figures: bool | None = None,
        has_tables: bool | None = None,
        entity: str | None = None,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50),
    ):
        facets = SearchFacets(
            text=text,
            author=author,
            publisher=publisher,
            year_min=year_min,
            year_max=year_max,
            has_figures=has_figures,
            has_tables=has_tables,
            entity=entity,
        )
        result = dataset.corpus.search(facets, page=page, page_size=page_size)
        return {
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
            "documents": [d.as_dict() for d in result.documents],
        }

    @app.get("/api/corpus/clusters")
    def clusters(level: str | None = Query(default=None, pattern="^(coarse|fine)$")):
        if dataset.cluster_tree is None:
            return {"points": [], "clusters": [], "noise": []}
        return cluster_export(
            dataset.cluster_tree,
            dataset.coords,
            dataset.corpus.documents,
            dataset.boundaries,
            level=level,
        )

    @app.get("/api/corpus/documents/{doi:path}/neighbors")
    def document_neighbors(doi: str, k: int = Query(default=10, ge=1)):
        neighbors = dataset.corpus.semantic_neighbors(doi, min(k, max(1, len(dataset.corpus) - 1)))
        return {
            "doi": doi,
            "neighbors": [
                {"doi": d.doi, "title": d.title, "year": d.year, "similarity": sim}
                for d, sim in neighbors
            ],
        }

    @app.get("/api/corpus/documents/{doi:path}/graphs")
    def document_graphs(doi: str):
        return [
            {"graph": gid, "edges": edges}
            for gid, edges in dataset.doi_index.get(doi, [])
        ]

    @app.get("/api/corpus/documents/{doi:path}")
    def document(doi: str):
        return dataset.corpus.get(doi).as_dict()

    return app


def serve(dataset: Dataset, port: int = 8080, bind: str = "127.0.0.1") -> None:
    """Run the API with uvicorn; precomputation is already done at this point."""
    import uvicorn

    uvicorn.run(create_app(dataset), host=bind, port=port, log_level="info")
