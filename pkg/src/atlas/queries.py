"""Chained multi-faceted queries over an assembled graph.

A chain is a sequence of facets evaluated as sequential refinement starting
from the full graph. Node facets filter the node set (edges close over the
surviving endpoints); edge and document facets filter the edge set, and the
observable subgraph after any such facet is the matching edges plus their
endpoints. Path facets replace the subgraph with the union of the paths
found. Degree fields always read the full graph so hub queries are stable
under refinement.

Chains of attribute facets commute: any permutation of node and edge facets
yields the same final subgraph.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .model import AssembledGraph, Polarity, StatementType

NODE_STRING_FIELDS = ("id", "name", "category")
NODE_NUMERIC_FIELDS = ("degree", "in_degree", "out_degree")
EDGE_STRING_FIELDS = ("type", "polarity")
EDGE_NUMERIC_FIELDS = ("evidence_count", "belief")
EDGE_BOOL_FIELDS = ("curated",)

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=", "contains")
_ORDER_OPS = ("<", "<=", ">", ">=")

MAX_PATH_LEN = 8
DEFAULT_PATH_LEN = 4
DEFAULT_PATH_CAP = 1000


class QueryParseError(ValueError):
    """Malformed chain document; carries the offending facet index when known."""

    def __init__(self, message: str, facet_index: int | None = None):
        if facet_index is not None:
            message = f"facet {facet_index}: {message}"
        super().__init__(message)
        self.facet_index = facet_index


class UnknownEntityError(ValueError):
    """A facet references an agent or node id absent from the graph."""


@dataclass(frozen=True, slots=True)
class NodeFacet:
    field: str
    op: str
    value: object


@dataclass(frozen=True, slots=True)
class EdgeFacet:
    field: str
    op: str
    value: object


@dataclass(frozen=True, slots=True)
class DocFacet:
    dois: tuple[str, ...]


@dataclass(frozen=True, slots=True)
class PathFacet:
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    max_len: int = DEFAULT_PATH_LEN
    cap: int = DEFAULT_PATH_CAP


Facet = NodeFacet | EdgeFacet | DocFacet | PathFacet


@dataclass(frozen=True, slots=True)
class QueryChain:
    facets: tuple[Facet, ...]


@dataclass(frozen=True, slots=True)
class Subgraph:
    nodes: frozenset[str]
    edges: frozenset[str]


@dataclass(frozen=True, slots=True)
class Path:
    nodes: tuple[str, ...]
    edges: tuple[str, ...]
    polarity: Polarity
    score: float

    @property
    def path_id(self) -> str:
        return ";".join((self.nodes[0],) + self.edges)


@dataclass(frozen=True, slots=True)
class TraceEntry:
    facet: str
    nodes: int
    edges: int


@dataclass(frozen=True, slots=True)
class QueryResult:
    subgraph: Subgraph
    highlight: Subgraph
    paths: tuple[Path, ...] | None
    facet_trace: tuple[TraceEntry, ...]
    truncated: bool


def _facet_label(facet: Facet) -> str:
    if isinstance(facet, NodeFacet):
        return "node"
    if isinstance(facet, EdgeFacet):
        return "edge"
    if isinstance(facet, DocFacet):
        return "doc"
    return "path"


# --- wire format ---


def _check_attribute_facet(kind: str, record: dict, index: int) -> None:
    string_fields = NODE_STRING_FIELDS if kind == "node" else EDGE_STRING_FIELDS
    numeric_fields = NODE_NUMERIC_FIELDS if kind == "node" else EDGE_NUMERIC_FIELDS
    bool_fields = () if kind == "node" else EDGE_BOOL_FIELDS
    field_name = record.get("field")
    op = record.get("op")
    value = record.get("value")
    if field_name not in string_fields + numeric_fields + bool_fields:
        raise QueryParseError(f"unknown {kind} field {field_name!r}", index)
    if op not in COMPARISON_OPS:
        raise QueryParseError(f"unknown op {op!r}", index)
    if field_name in numeric_fields:
        if op == "contains":
            raise QueryParseError(
                f"op 'contains' not valid on numeric field {field_name!r}", index
            )
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise QueryParseError(
                f"numeric field {field_name!r} requires a numeric value", index
            )
    elif field_name in bool_fields:
        if op not in ("=", "!="):
            raise QueryParseError(
                f"op {op!r} not valid on boolean field {field_name!r}", index
            )
        if not isinstance(value, bool):
            raise QueryParseError(
                f"boolean field {field_name!r} requires a boolean value", index
            )
    else:
        if op in _ORDER_OPS:
            raise QueryParseError(
                f"op {op!r} not valid on string field {field_name!r}", index
            )
        if not isinstance(value, str):
            raise QueryParseError(
                f"string field {field_name!r} requires a string value", index
            )


def parse_query(text: str) -> QueryChain:
    """Parse and validate a chain document.

    Raises QueryParseError naming the facet index for unknown facet kinds,
    unknown fields, and op/field type mismatches.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QueryParseError(f"malformed JSON: {exc.msg}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("chain"), list):
        raise QueryParseError('chain document must be {"chain": [...]}')
    facets: list[Facet] = []
    for index, record in enumerate(doc["chain"]):
        if not isinstance(record, dict):
            raise QueryParseError("facet must be an object", index)
        kind = record.get("facet")
        if kind in ("node", "edge"):
            _check_attribute_facet(kind, record, index)
            cls = NodeFacet if kind == "node" else EdgeFacet
            facets.append(cls(record["field"], record["op"], record["value"]))
        elif kind == "doc":
            dois = record.get("dois")
            if not isinstance(dois, list) or not dois or not all(
                isinstance(d, str) for d in dois
            ):
                raise QueryParseError("doc facet requires a nonempty dois list", index)
            facets.append(DocFacet(tuple(dois)))
        elif kind == "path":
            sources = record.get("sources")
            targets = record.get("targets")
            if not isinstance(sources, list) or not isinstance(targets, list):
                raise QueryParseError("path facet requires sources and targets lists", index)
            max_len = record.get("max_len", DEFAULT_PATH_LEN)
            cap = record.get("cap", DEFAULT_PATH_CAP)
            if not isinstance(max_len, int) or not (1 <= max_len <= MAX_PATH_LEN):
                raise QueryParseError(
                    f"max_len must be an integer in [1, {MAX_PATH_LEN}]", index
                )
            if not isinstance(cap, int) or cap < 1:
                raise QueryParseError("cap must be a positive integer", index)
            facets.append(PathFacet(tuple(sources), tuple(targets), max_len, cap))
        else:
            raise QueryParseError(f"unknown facet kind {kind!r}", index)
    return QueryChain(tuple(facets))


def serialize_chain(chain: QueryChain) -> str:
    records = []
    for facet in chain.facets:
        if isinstance(facet, NodeFacet):
            records.append(
                {"facet": "node", "field": facet.field, "op": facet.op, "value": facet.value}
            )
        elif isinstance(facet, EdgeFacet):
            records.append(
                {"facet": "edge", "field": facet.field, "op": facet.op, "value": facet.value}
            )
        elif isinstance(facet, DocFacet):
            records.append({"facet": "doc", "dois": list(facet.dois)})
        else:
            records.append(
                {
                    "facet": "path",
                    "sources": list(facet.sources),
                    "targets": list(facet.targets),
                    "max_len": facet.max_len,
                    "cap": facet.cap,
                }
            )
    return json.dumps({"chain": records}, separators=(",", ":"), sort_keys=True)


def path_polarity(polarities) -> Polarity:
    """Aggregate effect along a pathway: unknown absorbs, else sign parity."""
    negatives = 0
    for p in polarities:
        if p is Polarity.UNKNOWN:
            return Polarity.UNKNOWN
        if p is Polarity.NEGATIVE:
            negatives += 1
    return Polarity.NEGATIVE if negatives % 2 == 1 else Polarity.POSITIVE


class QueryEngine:
    """Read-only query evaluator over one immutable graph.

    Builds columnar edge/node arrays once so attribute facets run
    vectorized; any number of evaluations may run concurrently.
    """

    def __init__(self, graph: AssembledGraph):
        self.graph = graph
        self.node_ids: list[str] = sorted(graph.agents)
        self._node_pos = {nid: i for i, nid in enumerate(self.node_ids)}
        self.edge_ids: list[str] = sorted(graph.edges)
        self._edge_pos = {eid: i for i, eid in enumerate(self.edge_ids)}

        n, m = len(self.node_ids), len(self.edge_ids)
        self._node_name = [graph.agents[nid].name for nid in self.node_ids]
        self._node_category = [graph.agents[nid].category_path for nid in self.node_ids]
        self._deg = np.fromiter(
            (graph.degree(nid) for nid in self.node_ids), dtype=np.int64, count=n
        )
        self._in_deg = np.fromiter(
            (graph.in_degree(nid) for nid in self.node_ids), dtype=np.int64, count=n
        )
        self._out_deg = np.fromiter(
            (graph.out_degree(nid) for nid in self.node_ids), dtype=np.int64, count=n
        )

        edges = [graph.edges[eid] for eid in self.edge_ids]
        self._edge_type = [e.statement_type.value for e in edges]
        self._edge_polarity = [e.polarity.value for e in edges]
        # low-cardinality columns as int codes so =/!= run vectorized
        self._type_code_of = {t.value: i for i, t in enumerate(StatementType)}
        self._polarity_code_of = {p.value: i for i, p in enumerate(Polarity)}
        self._edge_type_codes = np.fromiter(
            (self._type_code_of[v] for v in self._edge_type), dtype=np.int8, count=m
        )
        self._edge_polarity_codes = np.fromiter(
            (self._polarity_code_of[v] for v in self._edge_polarity), dtype=np.int8, count=m
        )
        self._curated = np.fromiter((e.curated for e in edges), dtype=bool, count=m)
        self._evidence_count = np.fromiter(
            (e.evidence_count for e in edges), dtype=np.int64, count=m
        )
        self._belief = np.fromiter((e.belief for e in edges), dtype=np.float64, count=m)
        self._subj_pos = np.fromiter(
            (self._node_pos[e.subj] for e in edges), dtype=np.int64, count=m
        )
        self._obj_pos = np.fromiter(
            (self._node_pos[e.obj] for e in edges), dtype=np.int64, count=m
        )

        self._doi_to_edges: dict[str, list[int]] = {}
        for pos, e in enumerate(edges):
            for doi in e.dois:
                self._doi_to_edges.setdefault(doi, []).append(pos)

        # Traversal adjacency: per node, (edge position, next node position),
        # edge id ascending; undirected edges traversable both ways.
        trav: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for pos, e in enumerate(edges):
            s, o = self._subj_pos[pos], self._obj_pos[pos]
            trav[s].append((pos, int(o)))
            if not e.directed:
                trav[o].append((pos, int(s)))
        self._traversal = [tuple(lst) for lst in trav]  # edge positions ascend

        self._full = Subgraph(frozenset(self.node_ids), frozenset(self.edge_ids))

    # --- mask plumbing ---

    def _node_mask(self, nodes) -> np.ndarray:
        if nodes is self._full.nodes:  # run_chain starts from the full graph
            return np.ones(len(self.node_ids), dtype=bool)
        mask = np.zeros(len(self.node_ids), dtype=bool)
        for nid in nodes:
            pos = self._node_pos.get(nid)
            if pos is not None:
                mask[pos] = True
        return mask

    def _edge_mask(self, edges) -> np.ndarray:
        if edges is self._full.edges:
            return np.ones(len(self.edge_ids), dtype=bool)
        mask = np.zeros(len(self.edge_ids), dtype=bool)
        for eid in edges:
            pos = self._edge_pos.get(eid)
            if pos is not None:
                mask[pos] = True
        return mask

    def _node_set(self, mask: np.ndarray) -> frozenset[str]:
        return frozenset(self.node_ids[i] for i in np.flatnonzero(mask))

    def _edge_set(self, mask: np.ndarray) -> frozenset[str]:
        return frozenset(self.edge_ids[i] for i in np.flatnonzero(mask))

    def full_subgraph(self) -> Subgraph:
        return self._full

    # --- facet predicates ---

    @staticmethod
    def _compare_numeric(column: np.ndarray, op: str, value) -> np.ndarray:
        v = float(value)
        if op == "=":
            return column == v
        if op == "!=":
            return column != v
        if op == "<":
            return column < v
        if op == "<=":
            return column <= v
        if op == ">":
            return column > v
        return column >= v

    @staticmethod
    def _compare_strings(values: list[str], op: str, needle: str) -> np.ndarray:
        if op == "=":
            return np.fromiter((v == needle for v in values), dtype=bool, count=len(values))
        if op == "!=":
            return np.fromiter((v != needle for v in values), dtype=bool, count=len(values))
        return np.fromiter((needle in v for v in values), dtype=bool, count=len(values))

    def _node_predicate(self, facet: NodeFacet) -> np.ndarray:
        if facet.field == "degree":
            return self._compare_numeric(self._deg, facet.op, facet.value)
        if facet.field == "in_degree":
            return self._compare_numeric(self._in_deg, facet.op, facet.value)
        if facet.field == "out_degree":
            return self._compare_numeric(self._out_deg, facet.op, facet.value)
        column = {
            "id": self.node_ids,
            "name": self._node_name,
            "category": self._node_category,
        }[facet.field]
        return self._compare_strings(column, facet.op, facet.value)

    def _edge_predicate(self, facet: EdgeFacet) -> np.ndarray:
        if facet.field == "evidence_count":
            return self._compare_numeric(self._evidence_count, facet.op, facet.value)
        if facet.field == "belief":
            return self._compare_numeric(self._belief, facet.op, facet.value)
        if facet.field == "curated":
            matches = self._curated == bool(facet.value)
            return matches if facet.op == "=" else ~matches
        if facet.op in ("=", "!="):
            codes, code_of = (
                (self._edge_type_codes, self._type_code_of)
                if facet.field == "type"
                else (self._edge_polarity_codes, self._polarity_code_of)
            )
            code = code_of.get(facet.value, -1)
            return codes == code if facet.op == "=" else codes != code
        column = self._edge_type if facet.field == "type" else self._edge_polarity
        return self._compare_strings(column, facet.op, facet.value)

    def _doc_predicate(self, facet: DocFacet) -> np.ndarray:
        mask = np.zeros(len(self.edge_ids), dtype=bool)
        for doi in facet.dois:
            for pos in self._doi_to_edges.get(doi, ()):
                mask[pos] = True
        return mask

    # --- evaluation ---

    def _fold(
        self, context: Subgraph, facets: tuple[Facet, ...]
    ) -> tuple[Subgraph, tuple[TraceEntry, ...], tuple[Path, ...] | None, bool]:
        nodes = self._node_mask(context.nodes)
        edges = self._edge_mask(context.edges)
        edges &= nodes[self._subj_pos] & nodes[self._obj_pos]
        edge_facet_seen = False
        paths: tuple[Path, ...] | None = None
        truncated = False
        trace: list[TraceEntry] = []

        for facet in facets:
            if isinstance(facet, NodeFacet):
                nodes = nodes & self._node_predicate(facet)
                edges = edges & nodes[self._subj_pos] & nodes[self._obj_pos]
            elif isinstance(facet, (EdgeFacet, DocFacet)):
                pred = (
                    self._edge_predicate(facet)
                    if isinstance(facet, EdgeFacet)
                    else self._doc_predicate(facet)
                )
                edges = edges & pred
                edge_facet_seen = True
            else:
                found, truncated = self._find_paths_masked(
                    nodes, edges, facet.sources, facet.targets, facet.max_len, facet.cap
                )
                paths = found
                nodes = self._node_mask(n for p in found for n in p.nodes)
                edges = self._edge_mask(e for p in found for e in p.edges)
                edge_facet_seen = False  # subgraph is exactly the path union
            view_nodes, view_edges = self._view(nodes, edges, edge_facet_seen)
            trace.append(
                TraceEntry(_facet_label(facet), int(view_nodes.sum()), int(view_edges.sum()))
            )

        view_nodes, view_edges = self._view(nodes, edges, edge_facet_seen)
        subgraph = Subgraph(self._node_set(view_nodes), self._edge_set(view_edges))
        return subgraph, tuple(trace), paths, truncated

    def _view(
        self, nodes: np.ndarray, edges: np.ndarray, edge_facet_seen: bool
    ) -> tuple[np.ndarray, np.ndarray]:
        """Observable subgraph: after an edge-type facet, nodes collapse to endpoints."""
        if not edge_facet_seen:
            return nodes, edges
        view_nodes = np.zeros_like(nodes)
        idx = np.flatnonzero(edges)
        view_nodes[self._subj_pos[idx]] = True
        view_nodes[self._obj_pos[idx]] = True
        return view_nodes, edges

    def apply_facet(self, context: Subgraph, facet: Facet) -> Subgraph:
        """Refine a context by one facet.

        Node facets keep matching nodes and the edges both of whose endpoints
        survive; edge and document facets keep matching edges plus their
        endpoints; path facets keep the union of the paths found.
        """
        subgraph, _, _, _ = self._fold(context, (facet,))
        return subgraph

    def run_chain(self, chain: QueryChain) -> QueryResult:
        """Fold the chain starting from the full graph; highlight = final subgraph."""
        subgraph, trace, paths, truncated = self._fold(self._full, chain.facets)
        return QueryResult(
            subgraph=subgraph,
            highlight=subgraph,
            paths=paths,
            facet_trace=trace,
            truncated=truncated,
        )

    # --- path search ---

    def find_paths(
        self,
        context: Subgraph,
        sources,
        targets,
        max_len: int = DEFAULT_PATH_LEN,
        cap: int = DEFAULT_PATH_CAP,
    ) -> tuple[list[Path], bool]:
        """All simple paths from any source to any target with at most max_len edges.

        Undirected edges are traversable both ways. Results are ranked by
        (length ascending, evidence score descending, path id ascending) and
        truncated to ``cap``; the flag reports whether truncation may have
        dropped paths.
        """
        if not (1 <= max_len <= MAX_PATH_LEN):
            raise ValueError(f"max_len must be in [1, {MAX_PATH_LEN}]")
        if cap < 1:
            raise ValueError("cap must be positive")
        nodes = self._node_mask(context.nodes)
        edges = self._edge_mask(context.edges)
        paths, truncated = self._find_paths_masked(
            nodes, edges, tuple(sources), tuple(targets), max_len, cap
        )
        return list(paths), truncated

    def _find_paths_masked(
        self,
        node_mask: np.ndarray,
        edge_mask: np.ndarray,
        sources: tuple[str, ...],
        targets: tuple[str, ...],
        max_len: int,
        cap: int,
    ) -> tuple[tuple[Path, ...], bool]:
        for nid in tuple(sources) + tuple(targets):
            if nid not in self._node_pos:
                raise UnknownEntityError(f"unknown agent id {nid!r}")
        src = sorted(
            {self._node_pos[s] for s in sources if node_mask[self._node_pos[s]]}
        )
        dst = {self._node_pos[t] for t in targets if node_mask[self._node_pos[t]]}
        if not src or not dst:
            return (), False

        # Lower bound on remaining hops to any target, for pruning; BFS over
        # reversed traversal restricted to the context.
        n = len(self.node_ids)
        rev: list[list[int]] = [[] for _ in range(n)]
        for pos in np.flatnonzero(edge_mask):
            e = self.graph.edges[self.edge_ids[pos]]
            s, o = int(self._subj_pos[pos]), int(self._obj_pos[pos])
            rev[o].append(s)
            if not e.directed:
                rev[s].append(o)
        INF = max_len + 1
        dist = [INF] * n
        frontier = [t for t in dst]
        for t in frontier:
            dist[t] = 0
        while frontier:
            nxt = []
            for v in frontier:
                for u in rev[v]:
                    if node_mask[u] and dist[u] > dist[v] + 1:
                        dist[u] = dist[v] + 1
                        nxt.append(u)
            frontier = nxt

        collected: list[Path] = []
        visited = np.zeros(n, dtype=bool)

        def dfs(node: int, remaining: int, exact: int, node_seq: list[int], edge_seq: list[int]):
            for edge_pos, nxt in self._traversal[node]:
                if not edge_mask[edge_pos] or not node_mask[nxt] or visited[nxt]:
                    continue
                if dist[nxt] > remaining - 1:
                    continue
                node_seq.append(nxt)
                edge_seq.append(edge_pos)
                if nxt in dst and len(edge_seq) == exact:
                    collected.append(self._make_path(node_seq, edge_seq))
                elif remaining > 1:
                    visited[nxt] = True
                    dfs(nxt, remaining - 1, exact, node_seq, edge_seq)
                    visited[nxt] = False
                node_seq.pop()
                edge_seq.pop()

        truncated = False
        for exact in range(1, max_len + 1):
            for s in src:
                visited[s] = True
                dfs(s, exact, exact, [s], [])
                visited[s] = False
            if len(collected) >= cap and exact < max_len:
                truncated = True
                break

        collected.sort(key=lambda p: (len(p.edges), -p.score, p.path_id))
        if len(collected) > cap:
            truncated = True
            collected = collected[:cap]
        return tuple(collected), truncated

    def _make_path(self, node_seq: list[int], edge_seq: list[int]) -> Path:
        edge_ids = tuple(self.edge_ids[p] for p in edge_seq)
        pols = [self.graph.edges[eid].polarity for eid in edge_ids]
        score = float(sum(math.log1p(self._evidence_count[p]) for p in edge_seq))
        return Path(
            nodes=tuple(self.node_ids[p] for p in node_seq),
            edges=edge_ids,
            polarity=path_polarity(pols),
            score=score,
        )

    # --- neighborhood suggestions ---

    def suggest_neighbors(
        self, current: Subgraph, node_id: str, direction: str
    ) -> list[Suggestion]:
        """Full-graph edges incident to the node, absent from the current subgraph.

        Sorted by supporting evidence descending, ties by edge id ascending.
        """
        if direction not in ("incoming", "outgoing"):
            raise ValueError(f"direction must be incoming or outgoing, got {direction!r}")
        if node_id not in self.graph.agents:
            raise UnknownEntityError(f"unknown agent id {node_id!r}")
        incident = (
            self.graph.outgoing.get(node_id, ())
            if direction == "outgoing"
            else self.graph.incoming.get(node_id, ())
        )
        suggestions = []
        for eid in incident:
            if eid in current.edges:
                continue
            edge = self.graph.edges[eid]
            neighbor = edge.obj if direction == "outgoing" else edge.subj
            suggestions.append(
                Suggestion(
                    edge_id=eid,
                    neighbor=neighbor,
                    polarity=edge.polarity,
                    evidence_count=edge.evidence_count,
                    curated=edge.curated,
                    directed=edge.directed,
                )
            )
        suggestions.sort(key=lambda s: (-s.evidence_count, s.edge_id))
        return suggestions


@dataclass(frozen=True, slots=True)
class Suggestion:
    edge_id: str
    neighbor: str
    polarity: Polarity
    evidence_count: int
    curated: bool
    directed: bool


def result_to_dict(result: QueryResult) -> dict:
    """Wire shape served by the query route."""
    return {
        "nodes": sorted(result.subgraph.nodes),
        "edges": sorted(result.subgraph.edges),
        "paths": [
            {
                "nodes": list(p.nodes),
                "edges": list(p.edges),
                "polarity": p.polarity.value,
                "score": p.score,
            }
            for p in result.paths
        ]
        if result.paths is not None
        else None,
        "trace": [
            {"facet": t.facet, "nodes": t.nodes, "edges": t.edges}
            for t in result.facet_trace
        ],
        "truncated": result.truncated,
    }
