"""Dataset parsing and graph assembly.

File layout of a dataset directory::

    manifest.json                 {"name", "graphs": [{"id", "name", ...}],
                                   "corpus": {"documents", "embeddings", "coords"?}}
    graphs/<id>/agents.jsonl      {"id", "name", "category", "description"?}
    graphs/<id>/statements.jsonl  {"id", "type", "subj", "obj", "belief",
                                   "curated", "evidence": [{"text", "doi", "source"}]}
    corpus/documents.jsonl        see atlas.corpus.DocumentRecord
    corpus/embeddings.bin         "EMB1" magic, u32le count, u32le dim, f32le row-major
    corpus/coords.bin             same layout with dim == 2 (optional)

Statements sharing (subj, obj, type) merge into one edge: evidence lists are
concatenated with exact duplicates removed, belief takes the max, curated the
logical OR, and DOI sets the union.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .model import (
    Agent,
    AssembledGraph,
    CausalStatement,
    Evidence,
    StatementType,
    ancestor_at,
    build_ontology,
    polarity_of,
    EdgeRecord,
)


class ParseError(ValueError):
    """A line of an input file could not be parsed; carries the 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class AssemblyError(ValueError):
    """A statement cannot be merged into the graph (dangling endpoint, self-loop)."""


_VALID_TYPES = {t.value for t in StatementType}


def parse_statements(stream: IO[bytes] | IO[str]) -> list[CausalStatement]:
    """Parse line-delimited JSON statement records, preserving input order.

    Raises ParseError with the offending 1-based line number on malformed
    JSON, missing fields, or an unknown statement type.
    """
    statements: list[CausalStatement] = []
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from exc
        statements.append(_statement_from_record(record, lineno))
    return statements


def _statement_from_record(record: dict, lineno: int) -> CausalStatement:
    if not isinstance(record, dict):
        raise ParseError(lineno, "record is not a JSON object")
    try:
        type_name = record["type"]
        if type_name not in _VALID_TYPES:
            raise ParseError(lineno, f"unknown statement type {type_name!r}")
        evidence = tuple(
            Evidence(text=e["text"], doi=e["doi"], source=e["source"])
            for e in record["evidence"]
        )
        if not evidence:
            raise ParseError(lineno, "evidence list is empty")
        for ev in evidence:
            if not ev.text:
                raise ParseError(lineno, "evidence text is empty")
        belief = float(record["belief"])
        if not (0.0 <= belief <= 1.0):
            raise ParseError(lineno, f"belief {belief} outside [0,1]")
        return CausalStatement(
            id=str(record["id"]),
            statement_type=StatementType(type_name),
            subj=str(record["subj"]),
            obj=str(record["obj"]),
            belief=belief,
            curated=bool(record["curated"]),
            evidence=evidence,
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(lineno, f"bad statement record: {exc}") from exc


def statement_to_json(stmt: CausalStatement) -> str:
    """Serialize one statement to the line format parsed by parse_statements."""
    return json.dumps(
        {
            "id": stmt.id,
            "type": stmt.statement_type.value,
            "subj": stmt.subj,
            "obj": stmt.obj,
            "belief": stmt.belief,
            "curated": stmt.curated,
            "evidence": [
                {"text": e.text, "doi": e.doi, "source": e.source} for e in stmt.evidence
            ],
        },
        separators=(",", ":"),
        sort_keys=True,
    )


def parse_agents(stream: IO[bytes] | IO[str]) -> list[Agent]:
    """Parse line-delimited JSON agent records."""
    agents: list[Agent] = []
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
            agents.append(
                Agent(
                    id=str(record["id"]),
                    name=str(record["name"]),
                    category_path=str(record["category"]),
                    description=record.get("description"),
                )
            )
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from exc
        except (KeyError, TypeError) as exc:
            raise ParseError(lineno, f"bad agent record: {exc}") from exc
    return agents


def agent_to_json(agent: Agent) -> str:
    record = {
        "id": agent.id,
        "name": agent.name,
        "category": agent.category_path,
    }
    if agent.description is not None:
        record["description"] = agent.description
    return json.dumps(record, separators=(",", ":"), sort_keys=True)


def assemble(
    statements: Iterable[CausalStatement],
    agents: Iterable[Agent],
    graph_id: str = "graph",
    allow_self_loops: bool = False,
    extra_ontology_paths: tuple[str, ...] = (),
) -> AssembledGraph:
    """Merge statements into a deduplicated multidigraph.

    Edge ids are deterministic: ``subj|type|obj``. Dangling endpoints and
    (by default) self-loops raise AssemblyError naming the statement.
    """
    agent_map: dict[str, Agent] = {}
    for agent in agents:
        if agent.id in agent_map:
            raise AssemblyError(f"duplicate agent id {agent.id!r}")
        agent_map[agent.id] = agent

    merged: dict[str, dict] = {}
    for stmt in statements:
        if stmt.subj not in agent_map:
            raise AssemblyError(
                f"statement {stmt.id!r} references unknown agent {stmt.subj!r}"
            )
        if stmt.obj not in agent_map:
            raise AssemblyError(
                f"statement {stmt.id!r} references unknown agent {stmt.obj!r}"
            )
        if stmt.subj == stmt.obj:
            if not allow_self_loops or stmt.statement_type in (
                StatementType.COMPLEX,
                StatementType.ASSOCIATION,
            ):
                raise AssemblyError(f"statement {stmt.id!r} is a self-loop")
        edge_id = f"{stmt.subj}|{stmt.statement_type.value}|{stmt.obj}"
        slot = merged.get(edge_id)
        if slot is None:
            slot = {
                "subj": stmt.subj,
                "obj": stmt.obj,
                "type": stmt.statement_type,
                "curated": stmt.curated,
                "belief": stmt.belief,
                "evidence": [],
                "seen": set(),
            }
            merged[edge_id] = slot
        else:
            slot["curated"] = slot["curated"] or stmt.curated
            slot["belief"] = max(slot["belief"], stmt.belief)
        for ev in stmt.evidence:
            key = (ev.text, ev.doi, ev.source)
            if key not in slot["seen"]:
                slot["seen"].add(key)
                slot["evidence"].append(ev)

    edges: dict[str, EdgeRecord] = {}
    outgoing: dict[str, list[str]] = {aid: [] for aid in agent_map}
    incoming: dict[str, list[str]] = {aid: [] for aid in agent_map}
    for edge_id, slot in merged.items():
        polarity, directed = polarity_of(slot["type"])
        evidence = tuple(slot["evidence"])
        edges[edge_id] = EdgeRecord(
            id=edge_id,
            subj=slot["subj"],
            obj=slot["obj"],
            statement_type=slot["type"],
            polarity=polarity,
            directed=directed,
            curated=slot["curated"],
            belief=slot["belief"],
            evidence=evidence,
            dois=frozenset(ev.doi for ev in evidence),
        )
        outgoing[slot["subj"]].append(edge_id)
        incoming[slot["obj"]].append(edge_id)

    ontology = build_ontology(agent_map, extra_ontology_paths)
    return AssembledGraph(
        id=graph_id,
        agents=agent_map,
        edges=edges,
        outgoing={k: tuple(sorted(v)) for k, v in outgoing.items()},
        incoming={k: tuple(sorted(v)) for k, v in incoming.items()},
        ontology=ontology,
    )


def expand_edges(graph: AssembledGraph) -> list[CausalStatement]:
    """Re-expand merged edges into one statement per edge (for idempotence checks)."""
    statements = []
    for edge_id in sorted(graph.edges):
        edge = graph.edges[edge_id]
        statements.append(
            CausalStatement(
                id=edge_id,
                statement_type=edge.statement_type,
                subj=edge.subj,
                obj=edge.obj,
                belief=edge.belief,
                curated=edge.curated,
                evidence=edge.evidence,
            )
        )
    return statements


@dataclass(frozen=True, slots=True)
class HyperEdge:
    """All edges whose endpoints share (source category, target category) at a level."""

    id: str
    level: int
    source_category: str
    target_category: str
    statement_ids: frozenset[str]

    @property
    def count(self) -> int:
        return len(self.statement_ids)


def bundle(graph: AssembledGraph, level: int) -> list[HyperEdge]:
    """Partition the edge ids by (subject ancestor, object ancestor) at ``level``.

    Output is sorted by (source_category, target_category); every edge
    belongs to exactly one bundle.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    groups: dict[tuple[str, str], list[str]] = {}
    for edge in graph.edges.values():
        src = ancestor_at(graph.agents[edge.subj].category_path, level)
        dst = ancestor_at(graph.agents[edge.obj].category_path, level)
        groups.setdefault((src, dst), []).append(edge.id)
    bundles = [
        HyperEdge(
            id=f"L{level}:{src}=>{dst}",
            level=level,
            source_category=src,
            target_category=dst,
            statement_ids=frozenset(edge_ids),
        )
        for (src, dst), edge_ids in groups.items()
    ]
    bundles.sort(key=lambda h: (h.source_category, h.target_category))
    return bundles


EMBEDDING_MAGIC = b"EMB1"


def write_embeddings(path, matrix: np.ndarray) -> None:
    """Write a float32 matrix in the EMB1 binary layout."""
    arr = np.ascontiguousarray(matrix, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("embedding matrix must be 2-D")
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<II", arr.shape[0], arr.shape[1]))
        fh.write(arr.tobytes(order="C"))


def read_embeddings(path) -> np.ndarray:
    """Read an EMB1 binary matrix; returns a (count, dim) float32 array."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != EMBEDDING_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}")
        header = fh.read(8)
        if len(header) != 8:
            raise ValueError(f"{path}: truncated header")
        count, dim = struct.unpack("<II", header)
        payload = fh.read(count * dim * 4)
        if len(payload) != count * dim * 4:
            raise ValueError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype="<f4").reshape(count, dim).copy()
