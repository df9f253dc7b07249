"""Core domain types: agents, causal statements, ontology, assembled graph.

Everything here is immutable after construction and safe to share across
concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class StatementType(str, Enum):
    ACTIVATION = "Activation"
    INCREASE_AMOUNT = "IncreaseAmount"
    PHOSPHORYLATION = "Phosphorylation"
    INHIBITION = "Inhibition"
    DECREASE_AMOUNT = "DecreaseAmount"
    DEPHOSPHORYLATION = "Dephosphorylation"
    COMPLEX = "Complex"
    ASSOCIATION = "Association"


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UNKNOWN = "unknown"


# Fixed regulation semantics per statement type: (polarity, directed).
# Complex/Association express co-occurrence, not signed regulation, and
# render as undirected edges.
_POLARITY_TABLE: dict[StatementType, tuple[Polarity, bool]] = {
    StatementType.ACTIVATION: (Polarity.POSITIVE, True),
    StatementType.INCREASE_AMOUNT: (Polarity.POSITIVE, True),
    StatementType.PHOSPHORYLATION: (Polarity.POSITIVE, True),
    StatementType.INHIBITION: (Polarity.NEGATIVE, True),
    StatementType.DECREASE_AMOUNT: (Polarity.NEGATIVE, True),
    StatementType.DEPHOSPHORYLATION: (Polarity.NEGATIVE, True),
    StatementType.COMPLEX: (Polarity.UNKNOWN, False),
    StatementType.ASSOCIATION: (Polarity.UNKNOWN, False),
}


def polarity_of(statement_type: StatementType) -> tuple[Polarity, bool]:
    """Return ``(polarity, directed)`` for a statement type. Total function."""
    return _POLARITY_TABLE[statement_type]


class PathFormatError(ValueError):
    """A category path is malformed (empty segment or missing root)."""


def split_category_path(category_path: str) -> list[str]:
    """Split a slash-delimited category path, rejecting empty segments."""
    segments = category_path.split("/")
    if any(not seg for seg in segments):
        raise PathFormatError(f"category path has an empty segment: {category_path!r}")
    return segments


def ancestor_at(category_path: str, depth: int) -> str:
    """Prefix of ``category_path`` with ``depth + 1`` segments, clamped to the full path.

    >>> ancestor_at("root/protein/cytokine", 0)
    'root'
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    segments = split_category_path(category_path)
    return "/".join(segments[: depth + 1])


@dataclass(frozen=True, slots=True)
class Evidence:
    text: str
    doi: str
    source: str


@dataclass(frozen=True, slots=True)
class Agent:
    id: str
    name: str
    category_path: str
    description: str | None = None


@dataclass(frozen=True, slots=True)
class CausalStatement:
    id: str
    statement_type: StatementType
    subj: str
    obj: str
    belief: float
    curated: bool
    evidence: tuple[Evidence, ...]


@dataclass(frozen=True, slots=True)
class EdgeRecord:
    """One merged multidigraph edge: all statements sharing (subj, obj, type)."""

    id: str
    subj: str
    obj: str
    statement_type: StatementType
    polarity: Polarity
    directed: bool
    curated: bool
    belief: float
    evidence: tuple[Evidence, ...]
    dois: frozenset[str]

    @property
    def evidence_count(self) -> int:
        return len(self.evidence)


@dataclass(frozen=True, slots=True)
class OntologyNode:
    """A category in the nested ontology tree.

    ``member_agents`` is populated only on leaves; interior nodes exist to
    group their children.
    """

    id: str
    name: str
    children: tuple[OntologyNode, ...] = ()
    member_agents: tuple[str, ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self):
        """Yield this node and all descendants, depth-first, children in id order."""
        yield self
        for child in self.children:
            yield from child.walk()

    def depth_of(self) -> int:
        return self.id.count("/")


def build_ontology(agents: dict[str, Agent], extra_paths: tuple[str, ...] = ()) -> OntologyNode:
    """Derive the ontology tree as the union of agent category paths.

    ``extra_paths`` may add empty categories (no member agents). Every path
    must start at "root". Agents are attached at their full path; children
    are sorted by id.
    """
    members: dict[str, list[str]] = {}
    paths: set[str] = {"root"}
    for agent in agents.values():
        segments = split_category_path(agent.category_path)
        if segments[0] != "root":
            raise PathFormatError(
                f"category path for agent {agent.id!r} does not start at root: "
                f"{agent.category_path!r}"
            )
        for i in range(1, len(segments) + 1):
            paths.add("/".join(segments[:i]))
        members.setdefault(agent.category_path, []).append(agent.id)
    for path in extra_paths:
        segments = split_category_path(path)
        if segments[0] != "root":
            raise PathFormatError(f"ontology path does not start at root: {path!r}")
        for i in range(1, len(segments) + 1):
            paths.add("/".join(segments[:i]))

    children_of: dict[str, list[str]] = {}
    for path in paths:
        if path == "root":
            continue
        parent = path.rsplit("/", 1)[0]
        children_of.setdefault(parent, []).append(path)

    def build(path: str) -> OntologyNode:
        kids = tuple(build(p) for p in sorted(children_of.get(path, [])))
        return OntologyNode(
            id=path,
            name=path.rsplit("/", 1)[-1],
            children=kids,
            member_agents=tuple(sorted(members.get(path, []))) if not kids else (),
        )

    return build("root")


@dataclass(frozen=True, slots=True)
class AssembledGraph:
    """Deduplicated multidigraph of merged causal edges plus its ontology.

    ``outgoing``/``incoming`` map node id to edge-id lists in stored
    orientation (subj -> obj); undirected edges are stored subj -> obj and
    flagged via ``EdgeRecord.directed``.
    """

    id: str
    agents: dict[str, Agent]
    edges: dict[str, EdgeRecord]
    outgoing: dict[str, tuple[str, ...]]
    incoming: dict[str, tuple[str, ...]]
    ontology: OntologyNode

    def degree(self, node_id: str) -> int:
        return len(self.outgoing.get(node_id, ())) + len(self.incoming.get(node_id, ()))

    def out_degree(self, node_id: str) -> int:
        return len(self.outgoing.get(node_id, ()))

    def in_degree(self, node_id: str) -> int:
        return len(self.incoming.get(node_id, ()))


@dataclass(frozen=True, slots=True)
class ValidationEntry:
    severity: str  # "error" | "warning"
    code: str
    message: str
    subject: str

    def as_dict(self) -> dict[str, str]:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "subject": self.subject,
        }


def validate_dataset(graph: AssembledGraph) -> list[ValidationEntry]:
    """Check all AssembledGraph invariants; an empty report means the graph is sound.

    Problems are report entries, never exceptions. The report is
    deterministic, sorted by (severity, subject, code).
    """
    entries: list[ValidationEntry] = []

    def err(code: str, message: str, subject: str) -> None:
        entries.append(ValidationEntry("error", code, message, subject))

    for agent in graph.agents.values():
        if not agent.id:
            err("empty-agent-id", "agent has an empty id", agent.name or "?")
        try:
            segments = split_category_path(agent.category_path)
            if segments[0] != "root":
                err(
                    "bad-category-path",
                    f"category path does not start at root: {agent.category_path!r}",
                    agent.id,
                )
        except PathFormatError:
            err(
                "bad-category-path",
                f"malformed category path: {agent.category_path!r}",
                agent.id,
            )

    leaf_paths = {
        node.id for node in graph.ontology.walk() if node.is_leaf
    }
    for agent in graph.agents.values():
        if agent.category_path not in leaf_paths:
            err(
                "agent-at-non-leaf",
                f"agent grounded at non-leaf category {agent.category_path!r}",
                agent.id,
            )

    for edge in graph.edges.values():
        if edge.subj not in graph.agents:
            err("dangling-endpoint", f"edge {edge.id!r} references missing agent", edge.subj)
        if edge.obj not in graph.agents:
            err("dangling-endpoint", f"edge {edge.id!r} references missing agent", edge.obj)
        if edge.subj == edge.obj:
            err("self-loop", f"edge {edge.id!r} is a self-loop", edge.id)
        if not edge.evidence:
            err("empty-evidence", f"edge {edge.id!r} has no evidence", edge.id)
        if not (0.0 <= edge.belief <= 1.0):
            err("belief-range", f"edge {edge.id!r} has belief {edge.belief} outside [0,1]", edge.id)
        expected_id = f"{edge.subj}|{edge.statement_type.value}|{edge.obj}"
        if edge.id != expected_id:
            err("edge-id-mismatch", f"edge id {edge.id!r} != {expected_id!r}", edge.id)

    seen_keys: dict[tuple[str, str, str], str] = {}
    for edge in graph.edges.values():
        key = (edge.subj, edge.obj, edge.statement_type.value)
        if key in seen_keys:
            err(
                "duplicate-edge-key",
                f"edges {seen_keys[key]!r} and {edge.id!r} share (subj, obj, type)",
                edge.id,
            )
        else:
            seen_keys[key] = edge.id

    # Adjacency consistency, checked in both directions.
    for node_id, edge_ids in graph.outgoing.items():
        for eid in edge_ids:
            edge = graph.edges.get(eid)
            if edge is None or edge.subj != node_id:
                err("adjacency-inconsistent", f"outgoing list of {node_id!r} lists {eid!r}", node_id)
    for node_id, edge_ids in graph.incoming.items():
        for eid in edge_ids:
            edge = graph.edges.get(eid)
            if edge is None or edge.obj != node_id:
                err("adjacency-inconsistent", f"incoming list of {node_id!r} lists {eid!r}", node_id)
    for edge in graph.edges.values():
        if edge.id not in graph.outgoing.get(edge.subj, ()):
            err("adjacency-missing", f"edge {edge.id!r} absent from outgoing of its subject", edge.id)
        if edge.id not in graph.incoming.get(edge.obj, ()):
            err("adjacency-missing", f"edge {edge.id!r} absent from incoming of its object", edge.id)

    entries.sort(key=lambda e: (e.severity, e.subject, e.code, e.message))
    return entries
