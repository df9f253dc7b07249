"""Corpus services: document records, faceted search, exact k-NN neighbors,
cluster boundaries, and document-to-graph links.

documents.jsonl record shape:
    {"doi", "title", "authors": [], "publisher", "year", "abstract",
     "entities": [], "figures": n, "tables": n}
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import IO

import numpy as np

from .alphashape import DegenerateGeometryError, Polygon, alpha_shape
from .density import ClusterTree
from .ingest import ParseError
from .model import AssembledGraph


class UnknownDocumentError(KeyError):
    pass


@dataclass(frozen=True, slots=True)
class DocumentRecord:
    doi: str
    title: str
    authors: tuple[str, ...]
    publisher: str
    year: int
    abstract: str
    entities: tuple[str, ...]
    figures: int
    tables: int
    row: int  # index into the embedding matrix

    def as_dict(self) -> dict:
        return {
            "doi": self.doi,
            "title": self.title,
            "authors": list(self.authors),
            "publisher": self.publisher,
            "year": self.year,
            "abstract": self.abstract,
            "entities": list(self.entities),
            "figures": self.figures,
            "tables": self.tables,
        }


def parse_documents(stream: IO[bytes] | IO[str]) -> list[DocumentRecord]:
    """Parse line-delimited document records; row index follows line order."""
    docs: list[DocumentRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        line = raw.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            doc = DocumentRecord(
                doi=str(rec["doi"]),
                title=str(rec["title"]),
                authors=tuple(rec.get("authors", ())),
                publisher=str(rec.get("publisher", "")),
                year=int(rec["year"]),
                abstract=str(rec.get("abstract", "")),
                entities=tuple(rec.get("entities", ())),
                figures=int(rec.get("figures", 0)),
                tables=int(rec.get("tables", 0)),
                row=len(docs),
            )
        except json.JSONDecodeError as exc:
            raise ParseError(lineno, f"invalid JSON: {exc.msg}") from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(lineno, f"bad document record: {exc}") from exc
        if doc.doi in seen:
            raise ParseError(lineno, f"duplicate doi {doc.doi!r}")
        seen.add(doc.doi)
        docs.append(doc)
    return docs


def document_to_json(doc: DocumentRecord) -> str:
    return json.dumps(doc.as_dict(), separators=(",", ":"), sort_keys=True)


@dataclass(frozen=True, slots=True)
class SearchFacets:
    text: str | None = None
    author: str | None = None
    publisher: str | None = None
    year_min: int | None = None
    year_max: int | None = None
    has_figures: bool | None = None
    has_tables: bool | None = None
    entity: str | None = None


@dataclass(frozen=True, slots=True)
class DocumentPage:
    total: int
    page: int
    page_size: int
    documents: tuple[DocumentRecord, ...]


class CorpusIndex:
    """Immutable search/neighbor index over the document corpus."""

    def __init__(self, documents: list[DocumentRecord], embeddings: np.ndarray):
        if len(documents) != len(embeddings):
            raise ValueError(
                f"embedding count {len(embeddings)} != document count {len(documents)}"
            )
        self.documents = list(documents)
        self.by_doi = {d.doi: d for d in self.documents}
        self.embeddings = np.asarray(embeddings, dtype=np.float64)
        norms = np.linalg.norm(self.embeddings, axis=1)
        zero_rows = np.flatnonzero(norms == 0.0)
        if len(zero_rows):
            warnings.warn(
                f"{len(zero_rows)} zero-norm embedding rows excluded from similarity",
                stacklevel=2,
            )
        self._norms = norms
        self._zero_rows = frozenset(int(i) for i in zero_rows)
        # Search order: year descending, doi ascending.
        self._search_order = sorted(self.documents, key=lambda d: (-d.year, d.doi))

    def __len__(self) -> int:
        return len(self.documents)

    def get(self, doi: str) -> DocumentRecord:
        doc = self.by_doi.get(doi)
        if doc is None:
            raise UnknownDocumentError(doi)
        return doc

    def semantic_neighbors(self, doi: str, k: int) -> list[tuple[DocumentRecord, float]]:
        """Top-k by cosine similarity, query excluded, ties by doi ascending."""
        doc = self.get(doi)
        if k < 1:
            raise ValueError("k must be at least 1")
        if k >= len(self.documents):
            raise ValueError(f"k must be smaller than the corpus size {len(self.documents)}")
        if doc.row in self._zero_rows:
            return []
        query = self.embeddings[doc.row]
        sims = self.embeddings @ query
        with np.errstate(invalid="ignore", divide="ignore"):
            sims = sims / (self._norms * self._norms[doc.row])
        candidates = [
            (-float(sims[d.row]), d.doi, d)
            for d in self.documents
            if d.row != doc.row and d.row not in self._zero_rows
        ]
        candidates.sort(key=lambda t: (t[0], t[1]))
        return [(d, -neg) for neg, _, d in candidates[:k]]

    def search(self, facets: SearchFacets, page: int = 1, page_size: int = 50) -> DocumentPage:
        """Conjunctive filters; substring matches are case-insensitive.

        Results are ordered by (year descending, doi ascending), so
        pagination is stable.
        """
        if not (1 <= page_size <= 500):
            raise ValueError("page_size must be in [1, 500]")
        if page < 1:
            raise ValueError("page must be at least 1")

        def matches(doc: DocumentRecord) -> bool:
            if facets.text is not None:
                needle = facets.text.lower()
                if needle not in doc.title.lower() and needle not in doc.abstract.lower():
                    return False
            if facets.author is not None:
                needle = facets.author.lower()
                if not any(needle in a.lower() for a in doc.authors):
                    return False
            if facets.publisher is not None and facets.publisher.lower() not in doc.publisher.lower():
                return False
            if facets.year_min is not None and doc.year < facets.year_min:
                return False
            if facets.year_max is not None and doc.year > facets.year_max:
                return False
            if facets.has_figures is not None and (doc.figures >= 1) != facets.has_figures:
                return False
            if facets.has_tables is not None and (doc.tables >= 1) != facets.has_tables:
                return False
            if facets.entity is not None:
                needle = facets.entity.lower()
                if not any(needle in e.lower() for e in doc.entities):
                    return False
            return True

        hits = [d for d in self._search_order if matches(d)]
        start = (page - 1) * page_size
        return DocumentPage(
            total=len(hits),
            page=page,
            page_size=page_size,
            documents=tuple(hits[start : start + page_size]),
        )


def build_doi_index(graphs: dict[str, AssembledGraph]) -> dict[str, list[tuple[str, list[str]]]]:
    """Inverse index doi -> [(graph id, sorted citing edge ids)], graph id ascending."""
    raw: dict[str, dict[str, set[str]]] = {}
    for gid, graph in graphs.items():
        for edge in graph.edges.values():
            for doi in edge.dois:
                raw.setdefault(doi, {}).setdefault(gid, set()).add(edge.id)
    index: dict[str, list[tuple[str, list[str]]]] = {}
    for doi, per_graph in raw.items():
        index[doi] = [(gid, sorted(per_graph[gid])) for gid in sorted(per_graph)]
    return index


def graphs_for_document(
    doi_index: dict[str, list[tuple[str, list[str]]]], doi: str
) -> list[tuple[str, list[str]]]:
    """Graphs citing a document; unknown DOIs yield an empty list."""
    return doi_index.get(doi, [])


def cluster_boundary(points: np.ndarray, alpha_radius: float | None = None) -> Polygon:
    """Single display boundary for one cluster's points.

    Uses the alpha shape when it comes back as one polygon, the convex hull
    when it splits into several, and an epsilon-inflated bounding box for
    degenerate (collinear or tiny) member sets.
    """
    pts = np.asarray(points, dtype=np.float64)
    try:
        if len(pts) >= 3:
            polygons = alpha_shape(pts, alpha_radius)
            if len(polygons) == 1:
                return polygons[0]
            from .alphashape import convex_hull

            return convex_hull(pts)
        raise DegenerateGeometryError("fewer than 3 points")
    except DegenerateGeometryError:
        eps = 1e-6
        x0, y0 = float(pts[:, 0].min()) - eps, float(pts[:, 1].min()) - eps
        x1, y1 = float(pts[:, 0].max()) + eps, float(pts[:, 1].max()) + eps
        return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def cluster_export(
    tree: ClusterTree,
    coords: np.ndarray,
    documents: list[DocumentRecord],
    boundaries: dict[int, Polygon | None],
    level: str | None = None,
) -> dict:
    """Wire shape for the clusters route; ``level`` filters cluster records."""
    fine_of_row: dict[int, int] = {}
    for c in tree.fine():
        for row in c.members:
            fine_of_row[row] = c.id
    points = [
        {
            "doi": doc.doi,
            "x": float(coords[doc.row, 0]),
            "y": float(coords[doc.row, 1]),
            "cluster": fine_of_row.get(doc.row),
        }
        for doc in documents
    ]
    clusters = []
    for c in tree.clusters:
        if level is not None and c.level != level:
            continue
        boundary = boundaries.get(c.id)
        clusters.append(
            {
                "id": c.id,
                "parent": c.parent,
                "level": c.level,
                "hue": c.hue,
                "stability": c.stability,
                "polygon": [[x, y] for x, y in boundary.vertices] if boundary else None,
            }
        )
    noise_rows = sorted(tree.noise)
    row_to_doi = {doc.row: doc.doi for doc in documents}
    return {
        "points": points,
        "clusters": clusters,
        "noise": [row_to_doi[r] for r in noise_rows],
    }
