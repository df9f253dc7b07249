"""Deterministic synthetic dataset generation.

``gen_dataset`` writes a seeded random dataset in the ingest directory
layout: preferential-attachment statement endpoints (so hubs exist), a
random ontology of configurable depth/branching, and per-topic Gaussian
embeddings aligned with document entities. Identical parameters produce
byte-identical trees.

``scenario_fixture`` writes a fixed dataset encoding the COVID-19 drug
exploration walkthrough: the tocilizumab -> IL6 inhibition backed by 39
pieces of evidence and human curation, 121 outgoing edges from tocilizumab
including the inhibition of immune response, the SARS-CoV-2 -> IL6 ->
COVID-19 spine, and two seed DOIs wired to those edges.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import write_embeddings

SCENARIO_GRAPH_ID = "covid19-fixture"
SEED_DOI_CRS = "10.9001/crs-overview"  # cytokine release syndrome review
SEED_DOI_TOCI = "10.9002/toci-treatment"  # IL6 receptor blockade trial
TOCILIZUMAB_OUT_DEGREE = 121
TOCILIZUMAB_IL6_EVIDENCE = 39

_STATEMENT_TYPES = (
    "Activation",
    "IncreaseAmount",
    "Phosphorylation",
    "Inhibition",
    "DecreaseAmount",
    "Dephosphorylation",
    "Complex",
    "Association",
)
_DIRECTED_TYPES = _STATEMENT_TYPES[:6]
_READERS = ("reader-a", "reader-b", "reader-c")
_PUBLISHERS = ("Raven Press", "Meridian", "Old Orchard", "Cattail House", "Lumen")


@dataclass(frozen=True, slots=True)
class FixtureParams:
    seed: int
    n_agents: int = 100
    n_statements: int = 400
    n_docs: int = 500
    embedding_dim: int = 32
    ontology_depth: int = 3
    ontology_branching: int = 4
    attachment: str = "preferential"  # or "uniform"

    def validate(self) -> None:
        for name in ("n_agents", "n_statements", "n_docs", "embedding_dim",
                     "ontology_depth", "ontology_branching"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.n_statements < self.n_agents - 1:
            raise ValueError("n_statements must be at least n_agents - 1")
        if self.attachment not in ("preferential", "uniform"):
            raise ValueError(f"unknown attachment mode {self.attachment!r}")


def _write_lines(path: Path, lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in lines:
            fh.write(line)
            fh.write("\n")


def _jsonl(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), sort_keys=True)


def _ontology_leaves(rng: random.Random, depth: int, branching: int) -> list[str]:
    leaves: list[str] = []

    def grow(prefix: str, level: int) -> None:
        if level == depth:
            leaves.append(prefix)
            return
        for i in range(rng.randint(2, branching) if branching > 1 else 1):
            grow(f"{prefix}/c{level}{chr(97 + i)}", level + 1)

    grow("root", 0)
    return leaves


def gen_dataset(params: FixtureParams, out_dir: str | Path) -> Path:
    """Write a seeded synthetic dataset; returns the dataset directory."""
    params.validate()
    out = Path(out_dir)
    rng = random.Random(params.seed)
    width = max(4, len(str(params.n_agents)))

    leaves = _ontology_leaves(rng, params.ontology_depth, params.ontology_branching)
    agent_ids = [f"ag{i:0{width}d}" for i in range(params.n_agents)]
    agent_lines = []
    agent_leaf: dict[str, str] = {}
    for aid in agent_ids:
        leaf = rng.choice(leaves)
        agent_leaf[aid] = leaf
        agent_lines.append(
            _jsonl(
                {
                    "id": aid,
                    "name": aid.upper(),
                    "category": leaf,
                    "description": f"synthetic agent {aid}",
                }
            )
        )

    doc_dois = [f"10.5555/d{i:05d}" for i in range(params.n_docs)]

    # Endpoint sampling: preferential attachment draws from a slot list where
    # each agent appears once per incident statement, so hubs accumulate.
    slots = [agent_ids[0]]
    preferential = params.attachment == "preferential"

    def pick_endpoint(limit: int) -> str:
        if preferential:
            return rng.choice(slots)
        return rng.choice(agent_ids[:limit])

    statement_lines = []
    edge_keys: set[tuple[str, str, str]] = set()
    swidth = max(6, len(str(params.n_statements)))
    for i in range(params.n_statements):
        if i < params.n_agents - 1:
            # connectivity backbone: attach each new agent to an existing one
            subj = agent_ids[i + 1]
            obj = pick_endpoint(i + 1)
            if rng.random() < 0.5:
                subj, obj = obj, subj
        else:
            subj = pick_endpoint(params.n_agents)
            obj = pick_endpoint(params.n_agents)
            while obj == subj:
                obj = pick_endpoint(params.n_agents)
        stype = rng.choice(_STATEMENT_TYPES)
        n_ev = rng.randint(1, 3)
        evidence = [
            {
                "text": f"Synthetic evidence {i}.{k}: {subj} acts on {obj}.",
                "doi": rng.choice(doc_dois),
                "source": rng.choice(_READERS),
            }
            for k in range(n_ev)
        ]
        statement_lines.append(
            _jsonl(
                {
                    "id": f"st{i:0{swidth}d}",
                    "type": stype,
                    "subj": subj,
                    "obj": obj,
                    "belief": round(rng.uniform(0.4, 1.0), 4),
                    "curated": rng.random() < 0.1,
                    "evidence": evidence,
                }
            )
        )
        edge_keys.add((subj, obj, stype))
        slots.append(subj)
        slots.append(obj)

    # Documents: entities drawn from agents; topics group agents so embedding
    # blobs align with what documents mention.
    n_topics = min(8, max(2, params.n_agents // 12))
    topic_of = {aid: idx % n_topics for idx, aid in enumerate(agent_ids)}
    doc_lines = []
    doc_topics = []
    for i, doi in enumerate(doc_dois):
        first = rng.choice(agent_ids)
        mentioned = [first] + rng.sample(agent_ids, rng.randint(0, 2))
        entities = sorted({aid.upper() for aid in mentioned})
        topic = topic_of[first]
        doc_topics.append(topic)
        doc_lines.append(
            _jsonl(
                {
                    "doi": doi,
                    "title": f"Study {i:05d} of {entities[0]} interactions",
                    "authors": [f"Author {rng.randint(1, 40)}" for _ in range(rng.randint(1, 3))],
                    "publisher": rng.choice(_PUBLISHERS),
                    "year": rng.randint(2012, 2023),
                    "abstract": f"Synthetic abstract {i} covering {', '.join(entities)}.",
                    "entities": entities,
                    "figures": rng.randint(0, 4),
                    "tables": rng.randint(0, 3),
                }
            )
        )

    nrng = np.random.default_rng(params.seed)
    centers = nrng.normal(scale=4.0, size=(n_topics, params.embedding_dim))
    emb = np.empty((params.n_docs, params.embedding_dim), dtype=np.float32)
    for i, topic in enumerate(doc_topics):
        emb[i] = centers[topic] + nrng.normal(scale=0.35, size=params.embedding_dim)

    manifest = {
        "name": f"synthetic-{params.seed}",
        "graphs": [
            {
                "id": "synthetic",
                "name": f"Synthetic graph (seed {params.seed})",
                "counts": {
                    "agents": params.n_agents,
                    "statements": params.n_statements,
                    "edges": len(edge_keys),
                },
            }
        ],
        "corpus": {
            "documents": "corpus/documents.jsonl",
            "embeddings": "corpus/embeddings.bin",
        },
    }

    _write_lines(out / "graphs" / "synthetic" / "agents.jsonl", agent_lines)
    _write_lines(out / "graphs" / "synthetic" / "statements.jsonl", statement_lines)
    _write_lines(out / "corpus" / "documents.jsonl", doc_lines)
    write_embeddings(out / "corpus" / "embeddings.bin", emb)
    _write_lines(out / "manifest.json", [json.dumps(manifest, indent=2, sort_keys=True)])
    return out


# --- scenario fixture ---


def _scenario_agents() -> list[dict]:
    agents = [
        {
            "id": "tocilizumab",
            "name": "tocilizumab",
            "category": "root/chemical/drug",
            "description": "IL6 receptor antagonist antibody",
        },
        {
            "id": "IL6",
            "name": "IL6",
            "category": "root/protein/cytokine",
            "description": "interleukin 6, pro-inflammatory cytokine",
        },
        {
            "id": "SARS-CoV-2",
            "name": "SARS-CoV-2",
            "category": "root/organism/virus",
            "description": "coronavirus causing COVID-19",
        },
        {
            "id": "COVID-19",
            "name": "COVID-19",
            "category": "root/phenomenon/disease",
            "description": "coronavirus disease 2019",
        },
        {
            "id": "immune-response",
            "name": "immune response",
            "category": "root/process/immune",
            "description": "host defense program",
        },
        {
            "id": "IL1B",
            "name": "IL1B",
            "category": "root/protein/cytokine",
            "description": "interleukin 1 beta",
        },
        {
            "id": "JAK1",
            "name": "JAK1",
            "category": "root/protein/kinase",
            "description": "janus kinase 1",
        },
        {
            "id": "STAT3",
            "name": "STAT3",
            "category": "root/protein/tf",
            "description": "signal transducer 3",
        },
    ]
    filler_cats = (
        "root/protein/receptor",
        "root/process/signaling",
        "root/chemical/metabolite",
        "root/protein/kinase",
    )
    for i in range(1, 120):
        agents.append(
            {
                "id": f"target-{i:03d}",
                "name": f"TARGET-{i:03d}",
                "category": filler_cats[i % len(filler_cats)],
                "description": f"secondary interaction partner {i}",
            }
        )
    return agents


def _scenario_statements(corpus_dois: list[str]) -> list[dict]:
    rng = random.Random(190037)  # fixed: the fixture is frozen, not seeded
    statements: list[dict] = []

    def add(sid, stype, subj, obj, belief, curated, evidence):
        statements.append(
            {
                "id": sid,
                "type": stype,
                "subj": subj,
                "obj": obj,
                "belief": belief,
                "curated": curated,
                "evidence": evidence,
            }
        )

    # tocilizumab -| IL6: split across three statements that merge into one
    # edge carrying exactly 39 distinct evidence items, curated overall.
    toci_ev = []
    for k in range(TOCILIZUMAB_IL6_EVIDENCE):
        doi = SEED_DOI_TOCI if k == 0 else rng.choice(corpus_dois[2:])
        toci_ev.append(
            {
                "text": f"Fragment {k + 1}: tocilizumab blocks IL6 receptor signalling.",
                "doi": doi,
                "source": _READERS[k % len(_READERS)],
            }
        )
    add("sc-toci-il6-a", "Inhibition", "tocilizumab", "IL6", 0.99, True, toci_ev[:20])
    add("sc-toci-il6-b", "Inhibition", "tocilizumab", "IL6", 0.97, False, toci_ev[20:33])
    add("sc-toci-il6-c", "Inhibition", "tocilizumab", "IL6", 0.95, False, toci_ev[33:])

    add(
        "sc-virus-il6",
        "IncreaseAmount",
        "SARS-CoV-2",
        "IL6",
        0.98,
        True,
        [
            {
                "text": "SARS-CoV-2 infection increases the amount of IL6 in serum.",
                "doi": SEED_DOI_CRS,
                "source": "reader-a",
            },
            {
                "text": "Viral load correlates with elevated IL6.",
                "doi": corpus_dois[2],
                "source": "reader-b",
            },
        ],
    )
    add(
        "sc-il6-covid",
        "Activation",
        "IL6",
        "COVID-19",
        0.96,
        True,
        [
            {
                "text": f"Elevated IL6 drives severe COVID-19 outcomes (report {k}).",
                "doi": SEED_DOI_CRS if k == 0 else corpus_dois[3 + k],
                "source": _READERS[k % len(_READERS)],
            }
            for k in range(12)
        ],
    )
    add(
        "sc-toci-immune",
        "Inhibition",
        "tocilizumab",
        "immune-response",
        0.88,
        False,
        [
            {
                "text": "Tocilizumab lowers immune system activity, raising superinfection risk.",
                "doi": corpus_dois[4],
                "source": "reader-a",
            },
            {
                "text": "Immunosuppression observed after IL6 receptor blockade.",
                "doi": corpus_dois[4],
                "source": "reader-b",
            },
            {
                "text": "Case series: secondary infections under IL6 inhibition.",
                "doi": corpus_dois[6],
                "source": "reader-c",
            },
            {
                "text": "Registry data on infections following immunomodulation.",
                "doi": corpus_dois[7],
                "source": "reader-a",
            },
        ],
    )

    # Remaining outgoing edges from tocilizumab: 119 distinct filler targets.
    for i in range(1, 120):
        stype = _DIRECTED_TYPES[i % len(_DIRECTED_TYPES)]
        add(
            f"sc-toci-t{i:03d}",
            stype,
            "tocilizumab",
            f"target-{i:03d}",
            round(0.4 + 0.5 * ((i * 37) % 100) / 100, 4),
            i % 9 == 0,
            [
                {
                    "text": f"Off-target effect {i}: tocilizumab modulates TARGET-{i:03d}.",
                    # stay clear of the two seed DOIs (corpus_dois[0:2])
                    "doi": corpus_dois[8 + (i % (len(corpus_dois) - 8))],
                    "source": _READERS[i % len(_READERS)],
                }
            ],
        )

    add(
        "sc-il1b-il6",
        "IncreaseAmount",
        "IL1B",
        "IL6",
        0.85,
        False,
        [
            {
                "text": "IL1B stimulation raises IL6 expression.",
                "doi": corpus_dois[9],
                "source": "reader-b",
            },
            {
                "text": "Cytokine cascade: IL1B upstream of IL6.",
                "doi": corpus_dois[10],
                "source": "reader-c",
            },
            {
                "text": "Co-stimulation assay shows IL1B-driven IL6 release.",
                "doi": corpus_dois[11],
                "source": "reader-a",
            },
        ],
    )
    add(
        "sc-il6-jak1",
        "Activation",
        "IL6",
        "JAK1",
        0.93,
        True,
        [
            {
                "text": "IL6 engagement activates JAK1.",
                "doi": corpus_dois[12],
                "source": "reader-b",
            }
        ],
    )
    add(
        "sc-jak1-stat3",
        "Phosphorylation",
        "JAK1",
        "STAT3",
        0.94,
        True,
        [
            {
                "text": "JAK1 phosphorylates STAT3 downstream of IL6.",
                "doi": corpus_dois[13],
                "source": "reader-c",
            }
        ],
    )
    return statements


def _scenario_documents() -> list[dict]:
    docs = [
        {
            "doi": SEED_DOI_CRS,
            "title": "Cytokine release syndrome in severe respiratory infection",
            "authors": ["R. Alvarez", "M. Chen"],
            "publisher": "Raven Press",
            "year": 2020,
            "abstract": "Review of IL6-driven cytokine release in SARS-CoV-2 infection "
            "and its association with COVID-19 severity.",
            "entities": ["IL6", "SARS-CoV-2", "COVID-19"],
            "figures": 3,
            "tables": 2,
        },
        {
            "doi": SEED_DOI_TOCI,
            "title": "Interleukin-6 receptor blockade as a treatment strategy",
            "authors": ["P. Okafor"],
            "publisher": "Meridian",
            "year": 2020,
            "abstract": "Clinical results for tocilizumab, an IL6 receptor antagonist, "
            "in hospitalized COVID-19 patients.",
            "entities": ["tocilizumab", "IL6", "COVID-19"],
            "figures": 2,
            "tables": 4,
        },
    ]
    topics = (
        ("cytokine signalling", ["IL6", "IL1B", "JAK1", "STAT3"]),
        ("antiviral therapy", ["tocilizumab", "SARS-CoV-2"]),
        ("immune modulation", ["immune response", "tocilizumab"]),
        ("disease progression", ["COVID-19", "IL6"]),
    )
    rng = random.Random(52)
    for i in range(26):
        theme, entities = topics[i % len(topics)]
        docs.append(
            {
                "doi": f"10.9100/sc{i:03d}",
                "title": f"Observations on {theme}, part {i + 1}",
                "authors": [f"Author {rng.randint(1, 20)}"],
                "publisher": _PUBLISHERS[i % len(_PUBLISHERS)],
                "year": 2014 + (i % 10),
                "abstract": f"Findings on {theme} involving {', '.join(entities)}.",
                "entities": entities,
                "figures": i % 4,
                "tables": (i + 1) % 3,
            }
        )
    # two off-topic strays so small-cluster runs designate some noise
    for i, theme in enumerate(("archival methods", "instrumentation")):
        docs.append(
            {
                "doi": f"10.9100/misc{i:02d}",
                "title": f"Notes on {theme}",
                "authors": [f"Author {30 + i}"],
                "publisher": _PUBLISHERS[i],
                "year": 2013,
                "abstract": f"Unrelated material about {theme}.",
                "entities": [theme],
                "figures": 0,
                "tables": 0,
            }
        )
    return docs


def scenario_fixture(out_dir: str | Path) -> Path:
    """Write the fixed walkthrough dataset; returns the dataset directory."""
    out = Path(out_dir)
    docs = _scenario_documents()
    dois = [d["doi"] for d in docs]
    agents = _scenario_agents()
    statements = _scenario_statements(dois)

    edge_keys = {(s["subj"], s["obj"], s["type"]) for s in statements}
    manifest = {
        "name": "covid19-scenario",
        "graphs": [
            {
                "id": SCENARIO_GRAPH_ID,
                "name": "COVID-19",
                "counts": {
                    "agents": len(agents),
                    "statements": len(statements),
                    "edges": len(edge_keys),
                },
            }
        ],
        "corpus": {
            "documents": "corpus/documents.jsonl",
            "embeddings": "corpus/embeddings.bin",
        },
    }

    # Embeddings: one Gaussian blob per theme so semantic neighbors are
    # meaningful; the two strays get far-off singleton themes.
    nrng = np.random.default_rng(431)
    theme_of = [_theme_index(d["entities"][0]) for d in docs]
    centers = nrng.normal(scale=3.0, size=(max(theme_of) + 1, 16))
    centers[4] *= 4.0
    centers[5] *= -4.0
    emb = np.empty((len(docs), 16), dtype=np.float32)
    for i, theme in enumerate(theme_of):
        emb[i] = centers[theme] + nrng.normal(scale=0.25, size=16)

    _write_lines(out / "graphs" / SCENARIO_GRAPH_ID / "agents.jsonl", [_jsonl(a) for a in agents])
    _write_lines(
        out / "graphs" / SCENARIO_GRAPH_ID / "statements.jsonl",
        [_jsonl(s) for s in statements],
    )
    _write_lines(out / "corpus" / "documents.jsonl", [_jsonl(d) for d in docs])
    write_embeddings(out / "corpus" / "embeddings.bin", emb)
    _write_lines(out / "manifest.json", [json.dumps(manifest, indent=2, sort_keys=True)])
    return out


_THEME_OF_ENTITY = {
    "IL6": 0,
    "IL1B": 0,
    "JAK1": 0,
    "STAT3": 0,
    "tocilizumab": 1,
    "SARS-CoV-2": 1,
    "immune response": 2,
    "COVID-19": 3,
    "archival methods": 4,
    "instrumentation": 5,
}


def _theme_index(entity: str) -> int:
    return _THEME_OF_ENTITY.get(entity, 3)
