from __future__ import annotations

import itertools
import math
import random

import pytest

from atlas.fixtures import SCENARIO_GRAPH_ID, SEED_DOI_CRS, SEED_DOI_TOCI
from atlas.model import Polarity, StatementType
from atlas.queries import (
    DocFacet,
    EdgeFacet,
    NodeFacet,
    PathFacet,
    QueryChain,
    QueryEngine,
    QueryParseError,
    Subgraph,
    UnknownEntityError,
    parse_query,
    path_polarity,
    serialize_chain,
)

from conftest import random_graph


@pytest.fixture(scope="module")
def scenario_engine(scenario_dataset):
    return scenario_dataset.graphs[SCENARIO_GRAPH_ID].engine


# --- parsing ---


def test_parse_single_edge_facet():
    chain = parse_query(
        '{"chain":[{"facet":"edge","field":"type","op":"=","value":"Inhibition"}]}'
    )
    assert chain.facets == (EdgeFacet("type", "=", "Inhibition"),)


def test_parse_type_mismatch_names_facet():
    with pytest.raises(QueryParseError, match="facet 0"):
        parse_query('{"chain":[{"facet":"node","field":"degree","op":"contains","value":3}]}')


def test_parse_unknown_field_position():
    with pytest.raises(QueryParseError, match="facet 1"):
        parse_query(
            '{"chain":[{"facet":"edge","field":"type","op":"=","value":"x"},'
            '{"facet":"node","field":"color","op":"=","value":"x"}]}'
        )


def test_parse_malformed_json():
    with pytest.raises(QueryParseError, match="malformed"):
        parse_query("{nope")


def test_parse_rejects_long_paths():
    with pytest.raises(QueryParseError, match="max_len"):
        parse_query('{"chain":[{"facet":"path","sources":["a"],"targets":["b"],"max_len":9}]}')


def _random_chain(rng: random.Random) -> QueryChain:
    facets = []
    for _ in range(rng.randint(1, 4)):
        kind = rng.choice(["node", "edge", "doc", "path"])
        if kind == "node":
            field, op, value = rng.choice(
                [
                    ("degree", ">=", rng.randint(0, 5)),
                    ("name", "contains", "A"),
                    ("id", "!=", "a0"),
                    ("category", "=", "root/g1/s1"),
                ]
            )
            facets.append(NodeFacet(field, op, value))
        elif kind == "edge":
            field, op, value = rng.choice(
                [
                    ("type", "=", rng.choice(list(StatementType)).value),
                    ("belief", "<", round(rng.random(), 3)),
                    ("curated", "=", rng.random() < 0.5),
                    ("evidence_count", ">=", rng.randint(1, 3)),
                ]
            )
            facets.append(EdgeFacet(field, op, value))
        elif kind == "doc":
            facets.append(DocFacet(tuple(f"10.1/d{rng.randint(0, 5)}" for _ in range(rng.randint(1, 3)))))
        else:
            facets.append(
                PathFacet(
                    sources=(f"a{rng.randint(0, 7)}",),
                    targets=(f"a{rng.randint(0, 7)}",),
                    max_len=rng.randint(1, 8),
                    cap=rng.randint(1, 50),
                )
            )
    return QueryChain(tuple(facets))


def test_parse_serialize_roundtrip():
    rng = random.Random(31)
    for _ in range(500):
        chain = _random_chain(rng)
        assert parse_query(serialize_chain(chain)) == chain


# --- facets ---


def _naive_apply(graph, ctx: Subgraph, facet) -> Subgraph:
    def cmp(v, op, target):
        if op == "=":
            return v == target
        if op == "!=":
            return v != target
        if op == "<":
            return v < target
        if op == "<=":
            return v <= target
        if op == ">":
            return v > target
        if op == ">=":
            return v >= target
        return target in v

    if isinstance(facet, NodeFacet):
        def value_of(nid):
            agent = graph.agents[nid]
            return {
                "id": nid,
                "name": agent.name,
                "category": agent.category_path,
                "degree": graph.degree(nid),
                "in_degree": graph.in_degree(nid),
                "out_degree": graph.out_degree(nid),
            }[facet.field]

        nodes = {n for n in ctx.nodes if cmp(value_of(n), facet.op, facet.value)}
        edges = {
            e for e in ctx.edges
            if graph.edges[e].subj in nodes and graph.edges[e].obj in nodes
        }
        return Subgraph(frozenset(nodes), frozenset(edges))
    if isinstance(facet, EdgeFacet):
        def value_of(eid):
            edge = graph.edges[eid]
            return {
                "type": edge.statement_type.value,
                "polarity": edge.polarity.value,
                "curated": edge.curated,
                "evidence_count": edge.evidence_count,
                "belief": edge.belief,
            }[facet.field]

        edges = {e for e in ctx.edges if cmp(value_of(e), facet.op, facet.value)}
    else:  # DocFacet
        edges = {
            e for e in ctx.edges if graph.edges[e].dois & set(facet.dois)
        }
    nodes = set()
    for e in edges:
        nodes.add(graph.edges[e].subj)
        nodes.add(graph.edges[e].obj)
    return Subgraph(frozenset(nodes), frozenset(edges))


def test_apply_facet_matches_naive_filter():
    rng = random.Random(42)
    for trial in range(100):
        graph = random_graph(trial, n_agents=rng.randint(3, 10), n_statements=rng.randint(2, 20))
        engine = QueryEngine(graph)
        ctx = engine.full_subgraph()
        facet = rng.choice(
            [
                NodeFacet("degree", ">=", rng.randint(0, 4)),
                NodeFacet("name", "contains", rng.choice(["A1", "A2", "X"])),
                EdgeFacet("type", "=", rng.choice(list(StatementType)).value),
                EdgeFacet("polarity", "!=", "unknown"),
                EdgeFacet("curated", "=", rng.random() < 0.5),
                EdgeFacet("belief", ">", rng.random()),
                DocFacet((f"10.1/d{rng.randint(0, 5)}",)),
            ]
        )
        assert engine.apply_facet(ctx, facet) == _naive_apply(graph, ctx, facet)


def test_degree_facet_identity_at_zero():
    graph = random_graph(1)
    engine = QueryEngine(graph)
    ctx = engine.full_subgraph()
    result = engine.apply_facet(ctx, NodeFacet("degree", ">=", 0))
    assert result == ctx


def test_degree_reads_full_graph_not_context():
    graph = random_graph(6, n_agents=6, n_statements=12)
    engine = QueryEngine(graph)
    hub = max(graph.agents, key=lambda a: (graph.degree(a), a))
    threshold = graph.degree(hub)
    narrowed = engine.apply_facet(
        engine.full_subgraph(), EdgeFacet("belief", "<=", 1.0)
    )
    result = engine.apply_facet(narrowed, NodeFacet("degree", ">=", threshold))
    assert hub in result.nodes


def test_edge_facet_inhibition_on_scenario(scenario_engine):
    result = scenario_engine.apply_facet(
        scenario_engine.full_subgraph(), EdgeFacet("type", "=", "Inhibition")
    )
    assert "tocilizumab|Inhibition|IL6" in result.edges
    assert "tocilizumab" in result.nodes and "IL6" in result.nodes


def test_edge_facet_never_isolated_edges():
    for seed in range(20):
        graph = random_graph(seed)
        engine = QueryEngine(graph)
        result = engine.apply_facet(
            engine.full_subgraph(), EdgeFacet("evidence_count", ">=", 2)
        )
        for eid in result.edges:
            assert graph.edges[eid].subj in result.nodes
            assert graph.edges[eid].obj in result.nodes


# --- path search ---


def brute_force_paths(graph, sources, targets, max_len):
    conn: dict[tuple[str, str], list[str]] = {}
    for eid, edge in graph.edges.items():
        conn.setdefault((edge.subj, edge.obj), []).append(eid)
        if not edge.directed:
            conn.setdefault((edge.obj, edge.subj), []).append(eid)
    found = set()

    def extend(seq):
        if len(seq) > 1 and seq[-1] in targets:
            options = [conn[(seq[i], seq[i + 1])] for i in range(len(seq) - 1)]
            for combo in itertools.product(*options):
                found.add((tuple(seq), combo))
        if len(seq) - 1 < max_len:
            for nxt in sorted(graph.agents):
                if nxt not in seq and (seq[-1], nxt) in conn:
                    extend(seq + [nxt])

    for s in sorted(sources):
        if s in graph.agents:
            extend([s])
    return found


def test_find_paths_equals_bruteforce():
    for seed in range(100):
        rng = random.Random(seed)
        graph = random_graph(seed + 500, n_agents=rng.randint(2, 12), n_statements=rng.randint(1, 24))
        engine = QueryEngine(graph)
        ids = sorted(graph.agents)
        sources = set(rng.sample(ids, min(2, len(ids))))
        targets = set(rng.sample(ids, min(2, len(ids))))
        for max_len in (1, 2, 3, 4, 5):
            paths, truncated = engine.find_paths(
                engine.full_subgraph(), sources, targets, max_len, cap=100_000
            )
            assert not truncated
            got = {(p.nodes, p.edges) for p in paths}
            assert got == brute_force_paths(graph, sources, targets, max_len), (seed, max_len)


def test_find_paths_source_equals_target_empty():
    graph = random_graph(4)
    engine = QueryEngine(graph)
    node = sorted(graph.agents)[0]
    for max_len in (1, 4, 8):
        paths, _ = engine.find_paths(engine.full_subgraph(), {node}, {node}, max_len, 10)
        assert paths == []


def test_find_paths_unknown_entity():
    graph = random_graph(4)
    engine = QueryEngine(graph)
    with pytest.raises(UnknownEntityError):
        engine.find_paths(engine.full_subgraph(), {"ghost"}, {"a0"}, 2, 10)


def test_find_paths_ranking_and_cap():
    graph = random_graph(8, n_agents=10, n_statements=30)
    engine = QueryEngine(graph)
    ids = sorted(graph.agents)
    paths, _ = engine.find_paths(engine.full_subgraph(), set(ids[:3]), set(ids[3:]), 4, 100_000)
    keys = [(len(p.edges), -p.score, p.path_id) for p in paths]
    assert keys == sorted(keys)
    if len(paths) > 3:
        top, truncated = engine.find_paths(
            engine.full_subgraph(), set(ids[:3]), set(ids[3:]), 4, len(paths) - 2
        )
        assert truncated
        assert [p.path_id for p in top] == [p.path_id for p in paths[: len(paths) - 2]]


def test_scenario_path(scenario_engine):
    paths, truncated = scenario_engine.find_paths(
        scenario_engine.full_subgraph(), {"tocilizumab"}, {"COVID-19"}, 2, 10
    )
    assert not truncated
    assert len(paths) == 1
    assert paths[0].nodes == ("tocilizumab", "IL6", "COVID-19")
    assert paths[0].polarity is Polarity.NEGATIVE


def test_path_polarity_rules():
    assert path_polarity([Polarity.NEGATIVE, Polarity.POSITIVE]) is Polarity.NEGATIVE
    assert path_polarity([Polarity.NEGATIVE, Polarity.NEGATIVE]) is Polarity.POSITIVE
    assert path_polarity([Polarity.POSITIVE, Polarity.UNKNOWN]) is Polarity.UNKNOWN
    assert path_polarity([Polarity.POSITIVE]) is Polarity.POSITIVE


def test_path_score_is_log_evidence_sum():
    graph = random_graph(9, n_agents=6, n_statements=15)
    engine = QueryEngine(graph)
    ids = sorted(graph.agents)
    paths, _ = engine.find_paths(engine.full_subgraph(), set(ids), set(ids), 3, 10_000)
    for p in paths[:20]:
        expected = sum(math.log1p(graph.edges[e].evidence_count) for e in p.edges)
        assert p.score == pytest.approx(expected)


# --- chains ---


def test_empty_chain_full_graph():
    graph = random_graph(2)
    engine = QueryEngine(graph)
    result = engine.run_chain(QueryChain(()))
    assert result.subgraph == engine.full_subgraph()
    assert result.highlight == result.subgraph
    assert result.paths is None
    assert result.facet_trace == ()


def test_doc_facet_chain_on_scenario(scenario_engine):
    result = scenario_engine.run_chain(
        QueryChain((DocFacet((SEED_DOI_CRS, SEED_DOI_TOCI)),))
    )
    assert "tocilizumab|Inhibition|IL6" in result.subgraph.edges
    for eid in result.subgraph.edges:
        edge = scenario_engine.graph.edges[eid]
        assert edge.dois & {SEED_DOI_CRS, SEED_DOI_TOCI}


def test_attribute_chain_permutation_invariance():
    rng = random.Random(77)
    for trial in range(50):
        graph = random_graph(trial + 100, n_agents=8, n_statements=16)
        engine = QueryEngine(graph)
        facets = []
        for _ in range(rng.randint(2, 4)):
            if rng.random() < 0.5:
                facets.append(NodeFacet("degree", ">=", rng.randint(0, 3)))
            else:
                facets.append(
                    rng.choice(
                        [
                            EdgeFacet("belief", ">", rng.random() * 0.6),
                            EdgeFacet("polarity", "=", rng.choice(["positive", "negative"])),
                            EdgeFacet("type", "!=", rng.choice(list(StatementType)).value),
                        ]
                    )
                )
        outcomes = {
            engine.run_chain(QueryChain(perm)).subgraph
            for perm in itertools.permutations(facets)
        }
        assert len(outcomes) == 1, trial


def test_chain_monotone_refinement_trace():
    rng = random.Random(5)
    for trial in range(30):
        graph = random_graph(trial, n_agents=9, n_statements=20)
        engine = QueryEngine(graph)
        chain = _random_chain(rng)
        try:
            result = engine.run_chain(chain)
        except UnknownEntityError:
            continue
        sizes = [(len(graph.agents), len(graph.edges))] + [
            (t.nodes, t.edges) for t in result.facet_trace
        ]
        for (n0, e0), (n1, e1) in zip(sizes, sizes[1:]):
            assert n1 <= n0 and e1 <= e0


def test_chain_with_path_facet_subgraph_is_path_union(scenario_engine):
    chain = QueryChain(
        (
            DocFacet((SEED_DOI_CRS, SEED_DOI_TOCI)),
            PathFacet(("tocilizumab",), ("COVID-19",), max_len=2, cap=10),
        )
    )
    result = scenario_engine.run_chain(chain)
    assert result.paths is not None and len(result.paths) == 1
    path = result.paths[0]
    assert result.subgraph.nodes == frozenset(path.nodes)
    assert result.subgraph.edges == frozenset(path.edges)
    assert set(path.edges) <= set(result.subgraph.edges)


# --- suggestions ---


def test_scenario_suggestions_121(scenario_engine):
    suggestions = scenario_engine.suggest_neighbors(
        Subgraph(frozenset(), frozenset()), "tocilizumab", "outgoing"
    )
    assert len(suggestions) == 121
    assert suggestions[0].edge_id == "tocilizumab|Inhibition|IL6"
    assert suggestions[0].evidence_count == 39


def test_suggestions_exclude_current_subgraph(scenario_engine):
    current = Subgraph(frozenset(), frozenset({"tocilizumab|Inhibition|IL6"}))
    suggestions = scenario_engine.suggest_neighbors(current, "tocilizumab", "outgoing")
    assert len(suggestions) == 120
    assert all(s.edge_id != "tocilizumab|Inhibition|IL6" for s in suggestions)


def test_suggestions_sorted_like_reference():
    for seed in range(30):
        graph = random_graph(seed, n_agents=8, n_statements=24)
        engine = QueryEngine(graph)
        for node in sorted(graph.agents):
            for direction, adj in (("outgoing", graph.outgoing), ("incoming", graph.incoming)):
                got = engine.suggest_neighbors(Subgraph(frozenset(), frozenset()), node, direction)
                expected = sorted(
                    adj.get(node, ()),
                    key=lambda eid: (-graph.edges[eid].evidence_count, eid),
                )
                assert [s.edge_id for s in got] == expected


def test_suggestions_unknown_node():
    graph = random_graph(3)
    engine = QueryEngine(graph)
    with pytest.raises(UnknownEntityError):
        engine.suggest_neighbors(Subgraph(frozenset(), frozenset()), "ghost", "outgoing")


def test_large_hub_suggestion_counts():
    # hub with a few thousand incident edges, mirroring the reported IL6 scale
    from atlas.ingest import assemble
    from atlas.model import Agent, CausalStatement, Evidence

    agents = [Agent("IL6", "IL6", "root/protein/cytokine")]
    statements = []
    for i in range(2000):
        agents.append(Agent(f"in{i:04d}", f"IN{i}", "root/protein/other"))
        statements.append(
            CausalStatement(
                f"si{i:04d}", StatementType.ACTIVATION, f"in{i:04d}", "IL6",
                0.5, False, (Evidence(f"ev in {i}", f"10.3/{i}", "r"),),
            )
        )
    for i in range(1000):
        agents.append(Agent(f"out{i:04d}", f"OUT{i}", "root/process/misc"))
        statements.append(
            CausalStatement(
                f"so{i:04d}", StatementType.INHIBITION, "IL6", f"out{i:04d}",
                0.5, False, (Evidence(f"ev out {i}", f"10.4/{i}", "r"),),
            )
        )
    graph = assemble(statements, agents)
    engine = QueryEngine(graph)
    empty = Subgraph(frozenset(), frozenset())
    assert len(engine.suggest_neighbors(empty, "IL6", "incoming")) == 2000
    assert len(engine.suggest_neighbors(empty, "IL6", "outgoing")) == 1000
