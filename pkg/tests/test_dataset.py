from __future__ import annotations

import pytest

from atlas.dataset import (
    DatasetError,
    LoadOptions,
    load_dataset,
    overview_export,
    serialize_precomputation,
)
from atlas.fixtures import FixtureParams, SCENARIO_GRAPH_ID, gen_dataset, scenario_fixture


def test_load_scenario_counts(scenario_dataset):
    gb = scenario_dataset.graphs[SCENARIO_GRAPH_ID]
    assert len(gb.graph.agents) == 127
    assert gb.graph.out_degree("tocilizumab") == 121
    assert scenario_dataset.cluster_tree is not None
    assert len(scenario_dataset.corpus) == 30
    assert scenario_dataset.version_hash


def test_missing_embeddings_names_file(tmp_path):
    root = scenario_fixture(tmp_path / "data")
    (root / "corpus" / "embeddings.bin").unlink()
    with pytest.raises(DatasetError, match="corpus/embeddings.bin"):
        load_dataset(root)


def test_missing_manifest(tmp_path):
    (tmp_path / "empty").mkdir()
    with pytest.raises(DatasetError, match="manifest.json"):
        load_dataset(tmp_path / "empty")


def test_count_mismatch_detected(tmp_path):
    root = scenario_fixture(tmp_path / "data")
    manifest = root / "manifest.json"
    text = manifest.read_text().replace('"agents": 127', '"agents": 126')
    manifest.write_text(text)
    with pytest.raises(DatasetError, match="declares 126 agents"):
        load_dataset(root)


def test_load_twice_identical_precomputation(tmp_path):
    root = gen_dataset(
        FixtureParams(seed=6, n_agents=50, n_statements=160, n_docs=60, embedding_dim=8),
        tmp_path / "ds",
    )
    a = load_dataset(root)
    b = load_dataset(root)
    assert serialize_precomputation(a) == serialize_precomputation(b)
    assert a.version_hash == b.version_hash


def test_min_belief_filters_statements(tmp_path):
    root = gen_dataset(
        FixtureParams(seed=7, n_agents=30, n_statements=90, n_docs=20, embedding_dim=4),
        tmp_path / "mb",
    )
    # counts in the manifest no longer match once filtering drops statements,
    # so strip them for this load
    manifest = root / "manifest.json"
    import json

    doc = json.loads(manifest.read_text())
    doc["graphs"][0].pop("counts")
    manifest.write_text(json.dumps(doc))
    full = load_dataset(root)
    filtered = load_dataset(root, LoadOptions(min_belief=0.8))
    n_full = len(full.graphs["synthetic"].graph.edges)
    n_filtered = len(filtered.graphs["synthetic"].graph.edges)
    assert n_filtered < n_full
    for edge in filtered.graphs["synthetic"].graph.edges.values():
        assert edge.belief >= 0.8


def test_overview_export_depth_slices(scenario_dataset):
    gb = scenario_dataset.graphs[SCENARIO_GRAPH_ID]
    shallow = overview_export(gb, 0)
    assert [c["id"] for c in shallow["circles"]] == ["root"]
    assert len(shallow["hyperEdges"]) == 1
    assert shallow["hyperEdges"][0]["count"] == len(gb.graph.edges)
    deeper = overview_export(gb, 1)
    depths = {c["depth"] for c in deeper["circles"]}
    assert depths == {0, 1}
    for h in deeper["hyperEdges"]:
        assert h["level"] == 1
        assert 0.0 <= h["brightness"] <= 1.0
        assert h["segments"]
    # beyond the deepest level clamps
    clamped = overview_export(gb, 99)
    assert {c["depth"] for c in clamped["circles"]} <= set(range(gb.max_level + 1))


def test_bundles_cover_edges_at_every_level(scenario_dataset):
    gb = scenario_dataset.graphs[SCENARIO_GRAPH_ID]
    for level, bundles in gb.bundles.items():
        covered = set()
        for h in bundles:
            covered |= h.statement_ids
        assert covered == set(gb.graph.edges), level


def test_coords_from_projection(scenario_dataset):
    assert scenario_dataset.coords.shape == (30, 2)


def test_precomputed_coords_take_precedence(tmp_path):
    import json

    import numpy as np

    from atlas.ingest import write_embeddings

    root = scenario_fixture(tmp_path / "data")
    coords = np.arange(60, dtype=np.float32).reshape(30, 2)
    write_embeddings(root / "corpus" / "coords.bin", coords)
    manifest = json.loads((root / "manifest.json").read_text())
    manifest["corpus"]["coords"] = "corpus/coords.bin"
    (root / "manifest.json").write_text(json.dumps(manifest))
    ds = load_dataset(root)
    assert np.array_equal(ds.coords, coords.astype(np.float64))
