from __future__ import annotations

import csv

from atlas.fixtures import SCENARIO_GRAPH_ID
from atlas.report import render_all, render_clusters, render_flow, render_overview


def test_render_overview_writes_figure_and_csvs(scenario_dataset, tmp_path):
    gb = scenario_dataset.graphs[SCENARIO_GRAPH_ID]
    written = render_overview(gb, 1, tmp_path)
    names = {p.name for p in written}
    assert names == {
        "overview_level1.png",
        "circles.csv",
        "hyperedges_level1.csv",
        "overview_level1.json",
    }
    for path in written:
        assert path.stat().st_size > 0
    import json

    export = json.loads((tmp_path / "overview_level1.json").read_text())
    assert set(export) == {"circles", "hyperEdges"}
    with open(tmp_path / "circles.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert {r["id"] for r in rows} == set(gb.pack.circles)
    with open(tmp_path / "hyperedges_level1.csv") as fh:
        hyper = list(csv.DictReader(fh))
    assert sum(int(r["count"]) for r in hyper) == len(gb.graph.edges)


def test_render_clusters(scenario_dataset, tmp_path):
    written = render_clusters(scenario_dataset, tmp_path)
    names = {p.name for p in written}
    assert names == {"clusters.png", "clusters.csv"}
    with open(tmp_path / "clusters.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(scenario_dataset.corpus)
    noise_rows = [r for r in rows if r["noise"] == "yes"]
    assert all(r["cluster"] == "" for r in noise_rows)


def test_render_flow(scenario_dataset, tmp_path):
    gb = scenario_dataset.graphs[SCENARIO_GRAPH_ID]
    edges = ["tocilizumab|Inhibition|IL6", "IL6|Activation|COVID-19"]
    written = render_flow(gb, edges, tmp_path, name="spine")
    names = {p.name for p in written}
    assert names == {"spine.png", "spine_nodes.csv", "spine_edges.csv"}
    with open(tmp_path / "spine_nodes.csv") as fh:
        rows = {r["id"]: r for r in csv.DictReader(fh)}
    assert rows["tocilizumab"]["layer"] == "0"
    assert rows["IL6"]["layer"] == "1"
    assert rows["COVID-19"]["layer"] == "2"
    with open(tmp_path / "spine_edges.csv") as fh:
        erows = list(csv.DictReader(fh))
    assert {r["polarity"] for r in erows} == {"negative", "positive"}


def test_render_all(scenario_dataset, tmp_path):
    written = render_all(scenario_dataset, tmp_path)
    assert any(p.suffix == ".png" for p in written)
    assert any(p.suffix == ".csv" for p in written)
    assert (tmp_path / SCENARIO_GRAPH_ID / "overview_level1.png").exists()
    assert (tmp_path / "clusters.png").exists()
