"""Command line interface: ingest, serve, cluster, gen-fixture, report."""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .corpus import cluster_boundary, cluster_export
from .dataset import LoadOptions, load_dataset, serialize_precomputation
from .density import cluster as run_cluster
from .fixtures import FixtureParams, gen_dataset, scenario_fixture
from .model import validate_dataset


@click.group()
def main() -> None:
    """Explore causal knowledge graphs against their document corpus."""


@main.command()
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--min-belief", type=float, default=0.0, show_default=True)
@click.option(
    "--cache",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Where to write the precomputation cache (default: <dir>/precompute.json).",
)
def ingest(data_dir: Path, min_belief: float, cache: Path | None) -> None:
    """Validate a dataset directory and write its precomputation cache."""
    t0 = time.perf_counter()
    dataset = load_dataset(data_dir, LoadOptions(min_belief=min_belief))
    problems = 0
    for gid, gb in sorted(dataset.graphs.items()):
        report = validate_dataset(gb.graph)
        for entry in report:
            problems += 1
            click.echo(f"{gid}: [{entry.severity}] {entry.code}: {entry.message}")
        click.echo(
            f"{gid}: {len(gb.graph.agents)} agents, {len(gb.graph.edges)} edges, "
            f"levels 0..{gb.max_level}, validation "
            + ("clean" if not report else f"{len(report)} problem(s)")
        )
    click.echo(f"corpus: {len(dataset.corpus)} documents")
    cache_path = cache or data_dir / "precompute.json"
    cache_path.write_bytes(serialize_precomputation(dataset))
    click.echo(
        f"cache written to {cache_path} (version {dataset.version_hash[:12]}, "
        f"{time.perf_counter() - t0:.1f}s)"
    )
    if problems:
        sys.exit(1)


@main.command()
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--bind", type=str, default="127.0.0.1", show_default=True)
@click.option("--min-belief", type=float, default=0.0, show_default=True)
@click.option("--lod-px", type=float, default=50.0, show_default=True,
              help="Semantic zoom disclosure threshold in pixels.")
@click.option("--min-cluster-size", type=int, default=25, show_default=True)
@click.option("--min-samples", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, default=None,
              help="Alpha radius for cluster boundaries (default: data-driven).")
def serve(
    data_dir: Path, port: int, bind: str, min_belief: float, lod_px: float,
    min_cluster_size: int, min_samples: int, alpha: float | None,
) -> None:
    """Load a dataset and serve the JSON API."""
    from .server import serve as run_server

    dataset = load_dataset(
        data_dir,
        LoadOptions(
            min_belief=min_belief,
            lod_threshold_px=lod_px,
            min_cluster_size=min_cluster_size,
            min_samples=min_samples,
            alpha_radius=alpha,
        ),
    )
    click.echo(
        f"loaded {len(dataset.graphs)} graph(s), {len(dataset.corpus)} documents "
        f"(version {dataset.version_hash[:12]})"
    )
    run_server(dataset, port=port, bind=bind)


@main.command("cluster")
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--min-cluster-size", type=int, default=25, show_default=True)
@click.option("--min-samples", type=int, default=5, show_default=True)
@click.option("--alpha", type=float, default=None,
              help="Alpha radius for boundaries (default: data-driven).")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write cluster export JSON here instead of stdout.")
def cluster_cmd(
    data_dir: Path, min_cluster_size: int, min_samples: int,
    alpha: float | None, out: Path | None,
) -> None:
    """Recluster the corpus and emit the cluster export JSON."""
    dataset = load_dataset(data_dir)
    n = len(dataset.corpus)
    if n < 2:
        raise click.ClickException("corpus too small to cluster")
    mcs = max(2, min(min_cluster_size, n))
    ms = max(1, min(min_samples, n - 1))
    tree = run_cluster(dataset.coords, min_cluster_size=mcs, min_samples=ms)
    boundaries = {
        c.id: cluster_boundary(dataset.coords[sorted(c.members)], alpha)
        for c in tree.clusters
    }
    export = cluster_export(tree, dataset.coords, dataset.corpus.documents, boundaries)
    payload = json.dumps(export, indent=2, sort_keys=True)
    if out is not None:
        out.write_text(payload + "\n", encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(payload)


@main.command("gen-fixture")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--nodes", type=int, default=100, show_default=True)
@click.option("--edges", type=int, default=400, show_default=True)
@click.option("--docs", type=int, default=500, show_default=True)
@click.option("--dim", type=int, default=32, show_default=True)
@click.option("--depth", type=int, default=3, show_default=True)
@click.option("--branching", type=int, default=4, show_default=True)
@click.option("--scenario", is_flag=True,
              help="Write the fixed walkthrough dataset instead of a random one.")
def gen_fixture(
    out_dir: Path, seed: int, nodes: int, edges: int, docs: int,
    dim: int, depth: int, branching: int, scenario: bool,
) -> None:
    """Generate a synthetic dataset directory."""
    if scenario:
        path = scenario_fixture(out_dir)
        click.echo(f"scenario fixture written to {path}")
        return
    params = FixtureParams(
        seed=seed, n_agents=nodes, n_statements=edges, n_docs=docs,
        embedding_dim=dim, ontology_depth=depth, ontology_branching=branching,
    )
    path = gen_dataset(params, out_dir)
    click.echo(f"dataset written to {path}")


@main.command()
@click.option("--data", "data_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("--level", type=int, default=1, show_default=True,
              help="Bundling level for the overview figure.")
def report(data_dir: Path, out_dir: Path, level: int) -> None:
    """Render figures and CSV summaries for a dataset."""
    from .report import render_all

    dataset = load_dataset(data_dir)
    written = render_all(dataset, out_dir, level=level)
    for path in written:
        click.echo(str(path))


if __name__ == "__main__":
    main()
