from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from sklearn.metrics import adjusted_rand_score

from atlas.density import cluster

GOLDEN = Path(__file__).parent / "golden" / "cluster_blobs_reference.json"


def blob_benchmark():
    rng = np.random.default_rng(42)
    centers = np.array([[0, 0], [2, 0], [0, 2], [2, 2], [4, 1]], dtype=float)
    points, labels = [], []
    for i, center in enumerate(centers):
        points.append(rng.normal(scale=0.05, size=(200, 2)) + center)
        labels.extend([i] * 200)
    return np.vstack(points), labels


@pytest.fixture(scope="module")
def blob_tree():
    coords, _ = blob_benchmark()
    return cluster(coords, min_cluster_size=25, min_samples=5)


def test_blobs_match_ground_truth(blob_tree):
    _, truth = blob_benchmark()
    assert adjusted_rand_score(truth, blob_tree.labels()) >= 0.95


def test_blobs_match_reference_golden(blob_tree):
    golden = json.loads(GOLDEN.read_text())
    assert golden["params"]["min_cluster_size"] == 25
    assert adjusted_rand_score(golden["reference_labels"], blob_tree.labels()) >= 0.95
    # the frozen reference itself agrees with the ground truth
    assert adjusted_rand_score(golden["truth"], golden["reference_labels"]) >= 0.95


def test_blobs_deterministic():
    coords, _ = blob_benchmark()
    a = cluster(coords, min_cluster_size=25, min_samples=5)
    b = cluster(coords, min_cluster_size=25, min_samples=5)
    assert a == b


def test_fine_nested_in_coarse(blob_tree):
    by_id = {c.id: c for c in blob_tree.clusters}
    for fine in blob_tree.fine():
        assert fine.parent is not None
        coarse = by_id[fine.parent]
        assert coarse.level == "coarse"
        assert fine.members <= coarse.members
        assert fine.hue == coarse.hue  # hue preserved across levels


def test_fine_clusters_partition_with_noise(blob_tree):
    seen: set[int] = set()
    for fine in blob_tree.fine():
        assert len(fine.members) >= 25
        assert not (fine.members & seen)
        seen |= fine.members
    assert seen | blob_tree.noise == set(range(blob_tree.n_points))
    assert not (seen & blob_tree.noise)


def test_minimum_size_precondition():
    pts = np.random.default_rng(0).normal(size=(4, 2))
    with pytest.raises(ValueError):
        cluster(pts, min_cluster_size=5, min_samples=2)


def test_tight_blob_of_exactly_min_cluster_size():
    rng = np.random.default_rng(1)
    pts = np.full((5, 2), 3.0) + rng.normal(scale=1e-9, size=(5, 2))
    tree = cluster(pts, min_cluster_size=5, min_samples=2)
    assert len(tree.fine()) == 1
    assert tree.noise == frozenset()
    assert tree.fine()[0].members == frozenset(range(5))


def test_noise_detected_with_outliers():
    rng = np.random.default_rng(7)
    blob_a = rng.normal(scale=0.05, size=(50, 2))
    blob_b = rng.normal(scale=0.05, size=(50, 2)) + [5.0, 0.0]
    strays = np.array([[2.5, 8.0], [-4.0, -6.0], [9.0, 9.0]])
    tree = cluster(np.vstack([blob_a, blob_b, strays]), min_cluster_size=20, min_samples=5)
    assert len(tree.fine()) == 2
    assert {100, 101, 102} <= tree.noise


def test_varied_parameters_keep_invariants():
    rng = np.random.default_rng(13)
    coords = np.vstack(
        [
            rng.normal(scale=0.1, size=(80, 2)),
            rng.normal(scale=0.1, size=(60, 2)) + [3, 1],
            rng.uniform(-2, 5, size=(30, 2)),
        ]
    )
    for mcs, ms in ((5, 1), (10, 3), (25, 5), (40, 10)):
        tree = cluster(coords, min_cluster_size=mcs, min_samples=ms)
        by_id = {c.id: c for c in tree.clusters}
        covered: set[int] = set()
        for fine in tree.fine():
            assert len(fine.members) >= mcs
            assert not (fine.members & covered)
            covered |= fine.members
            if fine.parent is not None:
                assert fine.members <= by_id[fine.parent].members
        assert covered | tree.noise == set(range(tree.n_points))
