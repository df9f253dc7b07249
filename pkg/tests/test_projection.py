from __future__ import annotations

import numpy as np
import pytest

from atlas.projection import DegenerateInputError, project_2d


def pairwise_distances(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def test_projection_of_2d_preserves_distances():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 2))
    p = project_2d(x)
    assert np.abs(pairwise_distances(x) - pairwise_distances(p)).max() < 1e-6


def test_rank1_second_column_zero():
    rng = np.random.default_rng(4)
    direction = rng.normal(size=8)
    x = np.outer(rng.normal(size=30), direction)
    p = project_2d(x)
    assert np.abs(p[:, 1]).max() <= 1e-9


def test_matches_eigendecomposition_oracle():
    rng = np.random.default_rng(11)
    x = rng.normal(size=(500, 64)) @ np.diag(np.linspace(3.0, 0.1, 64))
    p = project_2d(x)
    eigenvalues = np.linalg.eigh(np.cov(x.T)).eigenvalues
    assert p[:, 0].var(ddof=1) == pytest.approx(eigenvalues[-1], rel=1e-6)
    assert p[:, 1].var(ddof=1) == pytest.approx(eigenvalues[-2], rel=1e-6)


def test_components_are_orthogonal_directions():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(200, 16)) * np.linspace(2.0, 0.2, 16)
    p = project_2d(x)
    # centered projections onto orthogonal directions are uncorrelated
    assert abs(np.corrcoef(p[:, 0], p[:, 1])[0, 1]) < 1e-6


def test_degenerate_all_rows_equal():
    with pytest.raises(DegenerateInputError):
        project_2d(np.ones((5, 3)))


def test_rejects_bad_shapes():
    with pytest.raises(ValueError):
        project_2d(np.zeros((1, 4)))
    with pytest.raises(ValueError):
        project_2d(np.zeros((4, 1)))
    with pytest.raises(ValueError):
        project_2d(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_deterministic():
    rng = np.random.default_rng(9)
    x = rng.normal(size=(60, 10))
    assert np.array_equal(project_2d(x), project_2d(x))


def test_sign_convention():
    rng = np.random.default_rng(21)
    x = rng.normal(size=(80, 6)) * np.linspace(3.0, 0.5, 6)
    p1 = project_2d(x)
    p2 = project_2d(-x)  # flipping the data flips loadings; convention re-fixes sign
    assert np.allclose(np.abs(p1), np.abs(p2), atol=1e-6)
