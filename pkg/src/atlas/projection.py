"""Built-in 2D projection of embeddings: top-2 principal directions.

Stands in when no precomputed coordinates ship with the corpus. Power
iteration with deflation on the covariance matrix; deterministic start
vector and sign convention, so identical inputs give identical outputs.
"""

from __future__ import annotations

import numpy as np

_TOLERANCE = 1e-9
_MAX_ITERATIONS = 10_000


class DegenerateInputError(ValueError):
    """All rows identical: no principal direction exists."""


def _start_vectors(d: int):
    yield np.full(d, 1.0 / np.sqrt(d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        yield e


def _power_iteration(cov: np.ndarray) -> tuple[np.ndarray, float]:
    d = cov.shape[0]
    scale = float(np.abs(cov).max()) or 1.0
    v = np.full(d, 1.0 / np.sqrt(d))
    # Deterministic starts, skipping any that the matrix annihilates
    # (possible when the start is orthogonal to the whole column space).
    for candidate in _start_vectors(d):
        if float(np.linalg.norm(cov @ candidate)) >= _TOLERANCE * scale:
            v = candidate
            break
    else:
        return v, 0.0  # zero matrix: no direction to find
    eigenvalue = 0.0
    for _ in range(_MAX_ITERATIONS):
        w = cov @ v
        norm = float(np.linalg.norm(w))
        if norm < _TOLERANCE:
            return v, 0.0
        w /= norm
        converged = (
            float(np.linalg.norm(w - v)) < _TOLERANCE
            or float(np.linalg.norm(w + v)) < _TOLERANCE
        )
        v = w
        eigenvalue = norm
        if converged:
            break
    return v, eigenvalue


def _fix_sign(v: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(v)))
    return -v if v[pivot] < 0 else v


def project_2d(embeddings: np.ndarray) -> np.ndarray:
    """Mean-center and project onto the top two principal directions.

    Requires at least 2 rows and 2 columns of finite values. Rank-0 input
    (all rows equal) raises DegenerateInputError; rank-1 input yields a
    second column of zeros. Each component's sign is fixed so its
    largest-magnitude loading is positive.
    """
    x = np.asarray(embeddings, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 2:
        raise ValueError("embeddings must be an n x d matrix with n >= 2 and d >= 2")
    if not np.all(np.isfinite(x)):
        raise ValueError("embeddings must be finite")
    centered = x - x.mean(axis=0, keepdims=True)
    if not np.any(np.abs(centered) > 1e-12):
        raise DegenerateInputError("all embedding rows are identical")

    cov = centered.T @ centered / (x.shape[0] - 1)
    v1, lam1 = _power_iteration(cov)
    v1 = _fix_sign(v1)
    deflated = cov - lam1 * np.outer(v1, v1)
    v2, _ = _power_iteration(deflated)
    v2 = v2 - (v2 @ v1) * v1  # guard against drift back into the first component
    norm2 = float(np.linalg.norm(v2))
    if norm2 > _TOLERANCE:
        v2 = v2 / norm2
    v2 = _fix_sign(v2)
    return centered @ np.stack([v1, v2], axis=1)
