"""Small linear-algebra helpers with explicit rank thresholds."""

from __future__ import annotations

from typing import Iterable

import numpy as np
from scipy import linalg

from toric.errors import DimensionMismatch
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance


def as_vector(values: Iterable[float] | np.ndarray, dim: int | None = None) -> np.ndarray:
    vec = np.asarray(values, dtype=float).reshape(-1)
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatch(f"expected a vector of dimension {dim}, got {vec.shape[0]}")
    return vec


def as_rows(values, dim: int) -> np.ndarray:
    """Stack vectors into a (k, dim) array; an empty input gives shape (0, dim)."""
    rows = np.asarray(values, dtype=float)
    if rows.size == 0:
        return np.zeros((0, dim))
    rows = np.atleast_2d(rows)
    if rows.shape[1] != dim:
        raise DimensionMismatch(f"expected vectors of dimension {dim}, got {rows.shape[1]}")
    return rows


def pair(u: np.ndarray, v: np.ndarray) -> float:
    """The bilinear pairing u·v between M and N."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatch(f"cannot pair vectors of shapes {u.shape} and {v.shape}")
    return float(u @ v)


def _rank_cutoff(singular: np.ndarray, tol: Tolerance) -> float:
    top = float(singular[0]) if singular.size else 0.0
    return tol.scaled(top)


def row_space(rows: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis (as rows) of the span of ``rows``."""
    rows = as_rows(rows, dim)
    if rows.shape[0] == 0:
        return np.zeros((0, dim))
    _, singular, vt = linalg.svd(rows, full_matrices=False)
    rank = int(np.sum(singular > _rank_cutoff(singular, tol)))
    return vt[:rank].copy()


def null_space(rows: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis (as rows) of {x : rows @ x = 0}."""
    rows = as_rows(rows, dim)
    if rows.shape[0] == 0:
        return np.eye(dim)
    _, singular, vt = linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(singular > _rank_cutoff(singular, tol)))
    return vt[rank:].copy()


def complement(basis: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis)."""
    return null_space(basis, dim, tol)


def project_out(vec: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Component of ``vec`` orthogonal to the orthonormal rows of ``basis``."""
    vec = np.asarray(vec, dtype=float)
    if basis.shape[0] == 0:
        return vec.copy()
    return vec - basis.T @ (basis @ vec)


def project_onto(vec: np.ndarray, basis: np.ndarray) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if basis.shape[0] == 0:
        return np.zeros_like(vec)
    return basis.T @ (basis @ vec)


def rank(rows: np.ndarray, dim: int, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    return row_space(rows, dim, tol).shape[0]


def affine_rank(points: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Dimension of the affine span of the rows of ``points`` (-1 when empty)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        return -1
    diffs = points[1:] - points[0]
    return rank(diffs, points.shape[1], tol)


def affine_basis(points: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Orthonormal basis of the direction space of the affine span of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return row_space(points[1:] - points[0], points.shape[1], tol)


def simplex_volume(points: np.ndarray) -> float:
    """k-dimensional volume of the simplex with k+1 vertices, via the Gram determinant."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    k = points.shape[0] - 1
    if k <= 0:
        return 1.0
    edges = points[1:] - points[0]
    gram = edges @ edges.T
    det = max(float(linalg.det(gram)), 0.0)
    return float(np.sqrt(det) / np.prod(np.arange(1, k + 1)))
