"""Polyhedral cones: generators, facet normals, duals, faces and lineality."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from toric.errors import DimensionMismatch, InfeasibleDecomposition, InvalidCone
from toric.linalg import as_rows, as_vector, complement, project_out, row_space
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

# Facet enumeration goes through qhull in the quotient space; past this it is
# neither fast nor numerically trustworthy at our tolerances.
MAX_AMBIENT_DIM = 8


def _unit_generators(rows: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Normalise, drop zero vectors and merge generators pointing the same way."""
    kept: list[np.ndarray] = []
    for row in rows:
        norm = float(np.linalg.norm(row))
        if norm <= tol.eps_geom:
            continue
        unit = row / norm
        if any(np.linalg.norm(unit - other) <= tol.eps_geom for other in kept):
            continue
        kept.append(unit)
    if not kept:
        return np.zeros((0, rows.shape[1]))
    return np.vstack(kept)


class Cone:
    """cone{v_1, ..., v_k} in a real vector space of dimension ``dim``.

    Generators are stored as unit vectors. The facet normals (inward, unit)
    and the equations of the linear span are derived on first use; the
    instance is otherwise immutable.
    """

    def __init__(
        self,
        generators: Iterable[Iterable[float]] | np.ndarray,
        dim: int | None = None,
        *,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> None:
        raw = np.asarray(list(generators) if not isinstance(generators, np.ndarray) else generators, dtype=float)
        if dim is None:
            if raw.size == 0:
                raise InvalidCone("a cone without generators needs an explicit dimension")
            dim = int(np.atleast_2d(raw).shape[1])
        rows = as_rows(raw, dim)
        if not np.all(np.isfinite(rows)):
            raise InvalidCone("cone generators must be finite")
        self.dim = dim
        self.tol = tol
        self._generators = _unit_generators(rows, tol)
        self._generators.setflags(write=False)

    # -- basic data ---------------------------------------------------------

    @property
    def generators(self) -> np.ndarray:
        return self._generators

    def __repr__(self) -> str:
        gens = ", ".join(
            "(" + ", ".join(f"{x:.4g}" for x in g) + ")" for g in self._generators
        )
        return f"Cone[{self.dim}]{{{gens}}}"

    @cached_property
    def span_basis(self) -> np.ndarray:
        """Orthonormal basis of the linear span <σ>."""
        return row_space(self._generators, self.dim, self.tol)

    @cached_property
    def equations(self) -> np.ndarray:
        """Orthonormal basis of σ⊥; the cone lies in {v : E v = 0}."""
        return complement(self.span_basis, self.dim, self.tol)

    @property
    def dimension(self) -> int:
        return self.span_basis.shape[0]

    @cached_property
    def lineality_basis(self) -> np.ndarray:
        """Orthonormal basis of the largest linear subspace inside the cone."""
        gens = self._generators
        k = gens.shape[0]
        if k == 0:
            return np.zeros((0, self.dim))
        # Maximise the support of a nonnegative dependency sum(lam_i g_i) = 0;
        # its support is exactly the set of generators lying in the lineality.
        c = np.concatenate([np.zeros(k), -np.ones(k)])
        a_eq = np.hstack([gens.T, np.zeros((self.dim, k))])
        b_eq = np.zeros(self.dim)
        a_ub = np.hstack([-np.eye(k), np.eye(k)])
        b_ub = np.zeros(k)
        bounds = [(0, None)] * k + [(0, 1)] * k
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
        if res.status != 0:
            raise InvalidCone(f"lineality computation failed: {res.message}")
        support = res.x[k:] > 0.5
        return row_space(gens[support], self.dim, self.tol)

    @property
    def is_pointed(self) -> bool:
        return self.lineality_basis.shape[0] == 0

    @property
    def is_linear(self) -> bool:
        return self.lineality_basis.shape[0] == self.span_basis.shape[0]

    @cached_property
    def inequalities(self) -> np.ndarray:
        """Unit inward facet normals h with h·v >= 0 on the cone, h in <σ> ∩ L⊥."""
        if self.dim > MAX_AMBIENT_DIM:
            raise InvalidCone(
                f"facet enumeration is limited to ambient dimension {MAX_AMBIENT_DIM}, got {self.dim}"
            )
        lineality = self.lineality_basis
        quotient = row_space(
            np.array([project_out(row, lineality) for row in self.span_basis]).reshape(-1, self.dim),
            self.dim,
            self.tol,
        )
        k = quotient.shape[0]
        if k == 0:
            return np.zeros((0, self.dim))

        pts = self._generators @ quotient.T
        norms = np.linalg.norm(pts, axis=1)
        pts = pts[norms > self.tol.eps_geom] / norms[norms > self.tol.eps_geom, None]

        if k == 1:
            sign = 1.0 if pts[0, 0] > 0 else -1.0
            return (sign * quotient[0]).reshape(1, -1)

        try:
            hull = ConvexHull(np.vstack([np.zeros(k), pts]))
        except QhullError as exc:
            raise InvalidCone(f"qhull failed on cone {self!r}: {exc}") from exc

        normals: list[np.ndarray] = []
        for eq in hull.equations:
            outward, offset = eq[:-1], eq[-1]
            if abs(offset) > 1e3 * self.tol.eps_geom:
                continue
            inward = quotient.T @ (-outward)
            inward /= np.linalg.norm(inward)
            if any(np.linalg.norm(inward - other) <= 1e3 * self.tol.eps_geom for other in normals):
                continue
            normals.append(inward)
        return np.vstack(normals)

    # -- membership ---------------------------------------------------------

    def _check(self, v: np.ndarray) -> np.ndarray:
        return as_vector(v, self.dim)

    def contains(self, v) -> bool:
        v = self._check(v)
        slack = self.tol.scaled(float(np.linalg.norm(v)))
        eq = self.equations
        if eq.shape[0] and np.max(np.abs(eq @ v)) > slack:
            return False
        ineq = self.inequalities
        return not (ineq.shape[0] and np.min(ineq @ v) < -slack)

    def in_relative_interior(self, v) -> bool:
        v = self._check(v)
        if not self.contains(v):
            return False
        ineq = self.inequalities
        if ineq.shape[0] == 0:
            return True
        return bool(np.min(ineq @ v) > self.tol.scaled(float(np.linalg.norm(v))))

    def contains_cone(self, other: "Cone") -> bool:
        if other.dim != self.dim:
            raise DimensionMismatch(f"cones live in dimensions {self.dim} and {other.dim}")
        return all(self.contains(g) for g in other.generators)

    def relative_interior_point(self) -> np.ndarray:
        """Sum of the generators, which lies in the relative interior."""
        if self._generators.shape[0] == 0:
            return np.zeros(self.dim)
        return self._generators.sum(axis=0)

    def with_lineality(self, basis: np.ndarray) -> "Cone":
        """The cone σ + span(basis)."""
        basis = as_rows(basis, self.dim)
        return Cone(np.vstack([self._generators, basis, -basis]), self.dim, tol=self.tol)

    def dual(self) -> "Cone":
        return dual_cone(self)

    @cached_property
    def faces(self) -> "FaceLattice":
        return face_lattice(self)


def same_cone(first: Cone, second: Cone) -> bool:
    """Equality of cones as sets, decided by mutual containment of generators."""
    if first.dim != second.dim:
        return False
    return first.contains_cone(second) and second.contains_cone(first)


def dual_cone(cone: Cone) -> Cone:
    """σ∨ = {u : u·v >= 0 for all v in σ}, generated by facet normals and ±σ⊥."""
    eq = cone.equations
    gens = np.vstack([cone.inequalities, eq, -eq]) if eq.shape[0] else cone.inequalities
    return Cone(gens, cone.dim, tol=cone.tol)


@dataclass(frozen=True)
class Face:
    generator_ids: frozenset[int]
    facet_ids: frozenset[int]
    cone: Cone = field(compare=False)
    exposing: np.ndarray = field(compare=False, repr=False)

    @property
    def dimension(self) -> int:
        return self.cone.dimension


@dataclass(frozen=True)
class FaceLattice:
    """All faces of a cone ordered by dimension; index 0 is the lineality space."""

    parent: Cone = field(repr=False)
    faces: tuple[Face, ...]

    def __len__(self) -> int:
        return len(self.faces)

    def __iter__(self) -> Iterator[Face]:
        return iter(self.faces)

    def __getitem__(self, index: int) -> Face:
        return self.faces[index]

    @property
    def minimal(self) -> Face:
        return self.faces[0]

    @property
    def top(self) -> Face:
        return self.faces[-1]

    def is_face_of(self, i: int, j: int) -> bool:
        """Inclusion order: face i is contained in face j."""
        return self.faces[i].generator_ids <= self.faces[j].generator_ids and (
            self.faces[i].facet_ids >= self.faces[j].facet_ids
        )

    def by_dimension(self, dimension: int) -> list[Face]:
        return [face for face in self.faces if face.dimension == dimension]

    def index_of(self, cone: Cone) -> int | None:
        for i, face in enumerate(self.faces):
            if same_cone(face.cone, cone):
                return i
        return None


def face_lattice(cone: Cone) -> FaceLattice:
    """Enumerate faces by intersecting with facets one at a time."""
    gens = cone.generators
    ineq = cone.inequalities
    lineality = cone.lineality_basis
    n_facets = ineq.shape[0]
    slack = 1e3 * cone.tol.eps_geom
    tight = np.abs(gens @ ineq.T) <= slack if gens.shape[0] else np.zeros((0, n_facets), dtype=bool)

    def closure(gen_ids: frozenset[int]) -> frozenset[int]:
        if not gen_ids:
            return frozenset(range(n_facets))
        mask = np.all(tight[sorted(gen_ids)], axis=0)
        return frozenset(int(i) for i in np.flatnonzero(mask))

    def make_face(gen_ids: frozenset[int], facet_ids: frozenset[int]) -> Face:
        face_gens = gens[sorted(gen_ids)] if gen_ids else np.zeros((0, cone.dim))
        if lineality.shape[0]:
            face_gens = np.vstack([face_gens, lineality, -lineality])
        exposing = ineq[sorted(facet_ids)].sum(axis=0) if facet_ids else np.zeros(cone.dim)
        return Face(gen_ids, facet_ids, Cone(face_gens, cone.dim, tol=cone.tol), exposing)

    start = frozenset(range(gens.shape[0]))
    seen: dict[frozenset[int], Face] = {start: make_face(start, frozenset())}
    queue = [start]
    while queue:
        current = queue.pop()
        face = seen[current]
        for h in range(n_facets):
            if h in face.facet_ids:
                continue
            gen_ids = frozenset(i for i in current if tight[i, h])
            if gen_ids in seen:
                continue
            seen[gen_ids] = make_face(gen_ids, closure(gen_ids))
            queue.append(gen_ids)

    ordered = sorted(seen.values(), key=lambda f: (f.dimension, sorted(f.generator_ids)))
    return FaceLattice(cone, tuple(ordered))


def dual_face(cone: Cone, face: Face) -> Cone:
    """σ∨ ∩ F⊥, the face of the dual cone matched with F."""
    ineq = cone.inequalities
    eq = cone.equations
    rows = [ineq[sorted(face.facet_ids)]] if face.facet_ids else []
    if eq.shape[0]:
        rows += [eq, -eq]
    gens = np.vstack(rows) if rows else np.zeros((0, cone.dim))
    return Cone(gens, cone.dim, tol=cone.tol)


def decompose_over_face(sigma: Cone, tau: Cone, w) -> tuple[np.ndarray, np.ndarray]:
    """Write w in τ∨ as u - ℓ with u, ℓ in σ∨ and ℓ in τ⊥."""
    w = as_vector(w, sigma.dim)
    index = sigma.faces.index_of(tau)
    if index is None:
        raise InvalidCone(f"{tau!r} is not a face of {sigma!r}")
    slack = sigma.tol.scaled(float(np.linalg.norm(w)))
    if tau.generators.shape[0] and np.min(tau.generators @ w) < -slack:
        raise InfeasibleDecomposition("w does not lie in the dual of the face")

    if all(float(g @ w) >= -slack for g in sigma.generators):
        return w.copy(), np.zeros(sigma.dim)

    dual_gens = dual_face(sigma, sigma.faces[index]).generators
    k = dual_gens.shape[0]
    if k == 0:
        raise InfeasibleDecomposition("σ∨ ∩ τ⊥ is trivial and w is not in σ∨")
    # (w + D^T mu)·g >= 0 for every generator g of σ, mu >= 0, minimal total weight.
    a_ub = -(sigma.generators @ dual_gens.T)
    b_ub = sigma.generators @ w
    res = linprog(np.ones(k), A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * k, method="highs")
    if res.status != 0:
        raise InfeasibleDecomposition(f"no decomposition found: {res.message}")
    ell = dual_gens.T @ res.x
    return w + ell, ell
