"""Fans of cones, polytopes and their normal fans."""

from __future__ import annotations

import itertools
import logging
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from toric.cones import Cone, dual_cone, same_cone
from toric.errors import DimensionMismatch, InputError, InvalidFan, UnknownCone
from toric.linalg import as_rows, as_vector, row_space
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

COMPLETENESS_SAMPLES = 64

ConeKey = int | str


class Fan:
    """A finite face-closed collection of cones in N = R^dim.

    Cone ids are positions in :attr:`cones`; every cone also carries a
    label. When ``close_faces`` is set the faces of the given cones are
    appended (deduplicated) after them.
    """

    def __init__(
        self,
        cones: Sequence[Cone],
        *,
        labels: Sequence[str] | None = None,
        close_faces: bool = True,
        parents: Sequence[int] | None = None,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> None:
        if not cones:
            raise InvalidFan("a fan needs at least one cone")
        dims = {c.dim for c in cones}
        if len(dims) != 1:
            raise DimensionMismatch(f"fan cones live in different dimensions: {sorted(dims)}")
        if labels is not None and len(labels) != len(cones):
            raise InvalidFan("one label per cone is required")

        self.dim = dims.pop()
        self.tol = tol
        kept: list[Cone] = []
        kept_labels: list[str] = []
        kept_parents: list[int] = []

        def add(cone: Cone, label: str, parent: int | None) -> None:
            if any(same_cone(cone, other) for other in kept):
                return
            kept.append(cone)
            kept_labels.append(label)
            if parent is not None:
                kept_parents.append(parent)

        for i, cone in enumerate(cones):
            add(cone, labels[i] if labels is not None else f"c{i}", parents[i] if parents is not None else None)
        if close_faces:
            for i, cone in enumerate(list(kept)):
                for face in cone.faces:
                    add(face.cone, f"{kept_labels[i]}/{'.'.join(map(str, sorted(face.generator_ids)))}", None)

        self.cones: tuple[Cone, ...] = tuple(kept)
        self.labels: tuple[str, ...] = tuple(kept_labels)
        self.parents: tuple[int, ...] | None = tuple(kept_parents) if parents is not None else None
        self._by_dimension = sorted(range(len(kept)), key=lambda i: (kept[i].dimension, i))
        self._stars: dict[int, Fan] = {}

    def __len__(self) -> int:
        return len(self.cones)

    def __repr__(self) -> str:
        return f"Fan(dim={self.dim}, cones={len(self.cones)})"

    # -- lookup -------------------------------------------------------------

    def resolve(self, key: ConeKey) -> int:
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            if 0 <= int(key) < len(self.cones):
                return int(key)
        elif isinstance(key, str) and key in self.labels:
            return self.labels.index(key)
        raise UnknownCone(key)

    def cone(self, key: ConeKey) -> Cone:
        return self.cones[self.resolve(key)]

    def cone_span(self, key: ConeKey) -> np.ndarray:
        return self.cone(key).span_basis

    def cone_label(self, key: ConeKey) -> str:
        return self.labels[self.resolve(key)]

    @property
    def minimal_cone_id(self) -> int:
        return self._by_dimension[0]

    @property
    def lineality_basis(self) -> np.ndarray:
        return self.cones[self.minimal_cone_id].lineality_basis

    @cached_property
    def inclusion(self) -> np.ndarray:
        """inclusion[i, j] is true when cone j is contained in cone i."""
        n = len(self.cones)
        incl = np.eye(n, dtype=bool)
        for i, j in itertools.permutations(range(n), 2):
            if self.cones[j].dimension <= self.cones[i].dimension:
                incl[i, j] = self.cones[i].contains_cone(self.cones[j])
        return incl

    def is_face(self, small: ConeKey, big: ConeKey) -> bool:
        """Face relation proper, not just containment."""
        s, b = self.resolve(small), self.resolve(big)
        return bool(self.inclusion[b, s]) and self.cones[b].faces.index_of(self.cones[s]) is not None

    def minimal_containing_cone(self, v) -> int | None:
        """Id of the cone whose relative interior contains v, or None off the support."""
        v = as_vector(v, self.dim)
        for i in self._by_dimension:
            if self.cones[i].contains(v):
                return i
        return None

    def smallest_common_cone(self, i: ConeKey, j: ConeKey) -> int | None:
        """Smallest cone containing both cones, or None when no cone does."""
        i, j = self.resolve(i), self.resolve(j)
        for k in self._by_dimension:
            if self.inclusion[k, i] and self.inclusion[k, j]:
                return k
        return None

    def maximal_cones(self) -> list[int]:
        n = len(self.cones)
        return [i for i in range(n) if not any(self.inclusion[k, i] and k != i for k in range(n))]

    # -- validity -----------------------------------------------------------

    def validate(self) -> "Fan":
        """Check face closure, a common lineality and pairwise intersections."""
        for i, cone in enumerate(self.cones):
            for face in cone.faces:
                if not any(same_cone(face.cone, other) for other in self.cones):
                    raise InvalidFan(f"a face of cone {self.labels[i]} is missing from the fan")

        reference = self.lineality_basis
        for i, cone in enumerate(self.cones):
            lin = cone.lineality_basis
            stacked = row_space(np.vstack([reference, lin]), self.dim, self.tol)
            if lin.shape[0] != reference.shape[0] or stacked.shape[0] != reference.shape[0]:
                raise InvalidFan(f"cone {self.labels[i]} has a different lineality space")

        incl = self.inclusion
        for i, j in itertools.combinations(range(len(self.cones)), 2):
            if incl[i, j] or incl[j, i]:
                small, big = (j, i) if incl[i, j] else (i, j)
                if not self.is_face(small, big):
                    raise InvalidFan(f"cone {self.labels[small]} lies inside {self.labels[big]} without being a face")
                continue
            self._check_intersection(i, j)
        logger.debug("validated fan with %d cones", len(self.cones))
        return self

    def _check_intersection(self, i: int, j: int) -> None:
        incl = self.inclusion
        common = [
            k for k in range(len(self.cones)) if incl[i, k] and incl[j, k] and self.is_face(k, i) and self.is_face(k, j)
        ]
        if not common:
            raise InvalidFan(f"cones {self.labels[i]} and {self.labels[j]} share no face")
        g = max(common, key=lambda k: self.cones[k].dimension)
        first, second = self.cones[i], self.cones[j]
        slack = 1e3 * self.tol.eps_geom
        gens = self.cones[g].generators
        ineq = first.inequalities
        tight = [h for h in ineq if gens.shape[0] == 0 or np.max(np.abs(gens @ h)) <= slack]
        if not tight:
            return
        exposing = np.sum(tight, axis=0)

        rows_ub = [-first.inequalities, -second.inequalities]
        rows_eq = [first.equations, second.equations]
        a_ub = np.vstack([r for r in rows_ub if r.shape[0]]) if any(r.shape[0] for r in rows_ub) else None
        a_eq = np.vstack([r for r in rows_eq if r.shape[0]]) if any(r.shape[0] for r in rows_eq) else None
        res = linprog(
            -exposing,
            A_ub=a_ub,
            b_ub=None if a_ub is None else np.zeros(a_ub.shape[0]),
            A_eq=a_eq,
            b_eq=None if a_eq is None else np.zeros(a_eq.shape[0]),
            bounds=[(-1, 1)] * self.dim,
            method="highs",
        )
        if res.status != 0:
            raise InvalidFan(f"intersection test failed for {self.labels[i]}, {self.labels[j]}: {res.message}")
        if -res.fun > slack:
            raise InvalidFan(
                f"cones {self.labels[i]} and {self.labels[j]} intersect outside a common face"
            )

    # -- completeness -------------------------------------------------------

    def is_complete(self, *, samples: int = COMPLETENESS_SAMPLES, seed: int = 0) -> bool:
        """Facet pairing of full-dimensional cones, with random sampling as a cross-check."""
        full = [i for i, c in enumerate(self.cones) if c.dimension == self.dim]
        paired = bool(full)
        for i in full:
            for face in self.cones[i].faces.by_dimension(self.dim - 1):
                ids = [k for k, c in enumerate(self.cones) if same_cone(face.cone, c)]
                owners = sum(1 for k in full if ids and self.inclusion[k, ids[0]])
                if owners != 2:
                    paired = False
                    break
            if not paired:
                break

        rng = np.random.default_rng(seed)
        covered = all(
            self.minimal_containing_cone(v) is not None for v in rng.standard_normal((samples, self.dim))
        )
        if covered != paired:
            logger.warning("facet pairing (%s) and direction sampling (%s) disagree", paired, covered)
        return paired

    # -- stars --------------------------------------------------------------

    def star(self, sigma: ConeKey) -> "Fan":
        """Star(σ) = {<σ> + τ : σ a face of τ}; ``parents`` maps back to τ. Built once per cone."""
        s = self.resolve(sigma)
        if s not in self._stars:
            span = self.cones[s].span_basis
            members = [t for t in range(len(self.cones)) if self.inclusion[t, s]]
            cones = [self.cones[t].with_lineality(span) for t in members]
            self._stars[s] = Fan(
                cones,
                labels=[self.labels[t] for t in members],
                close_faces=False,
                parents=members,
                tol=self.tol,
            )
        return self._stars[s]


class Polytope:
    """conv of finitely many points in M; faces come from the homogenised cone."""

    def __init__(self, points: Iterable[Iterable[float]] | np.ndarray, *, tol: Tolerance = DEFAULT_TOLERANCE) -> None:
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            raise InputError("a polytope needs at least one point", field="points")
        pts = np.atleast_2d(pts)
        self.dim = pts.shape[1]
        self.tol = tol
        self.points = pts
        self._homogenized = Cone(np.hstack([pts, np.ones((pts.shape[0], 1))]), self.dim + 1, tol=tol)

        lifted = np.hstack([pts, np.ones((pts.shape[0], 1))])
        slack = tol.scaled(float(np.max(np.abs(lifted))))
        self._face_points: list[frozenset[int]] = []
        for face in self._homogenized.faces:
            if face.dimension == 0:
                continue
            on = np.abs(lifted @ face.exposing) <= slack
            self._face_points.append(frozenset(int(i) for i in np.flatnonzero(on)))

        vertex_ids = []
        for face in self._face_points:
            if self._is_vertex_face(face):
                vertex_ids.append(min(face))
        self._vertex_ids = sorted(vertex_ids)
        self.vertices = pts[self._vertex_ids]

    def _is_vertex_face(self, face: frozenset[int]) -> bool:
        chosen = self.points[sorted(face)]
        return bool(np.all(np.linalg.norm(chosen - chosen[0], axis=1) <= self.tol.eps_geom))

    @property
    def facet_normals(self) -> np.ndarray:
        """Rows (n, c) with n·x + c >= 0 on the polytope, one per facet."""
        return self._homogenized.inequalities

    def point_faces(self) -> list[frozenset[int]]:
        """Faces as sets of input point indices, smallest first."""
        return list(self._face_points)

    def faces(self) -> list[frozenset[int]]:
        """Faces as sets of vertex indices, smallest first."""
        index = {pid: k for k, pid in enumerate(self._vertex_ids)}
        result = []
        for face in self._face_points:
            result.append(frozenset(index[p] for p in face if p in index))
        return result


class NormalFan(Fan):
    """Inner normal fan; ``face_points`` gives the point indices minimised on each cone."""

    def __init__(
        self,
        polytope: Polytope,
        cones: Sequence[Cone],
        faces: Sequence[frozenset[int]],
        *,
        point_names: Sequence[str] | None = None,
    ) -> None:
        names = list(point_names) if point_names is not None else [str(i) for i in range(len(polytope.points))]
        super().__init__(
            cones,
            labels=["{" + ",".join(names[i] for i in sorted(f)) + "}" for f in faces],
            close_faces=False,
            tol=polytope.tol,
        )
        self.polytope = polytope
        self.face_points: tuple[frozenset[int], ...] = tuple(faces)

    def cone_of_face(self, face: Iterable[int]) -> int:
        face = frozenset(face)
        for i, f in enumerate(self.face_points):
            if f == face:
                return i
        raise UnknownCone("{" + ",".join(map(str, sorted(face))) + "}")


def normal_fan(polytope: Polytope, *, point_names: Sequence[str] | None = None) -> NormalFan:
    """σ_F = {v : F lies in argmin of u·v over the polytope}, one cone per face."""
    pts = polytope.points
    cones = []
    faces = polytope.point_faces()
    for face in faces:
        ids = sorted(face)
        base = pts[ids[0]]
        along = pts[ids] - base
        gens = np.vstack([pts - base, along, -along])
        cones.append(dual_cone(Cone(gens, polytope.dim, tol=polytope.tol)))
    # Largest faces give the smallest cones; list the minimal cone first.
    order = sorted(range(len(faces)), key=lambda k: (-len(faces[k]), sorted(faces[k])))
    return NormalFan(polytope, [cones[k] for k in order], [faces[k] for k in order], point_names=point_names)


def simplex_fan(n: int, *, tol: Tolerance = DEFAULT_TOLERANCE) -> Fan:
    """Σ_[n] in R^{n+1}: cones cone{e_i : i in I} + R·(1,...,1) for proper subsets I."""
    dim = n + 1
    eye = np.eye(dim)
    ones = np.ones((1, dim))
    cones, labels = [], []
    for size in range(dim):
        for subset in itertools.combinations(range(dim), size):
            gens = np.vstack([eye[list(subset)].reshape(-1, dim), ones, -ones])
            cones.append(Cone(gens, dim, tol=tol))
            labels.append("{" + ",".join(map(str, subset)) + "}")
    return Fan(cones, labels=labels, close_faces=False, tol=tol)


def boundary_orthant_fan(n: int, *, tol: Tolerance = DEFAULT_TOLERANCE) -> Fan:
    """Σ'_[n] in R^{n+1}: the cones cone{e_i : i in I} for proper subsets I."""
    dim = n + 1
    eye = np.eye(dim)
    cones, labels = [], []
    for size in range(dim):
        for subset in itertools.combinations(range(dim), size):
            cones.append(Cone(as_rows(eye[list(subset)], dim), dim, tol=tol))
            labels.append("{" + ",".join(map(str, subset)) + "}")
    return Fan(cones, labels=labels, close_faces=False, tol=tol)
