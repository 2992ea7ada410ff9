"""Labelled point configurations, regular subdivisions and secondary-polytope data."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from toric.cones import Cone
from toric.errors import InputError, NotATriangulation
from toric.fans import Polytope
from toric.linalg import affine_basis, affine_rank, null_space, row_space, simplex_volume
from toric.tolerance import DEFAULT_TOLERANCE, Tolerance

logger = logging.getLogger(__name__)

MAX_ENUMERATION_SIZE = 12
ORACLE_MAX_POINTS = 6
ORACLE_MAX_DIMENSION = 2

LabelSet = frozenset[str]


@dataclass(frozen=True, eq=False)
class PointConfig:
    """A finite labelled configuration A in M = R^dim.

    ``affine`` records whether the points lie on a hyperplane u·m = r with
    r != 0. Leave it as None to detect it; when false, projective
    constructions go through :meth:`homogenized`.
    """

    labels: tuple[str, ...]
    coords: np.ndarray
    affine: bool | None = None
    tol: Tolerance = field(default=DEFAULT_TOLERANCE, repr=False)

    def __post_init__(self) -> None:
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if len(self.labels) == 0:
            raise InputError("a configuration needs at least one point", field="points")
        if len(set(self.labels)) != len(self.labels):
            raise InputError("labels must be unique", field="points")
        if coords.shape[0] != len(self.labels):
            raise InputError(f"expected {len(self.labels)} points, got {coords.shape[0]}", field="points")
        if not np.all(np.isfinite(coords)):
            raise InputError("coordinates must be finite", field="points")
        coords.setflags(write=False)
        object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))
        object.__setattr__(self, "coords", coords)
        if self.affine and not self._detect_affine():
            raise InputError("points do not lie on an affine hyperplane missing the origin", field="affine")

    @classmethod
    def from_mapping(
        cls,
        points: Mapping[str, Sequence[float]],
        *,
        affine: bool | None = None,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> "PointConfig":
        labels = list(points)
        widths = {len(points[label]) for label in labels}
        if len(widths) > 1:
            raise InputError(f"points have mixed dimensions {sorted(widths)}", field="points")
        return cls(tuple(labels), np.array([points[label] for label in labels], dtype=float), affine, tol)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointConfig):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.coords, other.coords)

    def __hash__(self) -> int:
        return hash((self.labels, self.coords.tobytes()))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown label {label!r}", field="labels") from None

    def indices(self, labels: Iterable[str]) -> list[int]:
        return sorted(self.index(label) for label in labels)

    def point(self, label: str) -> np.ndarray:
        return self.coords[self.index(label)]

    def label_set(self, ids: Iterable[int]) -> LabelSet:
        return frozenset(self.labels[i] for i in ids)

    def ordered(self, labels: Iterable[str]) -> list[str]:
        """Labels sorted in configuration order."""
        return [self.labels[i] for i in self.indices(labels)]

    def _detect_affine(self) -> bool:
        # Solve coords @ u = 1; exact means a hyperplane u·m = 1 holds all points.
        u, *_ = np.linalg.lstsq(self.coords, np.ones(len(self)), rcond=None)
        residual = float(np.max(np.abs(self.coords @ u - 1.0)))
        return residual <= self.tol.scaled(float(np.max(np.abs(self.coords))))

    @cached_property
    def is_affine(self) -> bool:
        if self.affine is not None:
            return bool(self.affine)
        return self._detect_affine()

    def homogenized(self) -> "PointConfig":
        """The configuration itself when affine, else its copy at height 1."""
        if self.is_affine:
            return self
        lifted = np.hstack([self.coords, np.ones((len(self), 1))])
        return PointConfig(self.labels, lifted, True, self.tol)

    def restrict(self, labels: Iterable[str]) -> "PointConfig":
        ids = self.indices(labels)
        return PointConfig(tuple(self.labels[i] for i in ids), self.coords[ids], self.affine, self.tol)

    @cached_property
    def diameter(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.max(pdist(self.coords)))

    @cached_property
    def affine_dimension(self) -> int:
        return affine_rank(self.coords, self.tol)

    @cached_property
    def affine_coords(self) -> np.ndarray:
        """Coordinates in an orthonormal frame of the affine span (shape n x affine_dimension)."""
        basis = affine_basis(self.coords, self.tol)
        return (self.coords - self.coords[0]) @ basis.T

    @cached_property
    def lineality_basis(self) -> np.ndarray:
        """Lifts that are affine functions on A: the lineality of the secondary fan."""
        rows = np.vstack([self.coords.T, np.ones((1, len(self)))])
        return row_space(rows, len(self), self.tol)

    @cached_property
    def hull_cone(self) -> Cone:
        """cone over conv(A) placed at height 1; its facets are the facets of conv(A)."""
        lifted = np.hstack([self.coords, np.ones((len(self), 1))])
        return Cone(lifted, self.dim + 1, tol=self.tol)


def lift_vector(config: PointConfig, values: Mapping[str, float] | Sequence[float] | np.ndarray) -> np.ndarray:
    """A lift λ in R^A aligned with the configuration's labels."""
    if isinstance(values, Mapping):
        missing = [label for label in config.labels if label not in values]
        if missing:
            raise InputError(f"missing values for {missing}", field="lift")
        extra = sorted(set(values) - set(config.labels))
        if extra:
            raise InputError(f"unknown labels {extra}", field="lift")
        vec = np.array([float(values[label]) for label in config.labels])
    else:
        vec = np.asarray(values, dtype=float).reshape(-1)
        if vec.shape[0] != len(config):
            raise InputError(f"expected {len(config)} values, got {vec.shape[0]}", field="lift")
    if not np.all(np.isfinite(vec)):
        raise InputError("values must be finite", field="lift")
    return vec


# -- faces ------------------------------------------------------------------


def config_faces(config: PointConfig) -> list[LabelSet]:
    """Label sets A ∩ F for the nonempty faces F of conv(A), smallest first."""
    polytope = Polytope(config.coords, tol=config.tol)
    return [config.label_set(face) for face in polytope.point_faces()]


def cone_faces(config: PointConfig) -> list[LabelSet]:
    """Label sets of A lying on the nonempty faces of cone(A), smallest first."""
    cone = Cone(config.coords, config.dim, tol=config.tol)
    slack = config.tol.scaled(float(np.max(np.abs(config.coords))))
    seen: list[LabelSet] = []
    for face in cone.faces:
        on = np.abs(config.coords @ face.exposing) <= slack
        labels = config.label_set(np.flatnonzero(on))
        if labels and labels not in seen:
            seen.append(labels)
    return seen


# -- subdivisions -----------------------------------------------------------


@dataclass(frozen=True)
class Subdivision:
    """A face system on A, determined by its facets (maximal faces)."""

    facets: frozenset[LabelSet]
    config: PointConfig = field(compare=False, repr=False)
    defining_lift: tuple[float, ...] | None = field(default=None, compare=False, repr=False)

    @cached_property
    def faces(self) -> frozenset[LabelSet]:
        result: set[LabelSet] = set()
        for facet in self.facets:
            result.update(config_faces(self.config.restrict(facet)))
        return frozenset(result)

    @property
    def participating(self) -> LabelSet:
        return frozenset().union(*self.facets) if self.facets else frozenset()

    def sorted_facets(self) -> list[list[str]]:
        ordered = [self.config.ordered(facet) for facet in self.facets]
        return sorted(ordered, key=lambda f: [self.config.index(label) for label in f])

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(f) + "}" for f in self.sorted_facets()) + "}"


def _maximal(sets: Iterable[LabelSet]) -> frozenset[LabelSet]:
    unique = set(sets)
    return frozenset(s for s in unique if not any(s < other for other in unique))


def regular_subdivision(config: PointConfig, lam, *, tol: Tolerance | None = None) -> Subdivision:
    """S(λ): label sets on the lower faces of the lifted polytope Q_λ."""
    tol = tol or config.tol
    lam = lift_vector(config, lam)
    points = config.affine_coords
    k = points.shape[1]
    lifted = np.hstack([points, lam[:, None]])
    slack = tol.scaled(float(np.max(np.abs(lifted))) if lifted.size else 1.0)

    if k == 0:
        lowest = np.flatnonzero(lam <= lam.min() + slack)
        return Subdivision(frozenset({config.label_set(lowest)}), config, tuple(lam))

    if affine_rank(lifted, tol) == k:
        return Subdivision(frozenset({frozenset(config.labels)}), config, tuple(lam))

    try:
        hull = ConvexHull(lifted)
    except QhullError:
        # Nearly flat lifts confuse qhull; joggle and trust the plane test below.
        hull = ConvexHull(lifted, qhull_options="QJ")

    facets: list[LabelSet] = []
    for eq in hull.equations:
        normal, offset = eq[:-1], eq[-1]
        if normal[-1] >= -tol.eps_geom:
            continue
        on = np.abs(lifted @ normal + offset) <= slack
        facets.append(config.label_set(np.flatnonzero(on)))
    return Subdivision(_maximal(facets), config, tuple(lam))


def is_triangulation(subdivision: Subdivision, config: PointConfig) -> bool:
    """Every facet is the vertex set of a simplex."""
    for facet in subdivision.facets:
        pts = config.coords[config.indices(facet)]
        if len(facet) != affine_rank(pts, config.tol) + 1:
            return False
    return True


def refines(first: Subdivision, second: Subdivision) -> bool:
    return all(any(f <= g for g in second.facets) for f in first.facets)


def same_secondary_cone(config: PointConfig, lam, mu) -> bool:
    return regular_subdivision(config, lam) == regular_subdivision(config, mu)


def check_subdivision(config: PointConfig, subdivision: Subdivision, *, samples: int = 64, seed: int = 0) -> list[str]:
    """Problems with the cover and intersection properties; empty when sound."""
    problems: list[str] = []
    faces = subdivision.faces
    for f, g in itertools.combinations(subdivision.facets, 2):
        common = f & g
        if common and common not in faces:
            problems.append(f"facets {sorted(f)} and {sorted(g)} meet in a non-face {sorted(common)}")

    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(len(config)), size=samples)
    facet_points = [config.coords[config.indices(f)] for f in subdivision.facets]
    for x in weights @ config.coords:
        if not any(in_convex_hull(pts, x, config.tol) for pts in facet_points):
            problems.append(f"point {np.round(x, 6).tolist()} is not covered by any facet")
            break
    return problems


def in_convex_hull(points: np.ndarray, x: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Feasibility of x = Σ c_i p_i with c >= 0, Σ c_i = 1."""
    n = points.shape[0]
    a_eq = np.vstack([points.T, np.ones((1, n))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(n), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * n, method="highs")
    if res.status != 0:
        return False
    return bool(np.max(np.abs(a_eq @ res.x - b_eq)) <= tol.scaled(float(np.max(np.abs(points)))) * 10)


# -- GKZ vectors ------------------------------------------------------------


@dataclass(frozen=True)
class GkzVector:
    labels: tuple[str, ...]
    coords: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.coords))


def gkz_vertex(config: PointConfig, triangulation: Subdivision) -> GkzVector:
    """Per-label sum of the volumes of the simplices containing that label."""
    if not is_triangulation(triangulation, config):
        raise NotATriangulation(f"{triangulation} is not a triangulation")
    coords = np.zeros(len(config))
    for facet in triangulation.facets:
        ids = config.indices(facet)
        volume = simplex_volume(config.coords[ids])
        coords[ids] += volume
    return GkzVector(config.labels, tuple(float(c) for c in coords))


def secondary_cone_inequalities(config: PointConfig, triangulation: Subdivision) -> np.ndarray:
    """Rows r with S(λ) = T exactly when r·λ > 0 for every row."""
    if not is_triangulation(triangulation, config):
        raise NotATriangulation(f"{triangulation} is not a triangulation")
    points = config.affine_coords
    n = len(config)
    rows: list[np.ndarray] = []
    for facet in triangulation.sorted_facets():
        ids = config.indices(facet)
        frame = np.vstack([points[ids].T, np.ones((1, len(ids)))])
        for b in range(n):
            if b in ids:
                continue
            target = np.concatenate([points[b], [1.0]])
            beta, *_ = np.linalg.lstsq(frame, target, rcond=None)
            row = np.zeros(n)
            row[b] = 1.0
            row[ids] -= beta
            rows.append(row)
    if not rows:
        return np.zeros((0, n))
    return _distinct_directions(np.vstack(rows), config.tol)


def _distinct_directions(rows: np.ndarray, tol: Tolerance) -> np.ndarray:
    kept: list[np.ndarray] = []
    for row in rows:
        unit = row / np.linalg.norm(row)
        if not any(np.linalg.norm(unit - other) <= 1e3 * tol.eps_geom for other in kept):
            kept.append(unit)
    return np.vstack(kept)


@dataclass(frozen=True)
class RegularityCertificate:
    regular: bool
    margin: float
    lift: np.ndarray | None = field(default=None, compare=False)


def _max_margin(rows: np.ndarray, lineality: np.ndarray, *, on_wall: np.ndarray | None = None):
    """max t subject to r·λ >= t for all rows, λ ⊥ lineality, |λ| <= 1, t <= 1."""
    m, n = rows.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-rows, np.ones((m, 1))]) if m else None
    b_ub = np.zeros(m) if m else None
    eq_rows = [lineality] if lineality.shape[0] else []
    if on_wall is not None:
        eq_rows.append(on_wall.reshape(1, -1))
    a_eq = np.hstack([np.vstack(eq_rows), np.zeros((sum(r.shape[0] for r in eq_rows), 1))]) if eq_rows else None
    b_eq = np.zeros(a_eq.shape[0]) if a_eq is not None else None
    bounds = [(-1, 1)] * n + [(None, 1)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return -np.inf, None
    return float(res.x[-1]), res.x[:n]


def is_regular(config: PointConfig, triangulation: Subdivision) -> RegularityCertificate:
    """Certify a full-dimensional secondary cone with a max-margin lift."""
    rows = secondary_cone_inequalities(config, triangulation)
    margin, lift = _max_margin(rows, config.lineality_basis)
    regular = margin > config.tol.eps_geom
    if regular and regular_subdivision(config, lift) != triangulation:
        logger.warning("max-margin lift for %s induces a different subdivision", triangulation)
        regular = False
    return RegularityCertificate(regular, margin, lift if regular else None)


def secondary_cone_span(config: PointConfig, subdivision: Subdivision) -> np.ndarray:
    """Orthonormal basis of the lifts affine on every facet (labels off all facets are free)."""
    n = len(config)
    constraints: list[np.ndarray] = []
    for facet in subdivision.facets:
        ids = config.indices(facet)
        frame = np.vstack([config.coords[ids].T, np.ones((1, len(ids)))])
        for relation in null_space(frame, len(ids), config.tol):
            row = np.zeros(n)
            row[ids] = relation
            constraints.append(row)
    if not constraints:
        return np.eye(n)
    return null_space(np.vstack(constraints), n, config.tol)


# -- enumeration ------------------------------------------------------------


@dataclass(frozen=True)
class TriangulationReport:
    """Regular triangulations found with their GKZ vertices.

    ``oracle_match`` is None when the configuration is too large for the
    exhaustive check; it never asserts completeness otherwise.
    """

    triangulations: tuple[tuple[Subdivision, GkzVector], ...]
    budget: int
    evaluations: int
    seed: int
    budget_exhausted: bool
    oracle_match: bool | None

    def __len__(self) -> int:
        return len(self.triangulations)

    @property
    def vertices(self) -> list[GkzVector]:
        return [gkz for _, gkz in self.triangulations]


def _ordered(found: Iterable[Subdivision]) -> list[Subdivision]:
    def key(t: Subdivision) -> list[list[int]]:
        return [[t.config.index(label) for label in facet] for facet in t.sorted_facets()]

    return sorted(found, key=key)


def _wall_crossings(config: PointConfig, triangulation: Subdivision) -> list[np.ndarray]:
    """Lifts just across each facet of the secondary cone of ``triangulation``."""
    rows = secondary_cone_inequalities(config, triangulation)
    lineality = config.lineality_basis
    lifts = []
    for i, row in enumerate(rows):
        others = np.delete(rows, i, axis=0)
        margin, point = _max_margin(others, lineality, on_wall=row)
        if point is None or margin <= config.tol.eps_geom:
            continue
        scale = max(float(np.max(np.linalg.norm(rows, axis=1))), 1.0)
        step = margin / (2.0 * scale)
        lifts.append(point - step * row)
    return lifts


def _meet_properly(points: np.ndarray, first: Sequence[int], second: Sequence[int], tol: Tolerance) -> bool:
    """conv(first) ∩ conv(second) = conv(first ∩ second) for two simplices.

    Barycentric coordinates in a simplex are unique, so this holds exactly when no common
    point puts weight on a vertex outside the shared face.
    """
    a, b = len(first), len(second)
    a_eq = np.vstack([
        np.hstack([points[list(first)].T, -points[list(second)].T]),
        np.concatenate([np.ones(a), np.zeros(b)]),
        np.concatenate([np.zeros(a), np.ones(b)]),
    ])
    b_eq = np.concatenate([np.zeros(points.shape[1]), [1.0, 1.0]])
    c = -np.concatenate([[i not in second for i in first], [j not in first for j in second]]).astype(float)
    res = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (a + b), method="highs")
    if res.status == 2:
        return True
    if res.status != 0:
        raise InputError(f"intersection test failed for simplices {first} and {second}: {res.message}", field="points")
    return -res.fun <= 1e3 * tol.eps_geom


def _hull_volume(points: np.ndarray) -> float:
    if points.shape[1] == 1:
        return float(np.ptp(points[:, 0]))
    return float(ConvexHull(points).volume)


def all_triangulations(config: PointConfig) -> list[Subdivision]:
    """Every triangulation of A, regular or not, found combinatorially.

    Candidates are sets of full-dimensional simplices on the points that meet pairwise in
    common faces; a set is a triangulation when its volumes add up to vol(conv A).
    """
    points = config.affine_coords
    n, k = points.shape
    if k == 0:
        return [Subdivision(frozenset({frozenset({label})}), config) for label in config.labels]
    total = _hull_volume(points)
    slack = 1e3 * config.tol.eps_geom * max(1.0, total)
    simplices: list[tuple[int, ...]] = []
    volumes: list[float] = []
    for ids in itertools.combinations(range(n), k + 1):
        volume = simplex_volume(points[list(ids)])
        if volume > slack:
            simplices.append(ids)
            volumes.append(volume)
    m = len(simplices)
    compatible = np.ones((m, m), dtype=bool)
    for i, j in itertools.combinations(range(m), 2):
        compatible[i, j] = compatible[j, i] = _meet_properly(points, simplices[i], simplices[j], config.tol)

    found: list[Subdivision] = []

    def extend(chosen: list[int], start: int, volume: float) -> None:
        if volume >= total - slack:
            facets = frozenset(config.label_set(simplices[i]) for i in chosen)
            found.append(Subdivision(facets, config))
            return
        for i in range(start, m):
            if volume + volumes[i] <= total + slack and all(compatible[i, j] for j in chosen):
                extend(chosen + [i], i + 1, volume + volumes[i])

    extend([], 0, 0.0)
    logger.debug("%d simplices, %d triangulations", m, len(found))
    return _ordered(found)


def exhaustive_regular_triangulations(config: PointConfig) -> list[Subdivision]:
    """All triangulations of a small configuration, kept when a max-margin lift certifies them."""
    if len(config) > ORACLE_MAX_POINTS or config.affine_dimension > ORACLE_MAX_DIMENSION:
        raise InputError(
            f"the exhaustive check handles at most {ORACLE_MAX_POINTS} points in dimension {ORACLE_MAX_DIMENSION}",
            field="points",
        )
    candidates = all_triangulations(config)
    regular = [t for t in candidates if is_regular(config, t).regular]
    logger.debug("exhaustive check: %d of %d triangulations are regular", len(regular), len(candidates))
    return regular


def enumerate_regular_triangulations(
    config: PointConfig,
    budget: int,
    seed: int = 0,
    *,
    n_jobs: int = 1,
) -> TriangulationReport:
    """Random lifts plus crossings of found chamber walls, deduplicated."""
    if budget <= 0:
        raise InputError("budget must be positive", field="budget")
    if len(config) > MAX_ENUMERATION_SIZE:
        raise InputError(f"at most {MAX_ENUMERATION_SIZE} points are supported", field="points")

    rng = np.random.default_rng(seed)
    lifts = rng.standard_normal((budget, len(config)))
    subdivisions = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(regular_subdivision)(config, lam) for lam in lifts
    )
    found: list[Subdivision] = []
    for s in subdivisions:
        if is_triangulation(s, config) and s not in found:
            found.append(s)
    evaluations = budget

    queue = list(found)
    exhausted = False
    while queue:
        if evaluations >= 2 * budget:
            exhausted = True
            logger.warning("enumeration budget exhausted with %d triangulations found", len(found))
            break
        current = queue.pop(0)
        for lam in _wall_crossings(config, current):
            evaluations += 1
            neighbour = regular_subdivision(config, lam)
            if is_triangulation(neighbour, config) and neighbour not in found:
                found.append(neighbour)
                queue.append(neighbour)

    ordered = _ordered(found)
    oracle_match: bool | None = None
    if len(config) <= ORACLE_MAX_POINTS and config.affine_dimension <= ORACLE_MAX_DIMENSION:
        oracle = exhaustive_regular_triangulations(config)
        oracle_match = set(oracle) == set(ordered)
        if not oracle_match:
            logger.warning("sampling found %d triangulations, exhaustive check %d", len(ordered), len(oracle))
    logger.info("found %d regular triangulations after %d evaluations", len(ordered), evaluations)
    return TriangulationReport(
        tuple((t, gkz_vertex(config, t)) for t in ordered),
        budget,
        evaluations,
        seed,
        exhausted,
        oracle_match,
    )


def optimal_vertex(
    triangulations: Sequence[tuple[Subdivision, GkzVector]], lam
) -> tuple[Subdivision, GkzVector]:
    """The enumerated vertex minimising <λ, φ>; the first wins ties."""
    lam = np.asarray(lam, dtype=float)
    if not triangulations:
        raise InputError("no triangulations to choose from", field="triangulations")
    scores = [float(lam @ gkz.as_array()) for _, gkz in triangulations]
    return triangulations[int(np.argmin(scores))]
