"""Points of the toric variety Y_Σ of a fan, stored through the orbit-cone correspondence."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Protocol

import numpy as np
from scipy.special import softmax

from toric.affine import TorusElement, phi
from toric.errors import InputError, NotAFanMap
from toric.fans import Fan, NormalFan, Polytope, normal_fan
from toric.linalg import as_vector, project_out
from toric.pointconfig import PointConfig

logger = logging.getLogger(__name__)


class FanLike(Protocol):
    """What a point of Y_Σ needs from Σ; met by :class:`Fan` and the virtual secondary fan."""

    dim: int

    @property
    def minimal_cone_id(self) -> Hashable: ...

    def minimal_containing_cone(self, v) -> Hashable | None: ...

    def cone_span(self, key) -> np.ndarray: ...

    def cone_label(self, key) -> str: ...


@dataclass(frozen=True, eq=False)
class FanPoint:
    """γ_v.x_σ, kept as (σ, v) with v reduced modulo the span of σ."""

    fan: FanLike = field(repr=False)
    cone_id: Hashable
    coord: np.ndarray

    def __post_init__(self) -> None:
        v = as_vector(self.coord, self.fan.dim)
        object.__setattr__(self, "coord", project_out(v, self.fan.cone_span(self.cone_id)))

    @property
    def label(self) -> str:
        return self.fan.cone_label(self.cone_id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FanPoint):
            return NotImplemented
        if other.fan != self.fan or other.cone_id != self.cone_id:
            return False
        scale = max(float(np.max(np.abs(self.coord), initial=0.0)), float(np.max(np.abs(other.coord), initial=0.0)))
        tol = getattr(self.fan, "tol", None)
        eps = tol.scaled(scale) if tol is not None else 1e-9 * max(1.0, scale)
        return bool(np.max(np.abs(self.coord - other.coord), initial=0.0) <= eps)

    def __hash__(self) -> int:
        return hash((self.fan, self.cone_id))


class _Zero:
    """The absorbing element adjoined to Y_Σ."""

    _instance: "_Zero | None" = None

    def __new__(cls) -> "_Zero":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ZERO"


ZERO = _Zero()
MonoidElement = FanPoint | _Zero


def distinguished_point(fan: Fan, sigma) -> FanPoint:
    return FanPoint(fan, fan.resolve(sigma), np.zeros(fan.dim))


def dense_point(fan: FanLike) -> FanPoint:
    """ε, the distinguished point of the minimal cone."""
    return FanPoint(fan, fan.minimal_cone_id, np.zeros(fan.dim))


def act(t: TorusElement, p: FanPoint) -> FanPoint:
    return FanPoint(p.fan, p.cone_id, p.coord + as_vector(t.v, p.fan.dim))


def evaluate(p: FanPoint, u) -> float:
    """Value at u in σ∨: exp(-u·v) on σ⊥ and 0 elsewhere."""
    cone = p.fan.cone(p.cone_id)
    u = as_vector(u, cone.dim)
    if not cone.dual().contains(u):
        raise InputError("u is not in the dual of the point's cone", field="u")
    slack = cone.tol.scaled(float(np.linalg.norm(u)))
    span = cone.span_basis
    if span.shape[0] and np.max(np.abs(span @ u)) > slack:
        return 0.0
    return float(np.exp(-u @ p.coord))


def one_param_limit(fan: Fan, p: FanPoint, v) -> FanPoint | None:
    """lim γ_{sv}.p as s → ∞, found in the star of the point's cone; None when it diverges."""
    v = as_vector(v, fan.dim)
    if not np.any(v):
        return p
    star = fan.star(p.cone_id)
    found = star.minimal_containing_cone(v)
    if found is None:
        return None
    return FanPoint(fan, star.parents[found], p.coord)


def ray_sequence_limit(fan: FanLike, base, direction) -> FanPoint | None:
    """Limit of γ_{base + s·direction}.ε: the point γ_base.x_τ for τ the cone of the direction."""
    base = as_vector(base, fan.dim)
    direction = as_vector(direction, fan.dim)
    cone = fan.minimal_containing_cone(direction)
    if cone is None:
        return None
    return FanPoint(fan, cone, base)


def cone_join(fan: Fan, i, j) -> int | None:
    """σ • τ in Σ⁺: the smallest cone containing both, None standing for 0."""
    if i is None or j is None:
        return None
    return fan.smallest_common_cone(i, j)


def monoid_mul(fan: Fan, x: MonoidElement, y: MonoidElement) -> MonoidElement:
    if x is ZERO or y is ZERO:
        return ZERO
    joined = cone_join(fan, x.cone_id, y.cone_id)
    if joined is None:
        return ZERO
    return FanPoint(fan, joined, x.coord + y.coord)


def orbit_closure_cones(fan: Fan, sigma) -> list[int]:
    """Cones met by limits of one-parameter subgroups from x_σ."""
    start = distinguished_point(fan, sigma)
    reached = {start.cone_id}
    for cone in fan.cones:
        limit = one_param_limit(fan, start, cone.relative_interior_point())
        if limit is not None:
            reached.add(limit.cone_id)
    return sorted(reached)


def image_cone(psi: np.ndarray, source: Fan, target: Fan, cone_id: int) -> int:
    """The cone of ``target`` receiving ψ(σ); raises NotAFanMap when none does."""
    cone = source.cones[cone_id]
    image = target.minimal_containing_cone(psi @ cone.relative_interior_point())
    if image is None or not all(target.cones[image].contains(psi @ g) for g in cone.generators):
        raise NotAFanMap(f"cone {source.labels[cone_id]} does not map into a cone of the target", cone=source.labels[cone_id])
    lineality = cone.lineality_basis
    if lineality.shape[0] and not all(
        target.cones[image].contains(s * psi @ g) for g in lineality for s in (1.0, -1.0)
    ):
        raise NotAFanMap(f"lineality of cone {source.labels[cone_id]} leaves the target cone", cone=source.labels[cone_id])
    point = psi @ cone.relative_interior_point()
    ineq = target.cones[image].inequalities
    if ineq.shape[0] and np.min(ineq @ point) < 10 * target.tol.scaled(float(np.linalg.norm(point))):
        if target.cones[image].dimension > cone.dimension:
            logger.warning("image of cone %s lies close to a proper face of %s", source.labels[cone_id], target.labels[image])
    return image


def check_fan_map(psi, source: Fan, target: Fan) -> dict[int, int]:
    """Cone-to-cone assignment of a map of fans."""
    psi = np.atleast_2d(np.asarray(psi, dtype=float))
    if psi.shape != (target.dim, source.dim):
        raise InputError(f"map must have shape {(target.dim, source.dim)}, got {psi.shape}", field="psi")
    return {i: image_cone(psi, source, target, i) for i in range(len(source))}


class FanMap:
    """A linear map N → N′ checked once to be a map of fans; applying it is then a lookup."""

    def __init__(self, psi, source: Fan, target: Fan) -> None:
        self.psi = np.atleast_2d(np.asarray(psi, dtype=float))
        self.source = source
        self.target = target
        self.assignment = check_fan_map(self.psi, source, target)

    def __call__(self, p: FanPoint) -> FanPoint:
        if p.fan is not self.source:
            raise InputError("point does not lie on the source fan of the map", field="p")
        return FanPoint(self.target, self.assignment[p.cone_id], self.psi @ p.coord)

    def torus(self, t: TorusElement) -> TorusElement:
        """ψ(t): the induced map of tori."""
        return TorusElement(self.psi @ as_vector(t.v, self.source.dim))


def fan_map_apply(psi, source: Fan, target: Fan, p: FanPoint) -> FanPoint:
    """ψ(p); pass a :class:`FanMap` as ``psi`` to skip re-checking the map on every call."""
    if not isinstance(psi, FanMap):
        psi = FanMap(psi, source, target)
    elif psi.source is not source or psi.target is not target:
        raise InputError("fan map was built for other fans", field="psi")
    return psi(p)


def is_complete(fan: Fan) -> bool:
    return fan.is_complete()


@dataclass(frozen=True)
class RecoveryReport:
    """Sampled directions grouped by the limit of γ_{sv}.ε."""

    groups: dict[str, int]
    absent: int
    mismatches: list[str]
    samples: int

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _interior_samples(fan: Fan, rng: np.random.Generator) -> list[np.ndarray]:
    samples = []
    for cone in fan.cones:
        gens = cone.generators
        v = rng.exponential(size=gens.shape[0]) @ gens if gens.shape[0] else np.zeros(fan.dim)
        samples.append(v)
    return samples


def recover_fan(fan: Fan, n_dirs: int, seed: int = 0) -> RecoveryReport:
    """Check that the limit classes of directions are exactly relative interiors of cones."""
    rng = np.random.default_rng(seed)
    directions = list(rng.standard_normal((n_dirs, fan.dim))) + _interior_samples(fan, rng)
    eps = dense_point(fan)
    groups: dict[str, int] = defaultdict(int)
    mismatches: list[str] = []
    absent = 0
    for v in directions:
        limit = one_param_limit(fan, eps, v)
        if limit is None:
            absent += 1
            if any(cone.contains(v) for cone in fan.cones):
                mismatches.append(f"no limit for covered direction {np.round(v, 6).tolist()}")
            continue
        groups[limit.label] += 1
        if np.any(v) and not fan.cones[limit.cone_id].in_relative_interior(v):
            mismatches.append(f"direction {np.round(v, 6).tolist()} is not interior to {limit.label}")
    if mismatches:
        logger.warning("fan recovery found %d mismatches", len(mismatches))
    return RecoveryReport(dict(sorted(groups.items())), absent, mismatches, len(directions))


# -- projective embedding ---------------------------------------------------------


def normal_fan_of_config(config: PointConfig) -> NormalFan:
    """Normal fan of conv(A); ``face_points`` are indices into the configuration."""
    return normal_fan(Polytope(config.coords, tol=config.tol), point_names=config.labels)


def embed_simplex(config: PointConfig, p: FanPoint, *, base: str | None = None) -> np.ndarray:
    """Ψ_A: normalised (exp(-(a-f)·v) for a on the face of p's cone, 0 elsewhere)."""
    fan = p.fan
    if not isinstance(fan, NormalFan) or not np.array_equal(fan.polytope.points, config.coords):
        raise InputError("point does not live on the normal fan of this configuration", field="point")
    face = sorted(fan.face_points[p.cone_id])
    if base is None:
        f = config.coords[face[0]]
    else:
        index = config.index(base)
        if index not in face:
            raise InputError(f"base {base!r} is not on the face of the point's cone", field="base")
        f = config.coords[index]
    z = np.zeros(len(config))
    z[face] = softmax(-(config.coords[face] - f) @ p.coord)
    return z


def translate_projective(config: PointConfig, t: TorusElement, z) -> np.ndarray:
    """The torus acting on Δ^A through φ_A, renormalised."""
    scaled = phi(config, t) * np.asarray(z, dtype=float)
    return scaled / scaled.sum()
