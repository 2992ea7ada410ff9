"""Affine and projective toric varieties of a configuration: φ_A, binomials, Birch inversion, sampling."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.spatial import Delaunay, QhullError
from scipy.special import logsumexp, softmax

from toric.errors import ConvergenceError, InputError, NotAMember, OutsideHull
from toric.linalg import affine_basis, as_vector, null_space, simplex_volume
from toric.pointconfig import LabelSet, PointConfig, Subdivision, config_faces, cone_faces
from toric.tolerance import Tolerance

logger = logging.getLogger(__name__)

MAX_NEWTON_ITERATIONS = 500
ARMIJO = 1e-4
MAX_HALVINGS = 60
MIN_DAMPING, MAX_DAMPING = 1e-12, 1e12
# relative size below which a predicted decrease of logsumexp is rounding noise
ROUNDING = 1e-13


@dataclass(frozen=True, eq=False)
class TorusElement:
    """γ_v in T_N, acting on characters by γ_v(u) = exp(-u·v)."""

    v: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", as_vector(self.v))

    @classmethod
    def identity(cls, dim: int) -> "TorusElement":
        return cls(np.zeros(dim))

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        return TorusElement(self.v + as_vector(other.v, self.v.shape[0]))

    def inverse(self) -> "TorusElement":
        return TorusElement(-self.v)

    def character(self, u) -> float:
        return float(np.exp(-as_vector(u, self.v.shape[0]) @ self.v))


def positive_weights(config: PointConfig, weights) -> np.ndarray:
    if isinstance(weights, Mapping):
        missing = [label for label in config.labels if label not in weights]
        if missing:
            raise InputError(f"missing weights for {missing}", field="weights")
        w = np.array([float(weights[label]) for label in config.labels])
    else:
        w = np.asarray(weights, dtype=float).reshape(-1)
    if w.shape[0] != len(config):
        raise InputError(f"expected {len(config)} weights, got {w.shape[0]}", field="weights")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise InputError("weights must be finite and strictly positive", field="weights")
    return w


# -- Y_A ----------------------------------------------------------------------


def phi(config: PointConfig, t: TorusElement) -> np.ndarray:
    """(t^a | a in A) = exp(-a·v)."""
    return np.exp(-config.coords @ as_vector(t.v, config.dim))


def relation_basis(config: PointConfig) -> np.ndarray:
    """Rows κ spanning the linear relations Σ κ_a a = 0 among the given points."""
    return null_space(config.coords.T, len(config), config.tol)


def binomial(kappa: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split κ = κ⁺ - κ⁻ into the exponents of Π z^κ⁺ = Π z^κ⁻."""
    return np.clip(kappa, 0, None), np.clip(-kappa, 0, None)


def binomial_residuals(config: PointConfig, z) -> np.ndarray:
    """Relative log-space residuals of every relation-basis binomial at a positive z."""
    z = as_vector(z, len(config))
    if np.any(z <= 0):
        raise InputError("binomial residuals need strictly positive coordinates", field="z")
    logs = np.log(z)
    basis = relation_basis(config)
    if basis.shape[0] == 0:
        return np.zeros(0)
    scale = np.maximum(1.0, np.abs(basis) @ np.abs(logs))
    return np.abs(basis @ logs) / scale


def _support(z: np.ndarray, tol: Tolerance) -> np.ndarray:
    return np.flatnonzero(z > tol.eps_geom)


def is_member(config: PointConfig, z) -> bool:
    """Membership in Y_A: the support is a face and the binomials of that face hold."""
    z = as_vector(z, len(config))
    tol = config.tol
    if np.any(z < -tol.eps_geom):
        return False
    ids = _support(z, tol)
    if ids.size == 0:
        return False
    support = config.label_set(ids)
    if support not in cone_faces(config):
        return False
    face = config.restrict(support)
    residuals = binomial_residuals(face, z[config.indices(support)])
    return bool(np.all(residuals <= tol.eps_geom))


def support_face(config: PointConfig, z) -> LabelSet:
    """The face F with z in the orbit Y°_F."""
    z = as_vector(z, len(config))
    if not is_member(config, z):
        raise NotAMember("point is not on the affine toric variety")
    return config.label_set(_support(z, config.tol))


def moment(config: PointConfig, z) -> np.ndarray:
    """The tautological map π_A(z) = Σ z_a a."""
    return as_vector(z, len(config)) @ config.coords


def normalize(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    total = float(z.sum())
    if total <= 0:
        raise InputError("cannot normalise a point with no positive coordinate", field="z")
    return z / total


# -- Birch inversion ----------------------------------------------------------


def minimal_face_containing(
    config: PointConfig, u, *, tol: Tolerance | None = None, slack: float | None = None
) -> LabelSet:
    """Labels on the smallest face of conv(A) that contains u: the points on every facet through u.

    A facet counts as passing through u when u is within ``slack`` of it (default: the geometric
    tolerance). Targets up to the geometric tolerance outside conv(A) are accepted either way.
    """
    tol = tol or config.tol
    u = as_vector(u, config.dim)
    cone = config.hull_cone
    x = np.append(u, 1.0)
    lifted = np.hstack([config.coords, np.ones((len(config), 1))])
    geometric = 10 * tol.scaled(max(float(np.max(np.abs(lifted))), float(np.max(np.abs(x)))))

    eq = cone.equations
    if eq.shape[0] and np.max(np.abs(eq @ x)) > geometric:
        raise OutsideHull(f"target {u.tolist()} is off the affine span of A")
    ineq = cone.inequalities
    values = ineq @ x
    if values.size and np.min(values) < -geometric:
        raise OutsideHull(f"target {u.tolist()} lies outside conv(A) (facet slack {np.min(values):.3g})")
    tight = ineq[values <= (geometric if slack is None else slack)]
    if tight.shape[0] == 0:
        return frozenset(config.labels)
    on_face = np.all(np.abs(lifted @ tight.T) <= geometric, axis=1)
    if not np.any(on_face):
        raise OutsideHull(f"empty support for target {u.tolist()}")
    return config.label_set(np.flatnonzero(on_face))


@dataclass(frozen=True, eq=False)
class BirchSolution:
    """The unique z in w.Z_A with moment u, its cocharacter v and diagnostics.

    ``offset`` is the distance from the requested target to the face it was solved on; it is
    nonzero only for targets within the geometric tolerance of the boundary.
    """

    z: np.ndarray
    v: np.ndarray
    residual: float
    iterations: int
    face: LabelSet
    offset: float = 0.0

    def as_dict(self, labels: Sequence[str]) -> dict[str, Any]:
        return {
            "z": dict(zip(labels, self.z.tolist())),
            "v": self.v.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "face": sorted(self.face, key=list(labels).index),
            "offset": self.offset,
        }


def _centre(diffs: np.ndarray, log_w: np.ndarray) -> np.ndarray:
    """The y removing the affine part of log_w over the face, so log_w - diffs @ y has no linear trend."""
    design = np.hstack([np.ones((diffs.shape[0], 1)), diffs])
    coef, *_ = np.linalg.lstsq(design, log_w, rcond=None)
    return coef[1:]


def _levenberg_step(hessian: np.ndarray, grad: np.ndarray, damping: float) -> np.ndarray:
    """-(H + μI)⁻¹ g in the eigenbasis of H; H is a covariance, so negative eigenvalues are rounding."""
    values, vectors = np.linalg.eigh(hessian)
    values = np.clip(values, 0.0, None)
    return -vectors @ ((vectors.T @ grad) / (values + damping))


def _newton(diffs: np.ndarray, log_w: np.ndarray, target_tol: float, max_iter: int) -> tuple[np.ndarray, float, int]:
    """Minimise logsumexp(log_w - diffs @ y) by Levenberg-damped Newton.

    The gradient is minus the moment residual. The damping μ = λ·|g|·L (L the largest row norm
    of ``diffs``) keeps steps of bounded length where the Hessian vanishes numerically, and fades
    to plain Newton as the residual goes to zero. λ shrinks after full steps and grows after
    backtracking. Steps are accepted by Armijo on the objective while its predicted decrease is
    above rounding, and by decrease of the residual norm after that.
    """

    def value(y: np.ndarray) -> float:
        return float(logsumexp(log_w - diffs @ y))

    def evaluate(y: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        p = softmax(log_w - diffs @ y)
        grad = -diffs.T @ p
        return p, grad, float(np.linalg.norm(grad))

    scale = max(1.0, float(np.max(np.linalg.norm(diffs, axis=1))))
    y = _centre(diffs, log_w)
    p, grad, residual = evaluate(y)
    damping = 1.0
    it = 0
    while residual > target_tol and it < max_iter:
        it += 1
        centered = diffs - p @ diffs
        hessian = centered.T @ (p[:, None] * centered)
        step = _levenberg_step(hessian, grad, damping * residual * scale)
        f0, slope = value(y), float(grad @ step)
        by_value = -slope > ROUNDING * max(1.0, abs(f0))
        t = 1.0
        for _ in range(MAX_HALVINGS):
            trial = y + t * step
            p_new, grad_new, residual_new = evaluate(trial)
            if by_value:
                accepted = value(trial) <= f0 + ARMIJO * t * slope
            else:
                accepted = residual_new < residual
            if accepted:
                break
            t *= 0.5
        else:
            if damping >= MAX_DAMPING:
                logger.warning("newton stalled at maximal damping, residual %.3e", residual)
                break
            damping = min(damping * 16, MAX_DAMPING)
            logger.debug("newton iteration %d rejected, damping %.3g", it, damping)
            continue
        y, p, grad, residual = trial, p_new, grad_new, residual_new
        damping = max(damping / 4, MIN_DAMPING) if t == 1.0 else min(damping * 4, MAX_DAMPING)
        logger.debug("newton iteration %d residual %.3e step %.3g damping %.3g", it, residual, t, damping)
    if residual <= target_tol:
        return y, residual, it
    raise ConvergenceError(
        f"Newton did not reach residual {target_tol:.3g} after {it} iterations",
        residual=residual,
        iterations=it,
    )


def _log_weights(config: PointConfig, weights, log_weights) -> np.ndarray:
    if log_weights is None:
        return np.log(positive_weights(config, weights))
    logs = np.asarray(log_weights, dtype=float).reshape(-1)
    if logs.shape[0] != len(config) or not np.all(np.isfinite(logs)):
        raise InputError(f"expected {len(config)} finite log-weights", field="weights")
    return logs


def birch_inverse(
    config: PointConfig,
    weights,
    u,
    *,
    log_weights=None,
    tol: Tolerance | None = None,
    max_iter: int = MAX_NEWTON_ITERATIONS,
) -> BirchSolution:
    """Solve π_A(z) = u on w.Z_A by restricting to the minimal face and running damped Newton.

    z is normalised to Σ z_a = 1, which is the solve for the homogenised configuration. The face
    is the one u lies on to within the moment tolerance; a target closer than the geometric
    tolerance to a smaller face is moved onto it and the move is reported as ``offset``.
    ``log_weights`` replaces ``weights`` for translates too extreme to exponentiate.
    """
    tol = tol or config.tol
    log_w = _log_weights(config, weights, log_weights)
    u = as_vector(u, config.dim)
    target_tol = tol.eps_opt * max(1.0, config.diameter)
    face = minimal_face_containing(config, u, tol=tol, slack=target_tol)
    ids = config.indices(face)
    pts = config.coords[ids]
    basis = affine_basis(pts, tol)
    on_face = pts[0] + ((u - pts[0]) @ basis.T) @ basis
    offset = float(np.linalg.norm(u - on_face))

    z = np.zeros(len(config))
    if basis.shape[0] == 0:
        z[ids] = softmax(log_w[ids])
        residual = float(np.linalg.norm(moment(config, z) - on_face))
        return BirchSolution(z, np.zeros(config.dim), residual, 0, face, offset)

    diffs = (pts - on_face) @ basis.T
    y, residual, iterations = _newton(diffs, log_w[ids], target_tol, max_iter)
    z[ids] = softmax(log_w[ids] - diffs @ y)
    residual = float(np.linalg.norm(moment(config, z) - on_face))
    if residual > target_tol:
        raise ConvergenceError(
            f"moment residual {residual:.3g} above {target_tol:.3g}", residual=residual, iterations=iterations
        )
    return BirchSolution(z, basis.T @ y, residual, iterations, face, offset)


# -- complexes and samples ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ToricComplex:
    """Z(S, w): the union of the translates w.Z_F over the facets of S."""

    subdivision: Subdivision
    weights: np.ndarray

    @property
    def config(self) -> PointConfig:
        return self.subdivision.config


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Finite sample of Δ^A: one row per point, columns in label order."""

    labels: tuple[str, ...]
    points: np.ndarray
    moments: np.ndarray
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.points.shape[0] == 0:
            raise InputError("a point cloud must not be empty", field="points")
        if self.points.shape[1] != len(self.labels):
            raise InputError("point width does not match the labels", field="points")

    def __len__(self) -> int:
        return self.points.shape[0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.points, columns=list(self.labels))


def _uniform_in_hull(pts: np.ndarray, n: int, rng: np.random.Generator, tol: Tolerance) -> np.ndarray:
    """n uniform samples from conv(pts): pick a cell by volume, then Dirichlet(1) weights."""
    if n == 0:
        return np.zeros((0, pts.shape[1]))
    basis = affine_basis(pts, tol)
    k = basis.shape[0]
    if k == 0:
        return np.repeat(pts[:1], n, axis=0)
    local = (pts - pts[0]) @ basis.T
    if k == 1:
        order = np.argsort(local[:, 0])
        cells = np.array([[order[i], order[i + 1]] for i in range(len(order) - 1)])
    else:
        try:
            cells = Delaunay(local).simplices
        except QhullError:
            cells = Delaunay(local, qhull_options="QJ").simplices
    volumes = np.array([simplex_volume(local[cell]) if len(cell) > 1 else 0.0 for cell in cells])
    if volumes.sum() <= 0:
        return np.repeat(pts[:1], n, axis=0)
    chosen = rng.choice(len(cells), size=n, p=volumes / volumes.sum())
    bary = rng.dirichlet(np.ones(k + 1), size=n)
    return np.einsum("ij,ijk->ik", bary, pts[cells[chosen]])


def _facet_moments(facet: PointConfig, n: int, seed: int, index: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    skeleton = np.array([facet.coords[facet.indices(face)].mean(axis=0) for face in config_faces(facet)])
    return np.vstack([skeleton, _uniform_in_hull(facet.coords, n, rng, facet.tol)])


def _solve_facet(config: PointConfig, labels: Sequence[str], weights: np.ndarray, moments: np.ndarray, tol: Tolerance) -> np.ndarray:
    facet = config.restrict(labels)
    ids = config.indices(labels)
    rows = np.zeros((moments.shape[0], len(config)))
    for r, u in enumerate(moments):
        rows[r, ids] = birch_inverse(facet, weights[ids], u, tol=tol).z
    return rows


def sample_complex(
    config: PointConfig,
    cx: ToricComplex,
    n: int,
    seed: int = 0,
    *,
    n_jobs: int = 1,
    tol: Tolerance | None = None,
) -> PointCloud:
    """Sample Z(S, w): per facet, face barycenters plus n uniform moments, mapped through Birch.

    Moments are taken in the homogenised configuration, so each row ends in 1 when A is not
    already at height 1.
    """
    if n < 0:
        raise InputError("samples per facet must be nonnegative", field="density")
    tol = tol or config.tol
    config = config.homogenized()
    weights = positive_weights(config, cx.weights)
    facets = cx.subdivision.sorted_facets()

    def run(index: int, labels: list[str]) -> tuple[np.ndarray, np.ndarray]:
        moments = _facet_moments(config.restrict(labels), n, seed, index)
        return _solve_facet(config, labels, weights, moments, tol), moments

    parts = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(run)(i, f) for i, f in enumerate(facets))
    points = np.vstack([p for p, _ in parts])
    moments = np.vstack([m for _, m in parts])
    provenance = {"subdivision": facets, "weights": weights.tolist(), "seed": seed, "density": n}
    return PointCloud(config.labels, points, moments, provenance)


def sample_translate(
    config: PointConfig,
    weights,
    moments: np.ndarray | Iterable[Iterable[float]],
    *,
    log_weights=None,
    tol: Tolerance | None = None,
) -> PointCloud:
    """w.Z_A sampled at prescribed moments."""
    tol = tol or config.tol
    log_w = _log_weights(config, weights, log_weights)
    moments = np.atleast_2d(np.asarray(moments, dtype=float))
    points = np.vstack([birch_inverse(config, None, u, log_weights=log_w, tol=tol).z for u in moments])
    return PointCloud(config.labels, points, moments, {"log_weights": log_w.tolist()})
