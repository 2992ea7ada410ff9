"""Hausdorff limits of translated toric varieties and the secondary fan that classifies them."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist
from scipy.special import softmax

from toric.affine import PointCloud, ToricComplex, positive_weights, sample_complex, sample_translate
from toric.errors import InputError
from toric.linalg import as_vector
from toric.pointconfig import (
    GkzVector,
    PointConfig,
    Subdivision,
    refines,
    regular_subdivision,
    secondary_cone_span,
)
from toric.tolerance import Tolerance
from toric.variety import FanPoint, ray_sequence_limit

logger = logging.getLogger(__name__)

MIN_CALIBRATION = 1e-3
TRANSVERSE_STEP = 1.0


def _as_points(cloud: PointCloud | np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    if isinstance(cloud, PointCloud):
        return cloud.points
    pts = np.asarray(cloud, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def hausdorff_distance(first, second) -> float:
    """max(max_p min_q |p-q|, max_q min_p |p-q|) over two finite samples."""
    if isinstance(first, PointCloud) and isinstance(second, PointCloud) and first.labels != second.labels:
        raise InputError("clouds are indexed by different labels", field="labels")
    p, q = _as_points(first), _as_points(second)
    if p.shape[0] == 0 or q.shape[0] == 0:
        raise InputError("Hausdorff distance needs nonempty samples", field="points")
    if p.shape[1] != q.shape[1]:
        raise InputError("samples live in different dimensions", field="points")
    distances = cdist(p, q)
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


class SecondaryFan:
    """Σ(A) without its cone list: the cone of λ is named by the subdivision S(λ)."""

    def __init__(self, config: PointConfig) -> None:
        self.config = config
        self.dim = len(config)
        self.tol = config.tol
        self._spans: dict[Subdivision, np.ndarray] = {}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SecondaryFan) and other.config == self.config

    def __hash__(self) -> int:
        return hash(self.config)

    @property
    def minimal_cone_id(self) -> Subdivision:
        return regular_subdivision(self.config, np.zeros(self.dim))

    def minimal_containing_cone(self, v) -> Subdivision:
        return regular_subdivision(self.config, as_vector(v, self.dim))

    def cone_span(self, key: Subdivision) -> np.ndarray:
        if key not in self._spans:
            self._spans[key] = secondary_cone_span(self.config, key)
        return self._spans[key]

    def cone_label(self, key: Subdivision) -> str:
        return str(key)


def psi_point(config: PointConfig, weights, *, fan: SecondaryFan | None = None) -> FanPoint:
    """w.Z_A ↦ γ_{-log w}.ε on the secondary toric variety."""
    fan = fan or SecondaryFan(config)
    w = positive_weights(config, weights)
    return FanPoint(fan, fan.minimal_cone_id, -np.log(w))


def calibrate_threshold(
    config: PointConfig, weights, density: int, seed: int = 0, *, n_jobs: int = 1
) -> tuple[float, float]:
    """(c, θ) with c = √n · d_H(sample(n), sample(2n)) on w.Z_A and θ = c/√n + eps_limit."""
    if density < 1:
        raise InputError("density must be at least 1", field="density")
    w = positive_weights(config, weights)
    cx = ToricComplex(regular_subdivision(config, np.zeros(len(config))), w)
    coarse = sample_complex(config, cx, density, seed, n_jobs=n_jobs)
    fine = sample_complex(config, cx, 2 * density, seed, n_jobs=n_jobs)
    c = max(np.sqrt(density) * hausdorff_distance(coarse, fine), MIN_CALIBRATION)
    theta = c / np.sqrt(density) + config.tol.eps_limit
    logger.debug("calibrated c=%.4g theta=%.4g at density %d", c, theta, density)
    return float(c), float(theta)


def translate_weights(weights: np.ndarray, v: np.ndarray, s: float) -> np.ndarray:
    """w·exp(-s·v), rescaled so the largest weight is 1."""
    logs = np.log(weights) - s * v
    return np.exp(logs - logs.max())


@dataclass(frozen=True)
class DegenerationReport:
    schedule: list[float]
    distances: list[float]
    predicted: Subdivision
    limit_cone: str | None
    calibration: float
    threshold: float
    monotone: bool
    cone_consistent: bool
    density: int
    seed: int
    tol: Tolerance = field(repr=False)
    target: PointCloud | None = field(default=None, repr=False, compare=False)
    final: PointCloud | None = field(default=None, repr=False, compare=False)

    @property
    def final_distance(self) -> float:
        return self.distances[-1]

    @property
    def passed(self) -> bool:
        return self.monotone and self.cone_consistent and self.final_distance < self.threshold

    def as_dict(self) -> dict[str, Any]:
        return {
            "schedule": self.schedule,
            "distances": self.distances,
            "predicted_subdivision": self.predicted.sorted_facets(),
            "limit_cone": self.limit_cone,
            "calibration": self.calibration,
            "threshold": self.threshold,
            "final_distance": self.final_distance,
            "monotone": self.monotone,
            "cone_consistent": self.cone_consistent,
            "verdict": "pass" if self.passed else "fail",
            "density": self.density,
            "seed": self.seed,
            "tolerances": {
                "eps_geom": self.tol.eps_geom,
                "eps_opt": self.tol.eps_opt,
                "eps_limit": self.tol.eps_limit,
            },
        }


def _tail_nonincreasing(distances: Sequence[float], jitter: float) -> bool:
    tail = list(distances[len(distances) // 2:])
    return all(b <= a + jitter for a, b in zip(tail, tail[1:]))


def degenerate(
    config: PointConfig,
    weights,
    v,
    schedule: Sequence[float],
    density: int,
    seed: int = 0,
    *,
    n_jobs: int = 1,
) -> DegenerationReport:
    """Follow w·exp(-s·v).Z_A along the schedule and compare with Z(S(v), w)."""
    schedule = [float(s) for s in schedule]
    if not schedule:
        raise InputError("schedule must not be empty", field="schedule")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise InputError("schedule must be strictly increasing", field="schedule")
    if density < 1:
        raise InputError("density must be at least 1", field="density")

    proj = config.homogenized()
    w = positive_weights(proj, weights)
    v = as_vector(v, len(proj))
    predicted = regular_subdivision(proj, v)
    target = sample_complex(proj, ToricComplex(predicted, w), density, seed, n_jobs=n_jobs)

    def distance_at(s: float) -> tuple[float, PointCloud]:
        source = sample_translate(proj, None, target.moments, log_weights=np.log(w) - s * v)
        return hausdorff_distance(source, target), source

    runs = Parallel(n_jobs=n_jobs, prefer="threads")(delayed(distance_at)(s) for s in schedule)
    distances = [d for d, _ in runs]
    c, theta = calibrate_threshold(proj, w, density, seed, n_jobs=n_jobs)

    limit = ray_sequence_limit(SecondaryFan(proj), -np.log(w), v)
    consistent = limit is not None and limit.cone_id == predicted
    if not consistent:
        logger.warning("secondary-fan limit %s differs from S(v) = %s", limit and limit.label, predicted)

    report = DegenerationReport(
        schedule=schedule,
        distances=[float(d) for d in distances],
        predicted=predicted,
        limit_cone=limit.label if limit is not None else None,
        calibration=c,
        threshold=theta,
        monotone=_tail_nonincreasing(distances, proj.tol.eps_limit),
        cone_consistent=consistent,
        density=density,
        seed=seed,
        tol=proj.tol,
        target=target,
        final=runs[-1][1],
    )
    logger.info("degeneration towards %s: final d_H %.3g, threshold %.3g", predicted, report.final_distance, theta)
    return report


@dataclass(frozen=True)
class OrbitMatch:
    within: float
    transverse: float | None
    threshold: float

    @property
    def ok(self) -> bool:
        return self.within <= self.threshold and (self.transverse is None or self.transverse > self.threshold)


def orbit_match_report(
    config: PointConfig, v, weights, *, density: int = 50, seed: int = 0
) -> OrbitMatch:
    """Perturb w inside and across the span of the secondary cone of S(v) and measure the move."""
    proj = config.homogenized()
    w = positive_weights(proj, weights)
    subdivision = regular_subdivision(proj, as_vector(v, len(proj)))
    span = secondary_cone_span(proj, subdivision)
    _, theta = calibrate_threshold(proj, w, density, seed)
    base = sample_complex(proj, ToricComplex(subdivision, w), density, seed)

    def moved(direction: np.ndarray, step: float) -> float:
        shifted = translate_weights(w, direction, step)
        cloud = sample_complex(proj, ToricComplex(subdivision, shifted), density, seed)
        return hausdorff_distance(base, cloud)

    rng = np.random.default_rng(seed)
    inside = span.T @ rng.standard_normal(span.shape[0])
    within = moved(inside / np.linalg.norm(inside), 1.0)

    transverse = None
    if span.shape[0] < len(proj):
        draw = rng.standard_normal(len(proj))
        across = draw - span.T @ (span @ draw)
        transverse = moved(across / np.linalg.norm(across), max(TRANSVERSE_STEP, 10 * theta))
    return OrbitMatch(within, transverse, theta)


def orbit_match(config: PointConfig, v, weights, *, density: int = 50, seed: int = 0) -> bool:
    return orbit_match_report(config, v, weights, density=density, seed=seed).ok


def secondary_moment(
    config: PointConfig,
    weights,
    subdivision: Subdivision,
    vertices: Sequence[tuple[Subdivision, GkzVector]],
) -> np.ndarray:
    """Algebraic moment map of the secondary toric variety at w.x_S, landing on the face of P(A) for S."""
    w = positive_weights(config, weights)
    face = [gkz.as_array() for t, gkz in vertices if refines(t, subdivision)]
    if not face:
        raise InputError(f"no enumerated triangulation refines {subdivision}", field="subdivision")
    phis = np.vstack(face)
    return softmax(phis @ np.log(w)) @ phis
