"""Property suites run by ``cli verify`` and the ``verify_suite`` tool."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.spatial.distance import pdist, squareform

from toric.affine import (
    TorusElement,
    binomial_residuals,
    birch_inverse,
    is_member,
    moment,
    phi,
    minimal_face_containing,
)
from toric.cones import Cone, dual_cone, dual_face, same_cone
from toric.errors import InputError, ToricError
from toric.fans import Fan, Polytope, boundary_orthant_fan, normal_fan, simplex_fan
from toric.pointconfig import (
    PointConfig,
    config_faces,
    enumerate_regular_triangulations,
    is_triangulation,
    optimal_vertex,
    regular_subdivision,
    secondary_cone_inequalities,
)
from toric.moduli import SecondaryFan, degenerate
from toric.variety import (
    ZERO,
    FanPoint,
    cone_join,
    dense_point,
    embed_simplex,
    monoid_mul,
    normal_fan_of_config,
    one_param_limit,
    ray_sequence_limit,
    recover_fan,
)

logger = logging.getLogger(__name__)

SQRT2 = float(np.sqrt(2.0))
# degenerations run until exp(-s·gap) = e^-DECAY on the tightest wall, capped at MAX_SCHEDULE
DECAY = 40.0
MAX_SCHEDULE = 1e6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    seed: int
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def record(self, name: str, passed: bool, detail: str = "") -> None:
        if not passed:
            logger.warning("check %s failed: %s", name, detail)
        self.checks.append(Check(name, bool(passed), detail))

    def as_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }


def _count(base: int, scale: float) -> int:
    return max(1, int(round(base * scale)))


def _random_config(rng: np.random.Generator, dim: int, size: int) -> PointConfig:
    coords = rng.standard_normal((size, dim))
    return PointConfig(tuple(f"p{i}" for i in range(size)), coords)


# -- cones --------------------------------------------------------------------


def cones_suite(result: SuiteResult, rng: np.random.Generator, scale: float) -> None:
    for _ in range(_count(200, scale)):
        dim = int(rng.integers(1, 5))
        cone = Cone(rng.standard_normal((int(rng.integers(1, dim + 3)), dim)), dim)
        twice = dual_cone(dual_cone(cone))
        if not same_cone(cone, twice):
            result.record("double dual", False, repr(cone))
            return
        dual = dual_cone(cone)
        if len(cone.faces) != len(dual.faces):
            result.record("face bijection", False, f"{len(cone.faces)} vs {len(dual.faces)} faces for {cone!r}")
            return
        for face in cone.faces:
            partner = dual_face(cone, face)
            index = dual.faces.index_of(partner)
            if index is None or face.dimension + partner.dimension != dim:
                result.record("face bijection", False, f"unmatched face of {cone!r}")
                return
    result.record("double dual", True)
    result.record("face bijection", True)

    c = Cone([[1.0, SQRT2], [0.0, 1.0]])
    result.record("dual of cone{(1,√2),(0,1)}", same_cone(dual_cone(c), Cone([[-SQRT2, 1.0], [1.0, 0.0]])))


# -- birch ----------------------------------------------------------------------


def birch_suite(result: SuiteResult, rng: np.random.Generator, scale: float) -> None:
    worst_moment, worst_binomial = 0.0, 0.0
    for _ in range(_count(50, scale)):
        dim = int(rng.integers(1, 4))
        config = _random_config(rng, dim, int(rng.integers(dim + 1, 9))).homogenized()
        weights = np.exp(rng.standard_normal(len(config)))
        targets = list(rng.dirichlet(np.ones(len(config)), size=_count(10, scale)) @ config.coords)
        targets += [config.coords[config.indices(f)].mean(axis=0) for f in config_faces(config)[: _count(10, scale)]]
        for u in targets:
            solution = birch_inverse(config, weights, u)
            error = float(np.linalg.norm(moment(config, solution.z) - u)) / max(1.0, config.diameter)
            worst_moment = max(worst_moment, error)
        t = TorusElement(rng.standard_normal(config.dim))
        residuals = binomial_residuals(config, phi(config, t))
        if residuals.size:
            worst_binomial = max(worst_binomial, float(residuals.max()))
    result.record("moment round trip", worst_moment <= 1e-8, f"worst {worst_moment:.3g}")
    result.record("binomials on phi", worst_binomial <= 1e-10, f"worst {worst_binomial:.3g}")

    a1 = PointConfig(("a", "b", "c"), np.array([[-SQRT2, 1.0], [1.0, 0.0], [1.0, 1.0]]))
    z = np.array([2.0, 3.0, 2.0 * 3.0 ** (1.0 + SQRT2)])
    result.record("z_c = z_a z_b^(1+√2)", is_member(a1, z), f"z = {z.tolist()}")


# -- secondary --------------------------------------------------------------------


def line_config() -> PointConfig:
    return PointConfig(("0", "1", "2"), np.array([[0.0], [1.0], [2.0]]))


def five_point_config() -> PointConfig:
    coords = np.array([[0.0, 1.0], [1.0, 2.0], [1.2, 1.0], [1.0, 0.0], [2.0, 1.0]])
    return PointConfig(("a", "b", "c", "d", "e"), coords)


def secondary_suite(result: SuiteResult, rng: np.random.Generator, scale: float, seed: int) -> None:
    report = enumerate_regular_triangulations(line_config(), budget=64, seed=seed)
    vertices = sorted(tuple(round(x, 9) for x in gkz.coords) for gkz in report.vertices)
    result.record("GKZ vertices of {0,1,2}", vertices == [(1.0, 2.0, 1.0), (2.0, 0.0, 2.0)], str(vertices))

    five = five_point_config()
    report = enumerate_regular_triangulations(five, budget=_count(200, scale), seed=seed)
    result.record("5-point oracle agreement", report.oracle_match is True, f"{len(report)} triangulations")

    for config in (line_config(), five):
        triangulations = list(report.triangulations) if config is five else list(
            enumerate_regular_triangulations(config, budget=64, seed=seed).triangulations
        )
        mismatches = 0
        for lam in rng.standard_normal((_count(100, scale), len(config))):
            s = regular_subdivision(config, lam)
            if not is_triangulation(s, config):
                continue
            best, _ = optimal_vertex(triangulations, lam)
            mismatches += best != s
        result.record(f"normal-fan property on {len(config)} points", mismatches == 0, f"{mismatches} mismatches")


# -- limits -------------------------------------------------------------------------


def _random_complete_fan(rng: np.random.Generator) -> Fan:
    dim = int(rng.integers(1, 4))
    pts = rng.standard_normal((dim + 3, dim))
    return normal_fan(Polytope(pts))


def _random_incomplete_fan(rng: np.random.Generator) -> Fan:
    complete = _random_complete_fan(rng)
    maximal = complete.maximal_cones()
    keep = maximal[: max(1, len(maximal) // 2)] if len(maximal) > 1 else []
    if not keep or complete.dim == 0:
        return boundary_orthant_fan(int(rng.integers(1, 3)))
    return Fan([complete.cones[i] for i in keep])


def limits_suite(result: SuiteResult, rng: np.random.Generator, scale: float, seed: int) -> None:
    mismatches, missing = 0, 0
    for _ in range(_count(20, scale)):
        fan = _random_complete_fan(rng)
        report = recover_fan(fan, _count(500, scale), seed=int(rng.integers(2**32)))
        mismatches += len(report.mismatches)
        missing += report.absent
        base = rng.standard_normal(fan.dim)
        for direction in rng.standard_normal((_count(20, scale), fan.dim)):
            missing += ray_sequence_limit(fan, base, direction) is None
    result.record("fan recovery", mismatches == 0, f"{mismatches} mismatches")
    result.record("limits exist on complete fans", missing == 0, f"{missing} absent limits")

    wrong = 0
    for _ in range(_count(10, scale)):
        fan = _random_incomplete_fan(rng)
        eps = dense_point(fan)
        for v in rng.standard_normal((_count(50, scale), fan.dim)):
            covered = any(cone.contains(v) for cone in fan.cones)
            wrong += covered != (one_param_limit(fan, eps, v) is not None)
    result.record("limits exist exactly on the support", wrong == 0, f"{wrong} disagreements")

    sigma1 = simplex_fan(1)
    result.record("Σ_[1] complete", sigma1.is_complete())
    result.record("Σ'_[1] incomplete", not boundary_orthant_fan(1).is_complete())


# -- monoid ---------------------------------------------------------------------------


def _random_element(fan: Fan, rng: np.random.Generator):
    if rng.random() < 0.1:
        return ZERO
    return FanPoint(fan, int(rng.integers(len(fan))), rng.standard_normal(fan.dim))


def monoid_suite(result: SuiteResult, rng: np.random.Generator, scale: float) -> None:
    fans = [simplex_fan(2), boundary_orthant_fan(2), normal_fan(Polytope(rng.standard_normal((5, 2))))]
    failures: dict[str, int] = {"associativity": 0, "commutativity": 0, "identity": 0, "absorption": 0, "projection": 0}
    for i in range(_count(1000, scale)):
        fan = fans[i % len(fans)]
        x, y, z = (_random_element(fan, rng) for _ in range(3))
        failures["associativity"] += monoid_mul(fan, monoid_mul(fan, x, y), z) != monoid_mul(fan, x, monoid_mul(fan, y, z))
        failures["commutativity"] += monoid_mul(fan, x, y) != monoid_mul(fan, y, x)
        failures["identity"] += monoid_mul(fan, x, dense_point(fan)) != x
        failures["absorption"] += monoid_mul(fan, x, ZERO) is not ZERO
        product = monoid_mul(fan, x, y)
        expected = None if ZERO in (x, y) else cone_join(fan, x.cone_id, y.cone_id)
        failures["projection"] += (None if product is ZERO else product.cone_id) != expected
    for name, count in failures.items():
        result.record(name, count == 0, f"{count} failures")


# -- embedding --------------------------------------------------------------------------


def embedding_suite(result: SuiteResult, rng: np.random.Generator, scale: float) -> None:
    collisions, dependence, misplaced = 0, 0.0, 0
    for _ in range(_count(10, scale)):
        config = _random_config(rng, int(rng.integers(1, 3)), int(rng.integers(3, 6)))
        fan = normal_fan_of_config(config)
        points = [FanPoint(fan, int(rng.integers(len(fan))), rng.standard_normal(fan.dim)) for _ in range(_count(500, scale))]
        images = np.vstack([embed_simplex(config, p) for p in points])
        close = squareform(pdist(images)) <= 1e-12
        for i, j in zip(*np.nonzero(np.triu(close, k=1))):
            collisions += points[i] != points[j]
        for p in points[:20]:
            face = fan.face_points[p.cone_id]
            reference = embed_simplex(config, p)
            for index in face:
                other = embed_simplex(config, p, base=config.labels[index])
                dependence = max(dependence, float(np.max(np.abs(other - reference))))
        for cone_id, face in enumerate(fan.face_points):
            x = FanPoint(fan, cone_id, np.zeros(fan.dim))
            u = moment(config, embed_simplex(config, x))
            if minimal_face_containing(config, u) != config.label_set(face):
                misplaced += 1
    result.record("injective on samples", collisions == 0, f"{collisions} collisions")
    result.record("independent of the base point", dependence <= 1e-10, f"worst {dependence:.3g}")
    result.record("distinguished points land in face interiors", misplaced == 0, f"{misplaced} misplaced")


# -- moduli -----------------------------------------------------------------------------


def _schedule(config: PointConfig, v: np.ndarray, steps: int) -> np.ndarray:
    """Evenly spaced s up to where exp(-s·gap) is e^-DECAY for the tightest wall of S(v)."""
    subdivision = regular_subdivision(config, v)
    gap = 1.0
    if is_triangulation(subdivision, config):
        rows = secondary_cone_inequalities(config, subdivision)
        if rows.shape[0]:
            gap = max(float(np.min(rows @ v)), DECAY / MAX_SCHEDULE)
    end = DECAY / gap
    return np.linspace(end / steps, end, steps)


def moduli_suite(result: SuiteResult, rng: np.random.Generator, scale: float, seed: int) -> None:
    density = _count(200, scale)
    configs = [line_config()] + [
        _random_config(rng, 2, int(rng.integers(3, 7))) for _ in range(_count(10, scale))
    ]
    cone_mismatch, failed = 0, 0
    for config in configs:
        proj = config.homogenized()
        secondary = SecondaryFan(proj)
        for v in rng.standard_normal((_count(5, scale), len(proj))):
            limit = ray_sequence_limit(secondary, np.zeros(len(proj)), v)
            cone_mismatch += limit is None or limit.cone_id != regular_subdivision(proj, v)
        v = rng.standard_normal(len(proj))
        schedule = _schedule(proj, v, 40 if config is configs[0] else 10)
        try:
            report = degenerate(config, np.ones(len(config)), v, schedule, density, seed)
        except ToricError as exc:
            logger.warning("degeneration along %s failed: %s", np.round(v, 4).tolist(), exc)
            failed += 1
            continue
        if not report.passed:
            logger.warning(
                "degeneration along %s did not converge: final d_H %.3g, threshold %.3g",
                np.round(v, 4).tolist(),
                report.final_distance,
                report.threshold,
            )
            failed += 1
    result.record("secondary-fan limit is S(v)", cone_mismatch == 0, f"{cone_mismatch} mismatches")
    result.record("degenerations converge", failed == 0, f"{failed} failures")


SUITES: dict[str, Callable[..., None]] = {
    "cones": lambda r, rng, scale, seed: cones_suite(r, rng, scale),
    "birch": lambda r, rng, scale, seed: birch_suite(r, rng, scale),
    "secondary": secondary_suite,
    "limits": limits_suite,
    "monoid": lambda r, rng, scale, seed: monoid_suite(r, rng, scale),
    "embedding": lambda r, rng, scale, seed: embedding_suite(r, rng, scale),
    "moduli": moduli_suite,
}


def run_suite(name: str, seed: int = 0, *, scale: float = 1.0) -> list[SuiteResult]:
    """Run one named suite, or every suite for ``all``."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise InputError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}", field="suite")
    results = []
    for suite in names:
        started = time.perf_counter()
        result = SuiteResult(suite, seed)
        SUITES[suite](result, np.random.default_rng(seed), scale, seed)
        logger.info("suite %s finished in %.1fs", suite, time.perf_counter() - started)
        results.append(result)
    return results
