from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toric.affine import (
    PointCloud,
    TorusElement,
    ToricComplex,
    binomial,
    binomial_residuals,
    birch_inverse,
    is_member,
    minimal_face_containing,
    moment,
    normalize,
    phi,
    positive_weights,
    relation_basis,
    sample_complex,
    sample_translate,
    support_face,
)
from toric.errors import InputError, NotAMember, OutsideHull
from toric.pointconfig import PointConfig, config_faces, regular_subdivision

SQRT2 = float(np.sqrt(2.0))
BIRCH_LINE = [0.11620, 0.26759, 0.61620]


def random_config(seed: int) -> PointConfig:
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    size = int(rng.integers(dim + 1, 9))
    return PointConfig(tuple(f"p{i}" for i in range(size)), rng.standard_normal((size, dim)))


# -- torus and φ_A --------------------------------------------------------------


def test_torus_elements_compose():
    s = TorusElement([1.0, 2.0])
    t = TorusElement([0.5, -1.0])
    np.testing.assert_allclose((s * t).v, [1.5, 1.0])
    np.testing.assert_allclose((s * s.inverse()).v, 0.0)
    assert s.character([1.0, 0.0]) == pytest.approx(np.exp(-1.0))


def test_phi_on_line(line):
    np.testing.assert_allclose(phi(line, TorusElement([1.0])), np.exp([0.0, -1.0, -2.0]))


def test_a1_relation(a1):
    basis = relation_basis(a1)
    assert basis.shape == (1, 3)
    kappa = basis[0] / basis[0][0]
    np.testing.assert_allclose(kappa, [1.0, 1.0 + SQRT2, -1.0], atol=1e-12)
    plus, minus = binomial(kappa)
    np.testing.assert_allclose(plus - minus, kappa)
    assert np.all(plus >= 0) and np.all(minus >= 0)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_phi_images_satisfy_binomials(seed):
    config = random_config(seed)
    t = TorusElement(np.random.default_rng(seed).standard_normal(config.dim))
    assert np.all(binomial_residuals(config, phi(config, t)) <= 1e-10)


# -- membership -----------------------------------------------------------------------


def test_a1_member(a1):
    z = [2.0, 3.0, 2.0 * 3.0 ** (1.0 + SQRT2)]
    assert z[2] == pytest.approx(28.37, abs=0.01)
    assert is_member(a1, z)
    assert support_face(a1, z) == frozenset({"a", "b", "c"})


def test_a1_off_face_support(a1):
    assert not is_member(a1, [0.0, 3.0, 1.0])
    with pytest.raises(NotAMember):
        support_face(a1, [0.0, 3.0, 1.0])


def test_a1_boundary_orbit(a1):
    assert is_member(a1, [0.0, 3.0, 0.0])
    assert support_face(a1, [0.0, 3.0, 0.0]) == frozenset({"b"})


def test_a1_broken_relation(a1):
    assert not is_member(a1, [2.0, 3.0, 28.0])


def test_negative_coordinates_are_not_members(a1):
    assert not is_member(a1, [-1.0, 3.0, 1.0])


def test_moment_and_normalize(line):
    z = normalize([1.0, 1.0, 2.0])
    np.testing.assert_allclose(z, [0.25, 0.25, 0.5])
    np.testing.assert_allclose(moment(line, z), [1.25])
    with pytest.raises(InputError):
        normalize([0.0, 0.0, 0.0])


def test_weights_must_be_positive(line):
    with pytest.raises(InputError) as exc:
        positive_weights(line, [1.0, 0.0, 1.0])
    assert exc.value.field == "weights"
    np.testing.assert_allclose(positive_weights(line, {"0": 1, "1": 2, "2": 3}), [1.0, 2.0, 3.0])


# -- Birch inversion -------------------------------------------------------------------


def test_birch_on_line(line):
    sol = birch_inverse(line, np.ones(3), [1.5])
    np.testing.assert_allclose(sol.z, BIRCH_LINE, atol=1e-5)
    t = (1.0 + np.sqrt(13.0)) / 2.0
    np.testing.assert_allclose(sol.z, np.array([1.0, t, t * t]) / (1.0 + t + t * t), atol=1e-9)
    assert moment(line, sol.z)[0] == pytest.approx(1.5, abs=1e-9)
    assert sol.face == frozenset(line.labels)


def test_reference_point_has_the_target_moment(line):
    assert moment(line, BIRCH_LINE)[0] == pytest.approx(1.5, abs=1e-4)


def test_birch_at_a_vertex(line):
    sol = birch_inverse(line, np.ones(3), [0.0])
    np.testing.assert_allclose(sol.z, [1.0, 0.0, 0.0])
    assert sol.face == frozenset({"0"})
    assert sol.iterations == 0


def test_birch_on_simplex_is_barycentric(triangle):
    sol = birch_inverse(triangle, np.ones(3), [0.2, 0.3])
    np.testing.assert_allclose(sol.z, [0.5, 0.2, 0.3], atol=1e-9)


def test_birch_on_an_edge(triangle):
    sol = birch_inverse(triangle, [1.0, 5.0, 1.0], [0.4, 0.0])
    assert sol.face == frozenset({"a", "b"})
    np.testing.assert_allclose(sol.z, [0.6, 0.4, 0.0], atol=1e-9)


def test_birch_rejects_outside_targets(line, triangle):
    with pytest.raises(OutsideHull):
        birch_inverse(line, np.ones(3), [3.0])
    with pytest.raises(OutsideHull):
        birch_inverse(triangle, np.ones(3), [1.0, 1.0])


def test_minimal_face(five):
    assert minimal_face_containing(five, [1.0, 1.0]) == frozenset(five.labels)
    assert minimal_face_containing(five, [0.5, 1.5]) == frozenset({"a", "b"})
    assert minimal_face_containing(five, [2.0, 1.0]) == frozenset({"e"})


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_birch_hits_random_interior_targets(seed):
    config = random_config(seed)
    rng = np.random.default_rng(seed + 1)
    weights = rng.uniform(0.5, 2.0, len(config))
    u = rng.dirichlet(np.ones(len(config))) @ config.coords
    sol = birch_inverse(config, weights, u)
    assert np.linalg.norm(moment(config, sol.z) - u) <= 1e-8 * max(1.0, config.diameter)
    assert sol.z.sum() == pytest.approx(1.0)


@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.sampled_from([1e-5, 1e-7, 1e-9, 1e-11, 1e-13, 0.0]),
)
@settings(max_examples=60, deadline=None)
def test_birch_hits_targets_approaching_a_face(seed, eps):
    config = random_config(seed)
    rng = np.random.default_rng(seed + 2)
    faces = [face for face in config_faces(config) if len(face) < len(config)]
    face = faces[int(rng.integers(len(faces)))]
    on_face = config.coords[config.indices(face)].mean(axis=0)
    inside = rng.dirichlet(np.ones(len(config))) @ config.coords
    u = (1.0 - eps) * on_face + eps * inside
    sol = birch_inverse(config, rng.uniform(0.5, 2.0, len(config)), u)
    assert np.linalg.norm(moment(config, sol.z) - u) <= 1e-8 * max(1.0, config.diameter)
    assert face <= sol.face
    assert sol.offset <= 1e-8 * max(1.0, config.diameter)


def test_birch_just_inside_an_edge(five):
    u = (1.0 - 1e-7) * np.array([0.5, 1.5]) + 1e-7 * np.array([1.0, 1.0])
    sol = birch_inverse(five, np.ones(5), u)
    assert sol.face == frozenset(five.labels)
    assert sol.offset <= 1e-12
    np.testing.assert_allclose(moment(five, sol.z), u, atol=1e-9)
    assert sol.z[2:].sum() < 1e-5


def test_birch_on_extreme_translates(line):
    # log-weights far outside the float range of exp
    for s in (12.0, 200.0, 2000.0):
        log_w = -s * np.array([0.0, -1.0, 0.0])
        for u in (1e-3, 0.5, 1.0, 1.9):
            sol = birch_inverse(line, None, [u], log_weights=log_w)
            assert moment(line, sol.z)[0] == pytest.approx(u, abs=1e-9)


# -- sampling ---------------------------------------------------------------------------


def test_sample_complex_on_line(line):
    fine = regular_subdivision(line, [0.0, -1.0, 0.0])
    cloud = sample_complex(line, ToricComplex(fine, np.ones(3)), 5, seed=2)
    # per facet: three face barycenters plus five samples
    assert len(cloud) == 16
    np.testing.assert_allclose(cloud.points.sum(axis=1), 1.0)
    assert cloud.moments.shape == (16, 2)
    np.testing.assert_allclose(cloud.moments[:, 1], 1.0)
    np.testing.assert_allclose(cloud.points @ line.homogenized().coords, cloud.moments, atol=1e-9)
    # no point uses both ends of the segment
    assert np.all(np.minimum(cloud.points[:, 0], cloud.points[:, 2]) <= 1e-12)
    assert list(cloud.to_frame().columns) == ["0", "1", "2"]


def test_sample_complex_is_seeded(line):
    fine = regular_subdivision(line, [0.0, -1.0, 0.0])
    cx = ToricComplex(fine, np.ones(3))
    np.testing.assert_array_equal(sample_complex(line, cx, 4, seed=9).points, sample_complex(line, cx, 4, seed=9).points)


def test_sample_complex_does_not_depend_on_n_jobs(five):
    lift = np.array([0.0, 0.0, -1.0, 0.0, 0.0])
    cx = ToricComplex(regular_subdivision(five.homogenized(), lift), np.arange(1.0, 6.0))
    serial = sample_complex(five, cx, 6, seed=4, n_jobs=1)
    threaded = sample_complex(five, cx, 6, seed=4, n_jobs=4)
    np.testing.assert_array_equal(serial.points, threaded.points)
    np.testing.assert_array_equal(serial.moments, threaded.moments)


def test_sample_complex_rejects_negative_density(line):
    fine = regular_subdivision(line, [0.0, -1.0, 0.0])
    with pytest.raises(InputError):
        sample_complex(line, ToricComplex(fine, np.ones(3)), -1)


def test_sample_translate(line):
    cloud = sample_translate(line, np.ones(3), [[0.5], [1.5]])
    np.testing.assert_allclose(cloud.points[1], BIRCH_LINE, atol=1e-5)
    np.testing.assert_allclose(cloud.points @ line.coords, [[0.5], [1.5]], atol=1e-9)


def test_point_cloud_needs_points():
    with pytest.raises(InputError):
        PointCloud(("a",), np.zeros((0, 1)), np.zeros((0, 1)))
