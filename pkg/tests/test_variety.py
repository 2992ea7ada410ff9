from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import fixtures
from toric.affine import TorusElement
from toric.cones import Cone
from toric.errors import InputError, NotAFanMap
from toric.fans import Fan, boundary_orthant_fan, simplex_fan
from toric.variety import (
    ZERO,
    FanMap,
    FanPoint,
    act,
    check_fan_map,
    dense_point,
    distinguished_point,
    embed_simplex,
    evaluate,
    fan_map_apply,
    is_complete,
    monoid_mul,
    normal_fan_of_config,
    one_param_limit,
    orbit_closure_cones,
    ray_sequence_limit,
    recover_fan,
    translate_projective,
)


@pytest.fixture
def sigma1():
    return simplex_fan(1)


@pytest.fixture
def boundary1():
    return boundary_orthant_fan(1)


# -- points and the torus action ---------------------------------------------------------


def test_coordinates_are_reduced_modulo_the_cone_span(sigma1):
    p = FanPoint(sigma1, sigma1.minimal_cone_id, np.array([2.0, 0.0]))
    np.testing.assert_allclose(p.coord, [1.0, -1.0])
    assert p == FanPoint(sigma1, sigma1.minimal_cone_id, np.array([3.0, 1.0]))
    assert p != dense_point(sigma1)


def test_distinguished_point_of_a_maximal_cone_is_fixed(sigma1):
    x0 = distinguished_point(sigma1, "{0}")
    assert act(TorusElement([5.0, -2.0]), x0) == x0
    assert x0.label == "{0}"


def test_evaluate_matches_the_torus_character(sigma1):
    t = TorusElement([0.5, 0.0])
    p = act(t, dense_point(sigma1))
    u = np.array([1.0, -1.0])
    assert evaluate(p, u) == pytest.approx(t.character(u))
    assert evaluate(dense_point(sigma1), u) == pytest.approx(1.0)


def test_evaluate_vanishes_off_the_orbit(sigma1):
    x0 = distinguished_point(sigma1, "{0}")
    assert evaluate(x0, [1.0, -1.0]) == 0.0
    with pytest.raises(InputError):
        evaluate(x0, [-1.0, 1.0])


# -- one-parameter limits -----------------------------------------------------------------


def test_limits_on_simplex_fan(sigma1):
    eps = dense_point(sigma1)
    assert one_param_limit(sigma1, eps, [1.0, 0.0]).label == "{0}"
    assert one_param_limit(sigma1, eps, [0.0, 3.0]).label == "{1}"
    assert one_param_limit(sigma1, eps, [-1.0, 0.0]).label == "{1}"
    assert one_param_limit(sigma1, eps, [1.0, 1.0]) == eps
    assert one_param_limit(sigma1, eps, [0.0, 0.0]) == eps


def test_limit_keeps_the_orbit_coordinate(sigma1):
    p = act(TorusElement([0.0, 0.7]), dense_point(sigma1))
    limit = one_param_limit(sigma1, p, [1.0, 0.0])
    assert limit.label == "{0}"
    # the span of {0} is the whole plane
    np.testing.assert_allclose(limit.coord, 0.0, atol=1e-12)


def test_limits_diverge_off_the_support(boundary1):
    eps = dense_point(boundary1)
    assert one_param_limit(boundary1, eps, [1.0, 1.0]) is None
    assert one_param_limit(boundary1, eps, [-1.0, 0.0]) is None
    assert one_param_limit(boundary1, eps, [2.0, 0.0]).label == "{0}"


def test_limit_from_a_fixed_point_stays_put(sigma1):
    x0 = distinguished_point(sigma1, "{0}")
    for v in ([1.0, 0.0], [-1.0, 2.0], [0.3, -0.1]):
        assert one_param_limit(sigma1, x0, v) == x0


def test_ray_sequence_limit(sigma1, boundary1):
    limit = ray_sequence_limit(sigma1, [0.3, 0.0], [0.0, 1.0])
    assert limit.label == "{1}"
    assert ray_sequence_limit(boundary1, [0.3, 0.0], [1.0, 1.0]) is None


def test_completeness_matches_limits(sigma1, boundary1):
    assert is_complete(sigma1)
    assert not is_complete(boundary1)


# -- monoid and orbit closures ---------------------------------------------------------------


def test_monoid_multiplication(sigma1):
    eps = dense_point(sigma1)
    x0 = distinguished_point(sigma1, "{0}")
    x1 = distinguished_point(sigma1, "{1}")
    assert monoid_mul(sigma1, eps, x0) == x0
    assert monoid_mul(sigma1, x0, x1) is ZERO
    assert monoid_mul(sigma1, ZERO, eps) is ZERO
    p = act(TorusElement([1.0, 0.0]), eps)
    q = act(TorusElement([0.0, 2.0]), eps)
    np.testing.assert_allclose(monoid_mul(sigma1, p, q).coord, act(TorusElement([1.0, 2.0]), eps).coord)


def test_orbit_closures(sigma1, boundary1):
    assert orbit_closure_cones(sigma1, "{}") == [0, 1, 2]
    assert orbit_closure_cones(sigma1, "{0}") == [sigma1.resolve("{0}")]
    assert orbit_closure_cones(boundary1, "{}") == [0, 1, 2]


def test_recover_simplex_fan():
    fan = simplex_fan(2)
    report = recover_fan(fan, 60, seed=4)
    assert report.ok
    assert report.absent == 0
    assert set(report.groups) <= set(fan.labels)
    assert sum(report.groups.values()) == report.samples


def test_recover_incomplete_fan(boundary1):
    report = recover_fan(boundary1, 40, seed=1)
    assert report.ok
    assert report.absent > 0


# -- maps of fans ---------------------------------------------------------------------------


def test_identity_is_a_fan_map(sigma1, boundary1):
    eye = np.eye(2)
    assert check_fan_map(eye, sigma1, sigma1) == {0: 0, 1: 1, 2: 2}
    assert check_fan_map(eye, boundary1, sigma1) == {0: 0, 1: 1, 2: 2}
    image = fan_map_apply(eye, boundary1, sigma1, distinguished_point(boundary1, "{0}"))
    assert image.fan is sigma1
    assert image.label == "{0}"


def test_lineality_must_map_into_a_cone(sigma1, boundary1):
    with pytest.raises(NotAFanMap) as exc:
        check_fan_map(np.eye(2), sigma1, boundary1)
    assert exc.value.cone == "{}"


def test_fan_map_shape_is_checked(sigma1):
    with pytest.raises(InputError):
        check_fan_map(np.eye(3), sigma1, sigma1)


def _projection_map():
    """(x, y) ↦ x - y, taking Σ_[1] onto the complete fan of R."""
    source = simplex_fan(1)
    target = Fan([Cone([[1.0]], 1), Cone([[-1.0]], 1)], labels=["+", "-"])
    return FanMap([[1.0, -1.0]], source, target)


def _scaling_map():
    fan = boundary_orthant_fan(1)
    return FanMap(np.diag([1.0, np.sqrt(2.0)]), fan, fan)


def test_projection_is_a_fan_map():
    psi = _projection_map()
    assert [psi.target.labels[psi.assignment[psi.source.labels.index(label)]] for label in ("{0}", "{1}")] == ["+", "-"]
    image = psi(dense_point(psi.source))
    assert image.cone_id == psi.target.minimal_cone_id


@given(st.sampled_from(["projection", "scaling"]), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_fan_maps_are_torus_equivariant(kind, seed):
    psi = _projection_map() if kind == "projection" else _scaling_map()
    rng = np.random.default_rng(seed)
    p = FanPoint(psi.source, int(rng.integers(len(psi.source))), 3.0 * rng.standard_normal(2))
    t = TorusElement(3.0 * rng.standard_normal(2))
    moved_first = fan_map_apply(psi, psi.source, psi.target, act(t, p))
    assert moved_first == act(psi.torus(t), fan_map_apply(psi, psi.source, psi.target, p))


def test_fan_map_is_checked_once(sigma1, boundary1):
    psi = FanMap(np.eye(2), boundary1, sigma1)
    p = distinguished_point(boundary1, "{0}")
    assert fan_map_apply(psi, boundary1, sigma1, p) == fan_map_apply(np.eye(2), boundary1, sigma1, p)
    with pytest.raises(InputError):
        fan_map_apply(psi, sigma1, sigma1, p)
    with pytest.raises(InputError):
        psi(dense_point(sigma1))


# -- projective embedding ---------------------------------------------------------------------


def test_embedding_of_the_dense_orbit(line):
    fan = normal_fan_of_config(line)
    eps = dense_point(fan)
    np.testing.assert_allclose(embed_simplex(line, eps), [1 / 3, 1 / 3, 1 / 3])
    t = TorusElement([0.4])
    expected = translate_projective(line, t, np.full(3, 1 / 3))
    np.testing.assert_allclose(embed_simplex(line, act(t, eps)), expected)


def test_embedding_of_limits_is_a_vertex(line):
    fan = normal_fan_of_config(line)
    eps = dense_point(fan)
    np.testing.assert_allclose(embed_simplex(line, one_param_limit(fan, eps, [1.0])), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(embed_simplex(line, one_param_limit(fan, eps, [-1.0])), [0.0, 0.0, 1.0])


def test_embedding_needs_the_normal_fan(line, sigma1):
    with pytest.raises(InputError):
        embed_simplex(line, dense_point(sigma1))


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_embedding_is_torus_equivariant(seed):
    config = fixtures.load_config(fixtures.fixture_path("five_point"))
    fan = normal_fan_of_config(config)
    rng = np.random.default_rng(seed)
    p = FanPoint(fan, int(rng.integers(len(fan))), rng.standard_normal(2))
    t = TorusElement(rng.standard_normal(2))
    expected = translate_projective(config, t, embed_simplex(config, p))
    np.testing.assert_allclose(embed_simplex(config, act(t, p)), expected, atol=1e-12)


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_embedding_is_injective(seed):
    config = fixtures.load_config(fixtures.fixture_path("five_point"))
    fan = normal_fan_of_config(config)
    rng = np.random.default_rng(seed)
    first = int(rng.integers(len(fan)))
    second = first if rng.random() < 0.5 else int(rng.integers(len(fan)))
    p = FanPoint(fan, first, rng.standard_normal(2))
    q = FanPoint(fan, second, rng.standard_normal(2))
    same_image = np.allclose(embed_simplex(config, p), embed_simplex(config, q), rtol=0.0, atol=1e-9)
    assert same_image == (p == q)
    assert embed_simplex(config, p).sum() == pytest.approx(1.0)


def test_embedding_ignores_the_homogenising_coordinate(five):
    raw = normal_fan_of_config(five)
    lifted_config = five.homogenized()
    lifted = normal_fan_of_config(lifted_config)
    assert sorted(raw.labels) == sorted(lifted.labels)
    rng = np.random.default_rng(11)
    for label in raw.labels:
        v = rng.standard_normal(2)
        p = FanPoint(raw, raw.labels.index(label), v)
        q = FanPoint(lifted, lifted.labels.index(label), np.append(v, rng.standard_normal()))
        np.testing.assert_allclose(embed_simplex(five, p), embed_simplex(lifted_config, q), atol=1e-12)
