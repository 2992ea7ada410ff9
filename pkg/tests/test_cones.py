from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toric.cones import Cone, decompose_over_face, dual_cone, dual_face, same_cone
from toric.errors import DimensionMismatch, InfeasibleDecomposition, InvalidCone

SQRT2 = float(np.sqrt(2.0))


def random_cone(seed: int) -> Cone:
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    return Cone(rng.standard_normal((int(rng.integers(1, dim + 3)), dim)), dim)


# -- dual_cone ------------------------------------------------------------------


def test_orthant_is_self_dual():
    orthant = Cone([[1.0, 0.0], [0.0, 1.0]])
    assert same_cone(dual_cone(orthant), orthant)


def test_dual_of_irrational_cone():
    sigma = Cone([[1.0, SQRT2], [0.0, 1.0]])
    assert same_cone(dual_cone(sigma), Cone([[-SQRT2, 1.0], [1.0, 0.0]]))


def test_dual_of_whole_plane_is_origin():
    plane = Cone([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    dual = dual_cone(plane)
    assert dual.generators.shape == (0, 2)
    assert dual.contains([0.0, 0.0])
    assert not dual.contains([1.0, 0.0])


def test_dual_of_origin_is_whole_plane():
    origin = Cone([], 2)
    dual = dual_cone(origin)
    assert dual.dimension == 2
    assert dual.is_linear


def test_empty_cone_needs_dimension():
    with pytest.raises(InvalidCone):
        Cone([])


def test_pairing_with_wrong_dimension_is_rejected():
    with pytest.raises(DimensionMismatch):
        Cone([[1.0, 0.0]]).contains([1.0, 0.0, 0.0])


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_double_dual_is_identity(seed):
    cone = random_cone(seed)
    assert same_cone(dual_cone(dual_cone(cone)), cone)


# -- faces ------------------------------------------------------------------------


def test_orthant_faces():
    faces = Cone([[1.0, 0.0], [0.0, 1.0]]).faces
    assert [f.dimension for f in faces] == [0, 1, 1, 2]


def test_half_plane_faces():
    half = Cone([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
    faces = half.faces
    assert len(faces) == 2
    assert same_cone(faces.minimal.cone, Cone([[1.0, 0.0], [-1.0, 0.0]]))
    assert faces.top.dimension == 2


def test_faces_of_irrational_cone():
    c = Cone([[-SQRT2, 1.0], [1.0, 0.0]])
    faces = c.faces
    assert len(faces) == 4
    rays = faces.by_dimension(1)
    assert any(same_cone(f.cone, Cone([[-SQRT2, 1.0]])) for f in rays)
    assert any(same_cone(f.cone, Cone([[1.0, 0.0]])) for f in rays)


def test_minimal_face_is_lineality():
    cone = Cone([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert cone.lineality_basis.shape[0] == 1
    assert cone.faces.minimal.dimension == 1


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_faces_are_exposed_and_match_dual_faces(seed):
    cone = random_cone(seed)
    dual = dual_cone(cone)
    assert len(cone.faces) == len(dual.faces)
    for face in cone.faces:
        assert dual.contains(face.exposing)
        assert all(abs(g @ face.exposing) <= 1e-5 for g in face.cone.generators)
        partner = dual_face(cone, face)
        assert dual.faces.index_of(partner) is not None
        assert face.dimension + partner.dimension == cone.dim


def test_face_order_is_inclusion():
    faces = Cone([[1.0, 0.0], [0.0, 1.0]]).faces
    assert faces.is_face_of(0, 3)
    assert faces.is_face_of(1, 3)
    assert not faces.is_face_of(1, 2)


# -- membership -------------------------------------------------------------------


def test_relative_interior():
    orthant = Cone([[1.0, 0.0], [0.0, 1.0]])
    assert orthant.in_relative_interior([1.0, 1.0])
    assert not orthant.in_relative_interior([1.0, 0.0])
    assert orthant.contains([1.0, 0.0])
    assert not orthant.contains([-1.0, 0.5])


def test_generators_are_normalised_and_deduplicated():
    cone = Cone([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
    assert cone.generators.shape == (1, 2)
    np.testing.assert_allclose(cone.generators[0], [1.0, 0.0])


# -- decompose_over_face ----------------------------------------------------------------


def test_decompose_inside_dual_is_trivial():
    sigma = Cone([[1.0, SQRT2], [0.0, 1.0]])
    tau = Cone([[0.0, 1.0]])
    w = np.array([1.0, 0.0])
    u, ell = decompose_over_face(sigma, tau, w)
    np.testing.assert_allclose(u, w)
    np.testing.assert_allclose(ell, 0.0)


def test_decompose_over_a_ray():
    sigma = Cone([[1.0, SQRT2], [0.0, 1.0]])
    tau = Cone([[0.0, 1.0]])
    d = np.array([-1.0, 0.0])
    u, ell = decompose_over_face(sigma, tau, d)
    dual = dual_cone(sigma)
    np.testing.assert_allclose(u - ell, d, atol=1e-9)
    assert dual.contains(u)
    assert dual.contains(ell)
    assert abs(ell @ np.array([0.0, 1.0])) <= 1e-9
    # the smallest ℓ that works is (1, 0)
    np.testing.assert_allclose(ell, [1.0, 0.0], atol=1e-7)


def test_decompose_over_whole_cone():
    sigma = Cone([[1.0, 0.0], [0.0, 1.0]])
    w = np.array([0.5, 2.0])
    u, ell = decompose_over_face(sigma, sigma, w)
    np.testing.assert_allclose(u, w)
    np.testing.assert_allclose(ell, 0.0)


def test_decompose_rejects_w_outside_face_dual():
    sigma = Cone([[1.0, SQRT2], [0.0, 1.0]])
    with pytest.raises(InfeasibleDecomposition):
        decompose_over_face(sigma, Cone([[0.0, 1.0]]), [0.0, -1.0])


def test_decompose_rejects_non_face():
    sigma = Cone([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(InvalidCone):
        decompose_over_face(sigma, Cone([[1.0, 1.0]]), [1.0, 1.0])
