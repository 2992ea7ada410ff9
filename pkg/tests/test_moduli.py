from __future__ import annotations

import numpy as np
import pytest

import fixtures
from toric.affine import PointCloud
from toric.errors import InputError
from toric.moduli import (
    SecondaryFan,
    calibrate_threshold,
    degenerate,
    hausdorff_distance,
    orbit_match_report,
    psi_point,
    secondary_moment,
    translate_weights,
)
from toric.pointconfig import enumerate_regular_triangulations, regular_subdivision
from toric.variety import ray_sequence_limit

SCHEDULE = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0]


def line_direction(name: str, config) -> np.ndarray:
    return fixtures.load_values(fixtures.fixture_path(name), config.labels, field="direction")


# -- Hausdorff distance ---------------------------------------------------------------


def test_hausdorff_distance_is_symmetric():
    p = [[0.0], [1.0]]
    q = [[0.0], [3.0]]
    assert hausdorff_distance(p, q) == pytest.approx(2.0)
    assert hausdorff_distance(q, p) == pytest.approx(2.0)
    assert hausdorff_distance(p, p) == 0.0


def test_hausdorff_distance_rejects_bad_samples():
    with pytest.raises(InputError):
        hausdorff_distance(np.zeros((0, 2)), [[0.0, 0.0]])
    with pytest.raises(InputError):
        hausdorff_distance([[0.0, 0.0]], [[0.0, 0.0, 0.0]])
    a = PointCloud(("a", "b"), np.array([[0.5, 0.5]]), np.array([[0.5]]))
    b = PointCloud(("x", "y"), np.array([[0.5, 0.5]]), np.array([[0.5]]))
    with pytest.raises(InputError):
        hausdorff_distance(a, b)


def test_translate_weights_are_rescaled():
    w = translate_weights(np.ones(3), np.array([0.0, -1.0, 0.0]), 5.0)
    assert w.max() == 1.0
    np.testing.assert_allclose(w, [np.exp(-5.0), 1.0, np.exp(-5.0)])


# -- degenerations ------------------------------------------------------------------------


def test_degeneration_to_the_fine_subdivision(line):
    v = line_direction("line_lift", line)
    report = degenerate(line, np.ones(3), v, SCHEDULE, density=10, seed=0)
    assert report.predicted.sorted_facets() == [["0", "1"], ["1", "2"]]
    assert report.cone_consistent
    assert report.monotone
    assert report.final_distance < report.threshold
    assert report.distances[-1] < report.distances[0]
    assert report.passed
    assert report.as_dict()["verdict"] == "pass"
    assert len(report.final) == len(report.target)


def test_degeneration_reaches_twelve_on_the_line(line):
    v = line_direction("line_lift", line)
    report = degenerate(line, np.ones(3), v, np.arange(1.0, 13.0), density=10, seed=3)
    assert report.passed
    assert report.final_distance < 1e-3


def test_degeneration_of_a_planar_configuration(five):
    lift = fixtures.load_values(fixtures.fixture_path("five_point_lift"), five.labels, field="lift")
    report = degenerate(five, np.ones(5), lift, SCHEDULE, density=6, seed=0)
    assert len(report.predicted.facets) == 4
    assert all("c" in facet for facet in report.predicted.facets)
    assert report.cone_consistent
    assert report.distances[-1] < report.distances[0]
    assert report.passed


def test_degeneration_does_not_depend_on_n_jobs(five):
    lift = fixtures.load_values(fixtures.fixture_path("five_point_lift"), five.labels, field="lift")
    serial = degenerate(five, np.ones(5), lift, [2.0, 6.0], density=4, seed=7, n_jobs=1)
    threaded = degenerate(five, np.ones(5), lift, [2.0, 6.0], density=4, seed=7, n_jobs=4)
    assert serial.distances == threaded.distances
    np.testing.assert_array_equal(serial.target.points, threaded.target.points)
    np.testing.assert_array_equal(serial.final.points, threaded.final.points)


def test_degeneration_to_the_coarse_subdivision(line):
    v = line_direction("line_direction_flip", line)
    report = degenerate(line, np.ones(3), v, SCHEDULE, density=10, seed=1)
    assert report.predicted.sorted_facets() == [["0", "2"]]
    assert report.passed
    # the middle coordinate dies in the limit
    assert np.max(report.final.points[:, 1]) < 1e-3


def test_lineality_direction_does_not_move(line):
    report = degenerate(line, np.ones(3), [0.0, 1.0, 2.0], [1.0, 5.0, 20.0], density=8)
    assert report.predicted.sorted_facets() == [["0", "1", "2"]]
    assert max(report.distances) < 1e-6
    assert report.passed


def test_degeneration_input_checks(line):
    with pytest.raises(InputError) as exc:
        degenerate(line, np.ones(3), [0.0, -1.0, 0.0], [], density=5)
    assert exc.value.field == "schedule"
    with pytest.raises(InputError):
        degenerate(line, np.ones(3), [0.0, -1.0, 0.0], [3.0, 2.0], density=5)
    with pytest.raises(InputError):
        degenerate(line, np.ones(3), [0.0, -1.0, 0.0], [1.0], density=0)


def test_degeneration_is_seeded(line):
    first = degenerate(line, np.ones(3), [0.0, -1.0, 0.0], [1.0, 2.0], density=6, seed=5)
    second = degenerate(line, np.ones(3), [0.0, -1.0, 0.0], [1.0, 2.0], density=6, seed=5)
    assert first.distances == second.distances


def test_calibration(line):
    c, theta = calibrate_threshold(line.homogenized(), np.ones(3), 10, seed=0)
    assert c >= 1e-3
    assert theta == pytest.approx(c / np.sqrt(10) + line.tol.eps_limit)
    with pytest.raises(InputError):
        calibrate_threshold(line, np.ones(3), 0)


def test_orbit_inside_a_simplicial_cone_does_not_move(line):
    report = orbit_match_report(line, [0.0, -1.0, 0.0], [1.0, 2.0, 0.5], density=10)
    # facets are simplices, so their translates are all the same
    assert report.within < 1e-8
    assert report.transverse is None
    assert report.ok


def test_orbit_across_a_non_simplicial_cell_moves(line):
    # the trivial subdivision of three collinear points has one relation, so its
    # secondary cone spans only the affine lifts
    report = orbit_match_report(line, [0.0, 0.0, 0.0], [1.0, 2.0, 0.5], density=20)
    assert report.within < 1e-8
    assert report.transverse is not None
    assert report.transverse > report.within
    assert report.ok


# -- secondary toric variety ----------------------------------------------------------------


def test_psi_point_and_its_limits(line):
    fan = SecondaryFan(line)
    p = psi_point(line, np.ones(3), fan=fan)
    assert p.cone_id == regular_subdivision(line, np.zeros(3))
    limit = ray_sequence_limit(fan, p.coord, [0.0, -1.0, 0.0])
    assert limit.label == "{{0,1}, {1,2}}"
    assert psi_point(line, np.ones(3)) == p


def test_secondary_moment(line):
    report = enumerate_regular_triangulations(line, budget=20)
    coarse = regular_subdivision(line, np.zeros(3))
    fine = regular_subdivision(line, [0.0, -1.0, 0.0])
    np.testing.assert_allclose(secondary_moment(line, np.ones(3), coarse, report.triangulations), [1.5, 1.0, 1.5])
    np.testing.assert_allclose(secondary_moment(line, np.ones(3), fine, report.triangulations), [1.0, 2.0, 1.0])
    only_coarse = [item for item in report.triangulations if len(item[0].facets) == 1]
    with pytest.raises(InputError):
        secondary_moment(line, np.ones(3), fine, only_coarse)
