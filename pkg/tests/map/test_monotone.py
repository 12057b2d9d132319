import numpy as np
import pytest

from otmap.basis import build_multi_index_set
from otmap.map import TransportMap, check_monotonicity, project_monotone
from otmap.utils import InvalidArgumentError, UnsupportedOperation


@pytest.fixture
def folded_map() -> TransportMap:
    """S(x) = x - 0.6 x^3, decreasing for |x| > 0.75."""
    basis = build_multi_index_set("kr", 1, 3)
    weights = np.zeros((1, basis.size))
    weights[0, basis.position((1,))] = 1.0
    weights[0, basis.position((3,))] = -0.6
    return TransportMap(basis, weights, "monomial")


def test_check_monotone_map(kr_map, points):
    report = check_monotonicity(kr_map, points)
    assert report.ok
    assert report
    assert report.num_points == 25


def test_check_reports_coordinates(folded_map):
    grid = np.linspace(-1.0, 1.0, 21)[:, None]
    report = check_monotonicity(folded_map, grid)
    assert not report.ok
    assert all(v.coord == 0 and v.value <= 0 for v in report.violations)
    assert len(report.violations) == 6
    assert all(abs(v.point[0]) > 0.75 for v in report.violations)


def test_check_dense_sign():
    dense = TransportMap(build_multi_index_set("dense", 2, 1), [[0.0, -1.0, 0.0], [0.0, 0.0, 1.0]])
    report = check_monotonicity(dense, np.zeros((3, 2)))
    assert len(report.violations) == 3
    assert report.violations[0].det_sign == -1.0


def test_check_empty_points(kr_map):
    assert check_monotonicity(kr_map, np.zeros((0, 2))).ok


def test_projection_restores_monotonicity(folded_map):
    grid = np.linspace(-1.0, 1.0, 21)[:, None]
    projected = project_monotone(folded_map, grid, margin=1e-3)

    partials = projected.diagonal_partials_batch(grid)
    assert partials.min() >= 1e-3 - 1e-8
    assert projected.monotone_validated
    assert check_monotonicity(projected, grid).ok
    # the projection stays close to the original values
    assert np.max(np.abs(projected.forward_batch(grid) - folded_map.forward_batch(grid))) < 0.5


def test_projection_leaves_monotone_map_unchanged(kr_map, points):
    assert project_monotone(kr_map, points) is kr_map


def test_projection_keeps_monotone_rows(kr_map, points):
    weights = np.array(kr_map.weights)
    weights[1, kr_map.basis.position((0, 3))] = -0.5
    broken = kr_map.with_weights(weights)
    projected = project_monotone(broken, points)
    np.testing.assert_array_equal(projected.weights[0], kr_map.weights[0])
    assert projected.diagonal_partials_batch(points)[:, 1].min() >= 1e-3 - 1e-8


def test_projection_arguments(dense_map, kr_map, points):
    with pytest.raises(UnsupportedOperation):
        project_monotone(dense_map, points)
    with pytest.raises(InvalidArgumentError):
        project_monotone(kr_map, points, margin=0.0)
