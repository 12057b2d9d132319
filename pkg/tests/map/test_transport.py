import numpy as np
import pytest

from otmap.basis import build_multi_index_set
from otmap.map import TransportMap
from otmap.utils import InvalidArgumentError, NonFiniteInputError, NonMonotoneAtPoint, StructureType


@pytest.mark.parametrize("structure", ["dense", "kr", "krsv"])
def test_identity(structure, points):
    basis = build_multi_index_set(structure, 2, 2)
    tmap = TransportMap.identity(basis)
    np.testing.assert_allclose(tmap.forward_batch(points), points, atol=1e-14)
    np.testing.assert_allclose(tmap.log_det_jacobian_batch(points), 0.0, atol=1e-14)
    assert not tmap.is_standardized


def test_identity_with_standardization(points):
    basis = build_multi_index_set("kr", 2, 3)
    tmap = TransportMap.identity(basis, shift=[1.0, -2.0], scale=[0.5, 3.0])
    assert tmap.is_standardized
    np.testing.assert_allclose(tmap.forward_batch(points), points, atol=1e-12)
    np.testing.assert_allclose(tmap.jacobian_batch(points), np.broadcast_to(np.eye(2), (25, 2, 2)), atol=1e-12)


def test_identity_needs_order_one():
    with pytest.raises(InvalidArgumentError):
        TransportMap.identity(build_multi_index_set("kr", 2, 0))


def test_forward(kr_map):
    x = np.array([1.0, 2.0])
    np.testing.assert_allclose(kr_map.forward(x), [1.2, 0.5 + 0.3 + 2.0 + 0.8])
    assert kr_map.forward(np.atleast_2d(x)).shape == (1, 2)


def test_jacobian_finite_difference(kr_map):
    x = np.array([0.4, -0.9])
    h = 1e-6
    fd = np.stack(
        [(kr_map.forward(x + h * e) - kr_map.forward(x - h * e)) / (2 * h) for e in np.eye(2)],
        axis=1,
    )
    np.testing.assert_allclose(kr_map.jacobian_batch(x[None])[0], fd, atol=1e-7)


def test_log_det_triangular_matches_dense(kr_map, dense_map, points):
    np.testing.assert_allclose(kr_map.forward_batch(points), dense_map.forward_batch(points))
    np.testing.assert_allclose(kr_map.log_det_jacobian_batch(points), dense_map.log_det_jacobian_batch(points))
    x = points[0]
    expected = np.log(1 + 0.6 * x[0] ** 2) + np.log(1 + 0.3 * x[1] ** 2)
    assert kr_map.log_det_jacobian(x) == pytest.approx(expected)


def test_log_det_raises_when_not_monotone():
    basis = build_multi_index_set("kr", 1, 1)
    tmap = TransportMap(basis, [[0.0, -1.0]])
    with pytest.raises(NonMonotoneAtPoint) as excinfo:
        tmap.log_det_jacobian(np.array([0.3]))
    assert excinfo.value.coord == 0

    dense = TransportMap(build_multi_index_set("dense", 1, 1), [[0.0, -1.0]])
    with pytest.raises(NonMonotoneAtPoint) as excinfo:
        dense.log_det_jacobian_batch(np.array([[0.3]]))
    assert excinfo.value.det_sign == -1.0


def test_weights_validation():
    basis = build_multi_index_set("kr", 2, 1)
    with pytest.raises(InvalidArgumentError):
        TransportMap(basis, np.zeros((2, 2)))
    with pytest.raises(InvalidArgumentError, match=r"W\[0, 2\]"):
        TransportMap(basis, [[0.0, 1.0, 0.5], [0.0, 0.0, 1.0]])
    with pytest.raises(NonFiniteInputError):
        TransportMap(basis, [[0.0, np.nan, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(InvalidArgumentError):
        TransportMap.identity(basis, scale=[1.0, 0.0])


def test_weights_read_only(kr_map):
    with pytest.raises(ValueError):
        kr_map.weights[0, 0] = 1.0


def test_rejects_non_finite_input(kr_map):
    with pytest.raises(NonFiniteInputError):
        kr_map.forward(np.array([np.inf, 0.0]))


def test_with_weights(kr_map):
    copied = kr_map.with_weights(2 * kr_map.weights, metadata={"theta": 1.0})
    np.testing.assert_allclose(copied.forward(np.ones(2)), 2 * kr_map.forward(np.ones(2)))
    assert copied.metadata == {"theta": 1.0}
    assert copied.structure == StructureType.KR
    assert not copied.monotone_validated


def test_repr(kr_map):
    assert repr(kr_map) == "TransportMap(structure=kr, family=monomial, D=2, O=3, K=10)"


def test_kr_rows_ignore_later_coordinates(random_kr_maps):
    rng = np.random.default_rng(6)
    for tmap in random_kr_maps:
        xs = rng.standard_normal((10, tmap.dim))
        base = tmap.forward_batch(xs)
        for j in range(tmap.dim):
            moved = xs.copy()
            moved[:, j] += rng.standard_normal(10)
            np.testing.assert_allclose(tmap.forward_batch(moved)[:, :j], base[:, :j], rtol=0.0, atol=1e-12)
