import numpy as np
import pytest
from scipy.optimize import approx_fprime
from scipy.stats import multivariate_normal

from otmap.density import GaussianDensity, gaussian_target, standard_gaussian
from otmap.utils import InvalidArgumentError

MEAN = np.array([1.0, -2.0])
COV = np.array([[2.0, 0.5], [0.5, 1.0]])


def test_log_density_matches_scipy():
    target = gaussian_target(MEAN, COV)
    points = np.random.default_rng(0).standard_normal((5, 2))
    np.testing.assert_allclose(target.log_density(points), multivariate_normal(MEAN, COV).logpdf(points))


def test_gradient_finite_difference():
    target = GaussianDensity(MEAN, COV)
    u = np.array([0.3, 0.4])
    fd = approx_fprime(u, lambda p: float(target.log_q(p)), 1e-7)
    np.testing.assert_allclose(target.grad_log_q(u), fd, atol=1e-5)


def test_hessian_is_minus_precision():
    target = GaussianDensity(MEAN, COV)
    hess = target.hess_log_q(np.zeros((3, 2)))
    assert hess.shape == (3, 2, 2)
    np.testing.assert_allclose(hess[1], -np.linalg.inv(COV))
    assert target.has_hessian


def test_proximal_stationarity():
    target = GaussianDensity(MEAN, COV)
    rho = 2.0
    v = np.array([[0.5, 0.1], [-1.0, 3.0]])
    gamma = np.array([[0.2, -0.3], [0.0, 1.0]])
    p = target.proximal(v, gamma, rho)
    # -grad log q(p) + rho (p - v) + gamma = 0
    np.testing.assert_allclose(-target.grad_log_q(p) + rho * (p - v) + gamma, 0.0, atol=1e-12)


def test_standard_gaussian():
    target = standard_gaussian(3)
    assert target.dim == 3
    assert target.log_q(np.zeros(3)) == 0.0
    assert target.log_normalizer == pytest.approx(-1.5 * np.log(2 * np.pi))


def test_rejects_bad_covariance():
    with pytest.raises(InvalidArgumentError):
        GaussianDensity(np.zeros(2), np.eye(3))
    with pytest.raises(InvalidArgumentError):
        GaussianDensity(np.zeros(2), np.array([[1.0, 0.2], [0.0, 1.0]]))
    with pytest.raises(InvalidArgumentError):
        GaussianDensity(np.zeros(2), np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_rejects_wrong_dimension():
    with pytest.raises(InvalidArgumentError):
        standard_gaussian(2).log_q(np.zeros(3))
