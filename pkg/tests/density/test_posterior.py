import numpy as np
import pytest

from otmap.density import TargetDensity, bayes_lasso_posterior, standard_gaussian
from otmap.utils import InvalidArgumentError


@pytest.fixture
def problem():
    rng = np.random.default_rng(3)
    design = rng.standard_normal((20, 3))
    y = design @ np.array([1.0, 0.0, -2.0]) + 0.1 * rng.standard_normal(20)
    return y, design


def test_posterior_log_q(problem):
    y, design = problem
    posterior = bayes_lasso_posterior(y, design, rate=2.0, noise_variance=0.5)
    x = np.array([0.5, 0.1, -1.0])
    expected = -np.sum((y - design @ x) ** 2) / 1.0 - 2.0 * np.abs(x).sum() + 3 * np.log(1.0)
    assert posterior.log_q(x) == pytest.approx(expected)
    assert posterior.dim == 3
    assert posterior.log_concave


def test_posterior_gradient(problem):
    y, design = problem
    posterior = bayes_lasso_posterior(y, design, rate=1.0, noise_variance=0.5)
    x = np.array([0.5, 0.1, -1.0])
    expected = design.T @ (y - design @ x) / 0.5 - np.sign(x)
    np.testing.assert_allclose(posterior.grad_log_q(x), expected)


def test_posterior_hessian(problem):
    y, design = problem
    posterior = bayes_lasso_posterior(y, design, rate=1.0, noise_variance=0.5, huber_width=1e-3)
    hess = posterior.hess_log_q(np.array([[0.5, 0.1, -1.0]]))
    assert hess.shape == (1, 3, 3)
    np.testing.assert_allclose(hess[0], -design.T @ design / 0.5)


def test_posterior_shape_mismatch(problem):
    y, design = problem
    with pytest.raises(InvalidArgumentError):
        bayes_lasso_posterior(y[:-1], design, rate=1.0, noise_variance=1.0)
    with pytest.raises(InvalidArgumentError):
        bayes_lasso_posterior(y, design, rate=1.0, noise_variance=0.0)


def test_from_callables():
    target = TargetDensity.from_callables(
        2,
        log_q=lambda u: -0.5 * np.sum(u**2, axis=-1),
        grad_log_q=lambda u: -u,
        hess_log_q=lambda u: np.broadcast_to(-np.eye(2), u.shape + (2,)),
    )
    reference = standard_gaussian(2)
    u = np.random.default_rng(0).standard_normal((4, 2))
    np.testing.assert_allclose(target.log_q(u), reference.log_q(u))
    np.testing.assert_allclose(target.grad_log_q(u[0]), reference.grad_log_q(u[0]))
    assert target.hess_log_q(u).shape == (4, 2, 2)
    assert target.has_hessian
    assert not target.log_concave
    assert target.proximal(u, u, 1.0) is None


def test_from_callables_without_hessian():
    target = TargetDensity.from_callables(1, lambda u: -np.abs(u[:, 0]), lambda u: -np.sign(u))
    assert not target.has_hessian
