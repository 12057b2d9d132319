from typing import Optional

import numpy as np

from otmap.utils import InvalidArgumentError

from .base import TargetDensity
from .laplace import DEFAULT_HUBER_WIDTH, LaplaceDensity

__all__ = ["GaussianLinearLikelihood", "BayesPosterior", "bayes_lasso_posterior"]


class GaussianLinearLikelihood:
    """log f(y | x) = -|y - Phi x|^2 / (2 sigma^2), constant dropped.

    Attributes:
        y (np.ndarray): Observations in shape (n,).
        design (np.ndarray): Regressor matrix Phi in shape (n, d).
        noise_variance (float): sigma^2 > 0.
    """

    def __init__(self, y: np.ndarray, design: np.ndarray, noise_variance: float) -> None:
        y = np.asarray(y, dtype=float).ravel()
        design = np.atleast_2d(np.asarray(design, dtype=float))
        if design.shape[0] != y.size:
            raise InvalidArgumentError(
                f"Regressor matrix has {design.shape[0]} rows but y has {y.size} observations"
            )
        if not noise_variance > 0:
            raise InvalidArgumentError(f"Noise variance must be positive, but got {noise_variance}")
        self.y: np.ndarray = y
        self.design: np.ndarray = design
        self.noise_variance: float = float(noise_variance)
        self._gram: np.ndarray = design.T @ design / self.noise_variance

    @property
    def dim(self) -> int:
        return self.design.shape[1]

    def residual(self, x: np.ndarray) -> np.ndarray:
        return self.y - np.asarray(x, dtype=float) @ self.design.T

    def log_likelihood(self, x: np.ndarray) -> np.ndarray:
        r = self.residual(x)
        return -0.5 * np.sum(r**2, axis=-1) / self.noise_variance

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.residual(x) @ self.design / self.noise_variance

    def hess(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(-self._gram, x.shape + (self.dim,)).copy()


class BayesPosterior(TargetDensity):
    """Posterior log q(x) = log f(y | x) + log f(x), evidence dropped."""

    def __init__(self, prior: TargetDensity, likelihood: GaussianLinearLikelihood) -> None:
        if prior.dim != likelihood.dim:
            raise InvalidArgumentError(
                f"Prior has dimension {prior.dim} but the likelihood has {likelihood.dim} coefficients"
            )
        super().__init__(prior.dim, log_concave=prior.log_concave)
        self.prior: TargetDensity = prior
        self.likelihood: GaussianLinearLikelihood = likelihood

    def log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self.likelihood.log_likelihood(u) + self.prior.log_q(u)

    def grad_log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self.likelihood.grad(u) + self.prior.grad_log_q(u)

    def smooth_log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self.likelihood.log_likelihood(u) + self.prior.smooth_log_q(u)

    def smooth_grad_log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self.likelihood.grad(u) + self.prior.smooth_grad_log_q(u)

    def hess_log_q(self, u: np.ndarray) -> Optional[np.ndarray]:
        u = self._check_dim(u)
        prior_hess = self.prior.hess_log_q(u)
        if prior_hess is None:
            return None
        return self.likelihood.hess(u) + prior_hess


def bayes_lasso_posterior(
    y: np.ndarray,
    design: np.ndarray,
    rate: float,
    noise_variance: float,
    huber_width: float = DEFAULT_HUBER_WIDTH,
) -> BayesPosterior:
    """Bayesian LASSO posterior with a Laplace prior and fixed noise variance.

    Args:
        y (np.ndarray): Response in shape (n,).
        design (np.ndarray): Regressor matrix in shape (n, d).
        rate (float): Laplace rate lambda > 0.
        noise_variance (float): sigma^2 > 0, treated as known.
        huber_width (float): Smoothing width of |.| for Newton solves.

    Returns:
        BayesPosterior: log q(x) = -|y - Phi x|^2 / (2 sigma^2) - lambda |x|_1 + const.

    Raises:
        InvalidArgumentError: When dimensions are inconsistent or a parameter is not positive.
    """
    likelihood = GaussianLinearLikelihood(y, design, noise_variance)
    return BayesPosterior(LaplaceDensity(rate, likelihood.dim, huber_width), likelihood)
