from typing import Optional

import numpy as np
import scipy.linalg

from otmap.utils import InvalidArgumentError

from .base import TargetDensity

__all__ = ["GaussianDensity", "gaussian_target", "standard_gaussian"]


class GaussianDensity(TargetDensity):
    """Gaussian N(mean, cov); log q(u) = -1/2 (u - mean)^T cov^{-1} (u - mean).

    Attributes:
        mean (np.ndarray): Mean in shape (D,).
        cov (np.ndarray): SPD covariance in shape (D, D).
        precision (np.ndarray): cov^{-1}.
    """

    def __init__(self, mean: np.ndarray, cov: np.ndarray) -> None:
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        if cov.shape != (mean.size, mean.size):
            raise InvalidArgumentError(f"Covariance shape {cov.shape} does not match mean of size {mean.size}")
        if not np.allclose(cov, cov.T):
            raise InvalidArgumentError("Covariance must be symmetric")
        try:
            factor = scipy.linalg.cho_factor(cov, lower=True)
        except np.linalg.LinAlgError as err:
            raise InvalidArgumentError(f"Covariance is not positive definite: {err}") from err

        log_det = 2.0 * np.sum(np.log(np.diag(factor[0])))
        super().__init__(mean.size, log_concave=True, log_normalizer=-0.5 * (mean.size * np.log(2 * np.pi) + log_det))
        self.mean: np.ndarray = mean
        self.cov: np.ndarray = cov
        self.precision: np.ndarray = scipy.linalg.cho_solve(factor, np.eye(mean.size))

    def log_q(self, u: np.ndarray) -> np.ndarray:
        r = self._check_dim(u) - self.mean
        return -0.5 * np.einsum("...i,ij,...j->...", r, self.precision, r)

    def grad_log_q(self, u: np.ndarray) -> np.ndarray:
        r = self._check_dim(u) - self.mean
        return -r @ self.precision

    def hess_log_q(self, u: np.ndarray) -> Optional[np.ndarray]:
        u = self._check_dim(u)
        return np.broadcast_to(-self.precision, u.shape + (self.dim,)).copy()

    def proximal(self, v: np.ndarray, gamma: np.ndarray, rho: float) -> Optional[np.ndarray]:
        # (P + rho I) p = P mean + rho v - gamma
        lhs = self.precision + rho * np.eye(self.dim)
        rhs = self.precision @ self.mean + rho * np.asarray(v) - np.asarray(gamma)
        return np.linalg.solve(lhs, rhs.T).T


def gaussian_target(mean: np.ndarray, covariance: np.ndarray) -> GaussianDensity:
    """Gaussian target density.

    Args:
        mean (np.ndarray): Mean vector.
        covariance (np.ndarray): Symmetric positive definite matrix.

    Returns:
        GaussianDensity: Target with constant dropped from log_q.

    Raises:
        InvalidArgumentError: When the covariance is not SPD.
    """
    return GaussianDensity(mean, covariance)


def standard_gaussian(dim: int) -> GaussianDensity:
    """N(0, I) in dimension `dim`."""
    return GaussianDensity(np.zeros(dim), np.eye(dim))
