from typing import Optional

import numpy as np

from otmap.utils import InvalidArgumentError

from .base import TargetDensity

__all__ = ["LaplaceDensity", "laplace_prior", "DEFAULT_HUBER_WIDTH"]

DEFAULT_HUBER_WIDTH: float = 1e-6


def huber(u: np.ndarray, width: float) -> np.ndarray:
    """Huber-smoothed |u|: quadratic on [-width, width], |u| - width / 2 outside."""
    a = np.abs(u)
    return np.where(a <= width, 0.5 * u**2 / width, a - 0.5 * width)


class LaplaceDensity(TargetDensity):
    """Product Laplace prior; log q(u) = D log(rate / 2) - rate * |u|_1.

    The density is normalized as written, so `log_normalizer` is zero.

    Attributes:
        rate (float): lambda > 0.
        huber_width (float): Smoothing width used by the second-order methods.
    """

    def __init__(self, rate: float, dim: int, huber_width: float = DEFAULT_HUBER_WIDTH) -> None:
        if not rate > 0:
            raise InvalidArgumentError(f"Laplace rate must be positive, but got {rate}")
        if not huber_width > 0:
            raise InvalidArgumentError(f"Huber width must be positive, but got {huber_width}")
        super().__init__(dim, log_concave=True, log_normalizer=0.0)
        self.rate: float = float(rate)
        self.huber_width: float = float(huber_width)

    @property
    def _const(self) -> float:
        return self.dim * np.log(self.rate / 2.0)

    def log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self._const - self.rate * np.sum(np.abs(u), axis=-1)

    def grad_log_q(self, u: np.ndarray) -> np.ndarray:
        # subgradient 0 at the kink
        return -self.rate * np.sign(self._check_dim(u))

    def smooth_log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return self._const - self.rate * np.sum(huber(u, self.huber_width), axis=-1)

    def smooth_grad_log_q(self, u: np.ndarray) -> np.ndarray:
        u = self._check_dim(u)
        return -self.rate * np.clip(u / self.huber_width, -1.0, 1.0)

    def hess_log_q(self, u: np.ndarray) -> Optional[np.ndarray]:
        u = self._check_dim(u)
        curvature = np.where(np.abs(u) <= self.huber_width, -self.rate / self.huber_width, 0.0)
        return curvature[..., :, None] * np.eye(self.dim)

    def proximal(self, v: np.ndarray, gamma: np.ndarray, rho: float) -> Optional[np.ndarray]:
        # soft-thresholding of v - gamma / rho at rate / rho
        shifted = np.asarray(v) - np.asarray(gamma) / rho
        return np.sign(shifted) * np.maximum(np.abs(shifted) - self.rate / rho, 0.0)


def laplace_prior(rate: float, dim: int, huber_width: float = DEFAULT_HUBER_WIDTH) -> LaplaceDensity:
    """Independent Laplace(0, 1 / rate) prior on every coordinate.

    Args:
        rate (float): lambda > 0.
        dim (int): Dimension D.
        huber_width (float): Smoothing width for second-order inner solvers. Defaults to 1e-6.

    Raises:
        InvalidArgumentError: When rate <= 0.
    """
    return LaplaceDensity(rate, dim, huber_width)
