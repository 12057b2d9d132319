from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Callable, Optional

import numpy as np

from otmap.utils import InvalidArgumentError

__all__ = ["TargetDensity", "CallableDensity"]


class TargetDensity(ABC):
    """Unnormalized log-density log q of a target Q on R^D.

    Every method accepts a point in shape (D,) or a batch in shape (..., D).

    Attributes:
        dim (int): Dimension D.
        log_concave (bool): Asserted log-concavity; the solvers trust it.
        log_normalizer (Optional[float]): Constant c with log q(u) + c the normalized
            log-density, when it is known.
    """

    @abstractmethod
    def __init__(self, dim: int, log_concave: bool = True, log_normalizer: Optional[float] = None) -> None:
        super().__init__()
        if int(dim) != dim or dim < 1:
            raise InvalidArgumentError(f"Dimension must be a positive integer, but got {dim}")
        self.dim: int = int(dim)
        self.log_concave: bool = log_concave
        self.log_normalizer: Optional[float] = log_normalizer

    @abstractmethod
    def log_q(self, u: np.ndarray) -> np.ndarray:
        """log q(u) up to an additive constant, shape u.shape[:-1]."""

    @abstractmethod
    def grad_log_q(self, u: np.ndarray) -> np.ndarray:
        """Gradient of log q, shape u.shape."""

    def hess_log_q(self, u: np.ndarray) -> Optional[np.ndarray]:
        """Hessian of the smoothed log q, shape u.shape + (D,). None when not available."""
        return None

    def smooth_log_q(self, u: np.ndarray) -> np.ndarray:
        """log q with kinks smoothed, used by second-order inner solvers."""
        return self.log_q(u)

    def smooth_grad_log_q(self, u: np.ndarray) -> np.ndarray:
        """Gradient of `smooth_log_q`."""
        return self.grad_log_q(u)

    @property
    def has_hessian(self) -> bool:
        return self.hess_log_q(np.zeros(self.dim)) is not None

    def proximal(self, v: np.ndarray, gamma: np.ndarray, rho: float) -> Optional[np.ndarray]:
        """Closed-form argmin_p -log q(p) + rho/2 |v - p|^2 + gamma^T (p - v), batched over rows.

        Returns None when no closed form is known.
        """
        return None

    def log_density(self, u: np.ndarray) -> np.ndarray:
        """Normalized log-density when the normalizer is known, else log q."""
        return self.log_q(u) + (self.log_normalizer or 0.0)

    def _check_dim(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape[-1] != self.dim:
            raise InvalidArgumentError(f"Points have dimension {u.shape[-1]} but the density has D={self.dim}")
        return u

    @classmethod
    def from_callables(
        cls,
        dim: int,
        log_q: Callable[[np.ndarray], np.ndarray],
        grad_log_q: Callable[[np.ndarray], np.ndarray],
        hess_log_q: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        log_concave: bool = False,
    ) -> CallableDensity:
        """Wrap user functions as a TargetDensity.

        The callables receive a batch in shape (N, D) and return (N,), (N, D) and (N, D, D).
        Convexity of the transport problem is the caller's responsibility.
        """
        return CallableDensity(dim, log_q, grad_log_q, hess_log_q, log_concave)


class CallableDensity(TargetDensity):
    """TargetDensity backed by user-supplied batch callables."""

    def __init__(
        self,
        dim: int,
        log_q: Callable[[np.ndarray], np.ndarray],
        grad_log_q: Callable[[np.ndarray], np.ndarray],
        hess_log_q: Optional[Callable[[np.ndarray], np.ndarray]] = None,
        log_concave: bool = False,
    ) -> None:
        super().__init__(dim, log_concave=log_concave)
        self._log_q = log_q
        self._grad = grad_log_q
        self._hess = hess_log_q

    def _apply(self, fn: Callable[[np.ndarray], np.ndarray], u: np.ndarray, tail: tuple) -> np.ndarray:
        u = self._check_dim(u)
        flat = u.reshape(-1, self.dim)
        out = np.asarray(fn(flat), dtype=float)
        return out.reshape(u.shape[:-1] + tail)

    def log_q(self, u: np.ndarray) -> np.ndarray:
        return self._apply(self._log_q, u, ())

    def grad_log_q(self, u: np.ndarray) -> np.ndarray:
        return self._apply(self._grad, u, (self.dim,))

    def hess_log_q(self, u: np.ndarray) -> Optional[np.ndarray]:
        if self._hess is None:
            return None
        return self._apply(self._hess, u, (self.dim, self.dim))
