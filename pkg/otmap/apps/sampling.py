from typing import Any, Optional, Union

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from otmap.utils import InvalidArgumentError, SourceType

__all__ = ["sample_laplace", "sample_gaussian", "sample_two_gaussian_mixture", "sample_source"]


def sample_laplace(num_samples: int, rate: float, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Product Laplace(0, 1/rate) draws by inverse CDF."""
    if not rate > 0:
        raise InvalidArgumentError(f"Laplace rate must be positive, but got {rate}")
    u = rng.uniform(-0.5, 0.5, size=(num_samples, dim))
    return -np.sign(u) * np.log1p(-2.0 * np.abs(u)) / rate


def _cholesky(cov: np.ndarray, dim: int) -> np.ndarray:
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if cov.shape != (dim, dim) or not np.allclose(cov, cov.T):
        raise InvalidArgumentError(f"Covariance must be a symmetric {dim}x{dim} matrix, but got shape {cov.shape}")
    try:
        return cholesky(cov, lower=True)
    except LinAlgError as err:
        raise InvalidArgumentError("Covariance is not positive definite") from err


def sample_gaussian(
    num_samples: int,
    mean: np.ndarray,
    cov: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """N(mean, cov) draws as mean + L z with cov = L L^T."""
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    chol = _cholesky(cov, mean.size)
    return mean + rng.standard_normal((num_samples, mean.size)) @ chol.T


def sample_two_gaussian_mixture(
    num_samples: int,
    means: np.ndarray,
    covs: np.ndarray,
    weight: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draws of weight * N(means[0], covs[0]) + (1 - weight) * N(means[1], covs[1])."""
    means = np.asarray(means, dtype=float)
    covs = np.asarray(covs, dtype=float)
    if means.ndim != 2 or means.shape[0] != 2:
        raise InvalidArgumentError(f"means must have shape (2, D), but got {means.shape}")
    if not 0 < weight < 1:
        raise InvalidArgumentError(f"weight must be in (0, 1), but got {weight}")
    dim = means.shape[1]
    if covs.shape != (2, dim, dim):
        raise InvalidArgumentError(f"covs must have shape (2, {dim}, {dim}), but got {covs.shape}")

    first = rng.uniform(size=num_samples) < weight
    z = rng.standard_normal((num_samples, dim))
    chols = [_cholesky(c, dim) for c in covs]
    return np.where(first[:, None], means[0] + z @ chols[0].T, means[1] + z @ chols[1].T)


def sample_source(
    kind: Union[str, SourceType],
    num_samples: int,
    seed: int = 0,
    dim: Optional[int] = None,
    **params: Any,
) -> np.ndarray:
    """Seeded i.i.d. draws from a built-in source distribution.

    Parameters by kind:
        laplace: `rate` (default 1.0); `dim` defaults to 1.
        gaussian: `mean` (default zeros(dim)) and `cov` (default identity).
        two-gaussian-mixture: `means` in shape (2, D) and `covs` in shape (2, D, D), or
            `shift` (default 2.0) and `std` (default 1.0) for modes at -+shift along the
            first axis; `weight` of the first mode (default 0.5).

    Args:
        kind (Union[str, SourceType]): Distribution.
        num_samples (int): N >= 1.
        seed (int): Seed of `numpy.random.default_rng`.
        dim (Optional[int]): Dimension when it is not implied by the parameters.

    Returns:
        np.ndarray: Samples in shape (N, D).

    Raises:
        InvalidArgumentError: On an unknown kind or invalid parameters.
    """
    try:
        kind = SourceType.from_value(kind)
    except ValueError as err:
        raise InvalidArgumentError(str(err)) from err
    if num_samples < 1:
        raise InvalidArgumentError(f"Number of samples must be >= 1, but got {num_samples}")
    if dim is not None and dim < 1:
        raise InvalidArgumentError(f"Dimension must be >= 1, but got {dim}")
    rng = np.random.default_rng(seed)

    if kind == SourceType.LAPLACE:
        return sample_laplace(num_samples, float(params.get("rate", 1.0)), dim or 1, rng)

    if kind == SourceType.GAUSSIAN:
        if "mean" in params:
            mean = np.atleast_1d(np.asarray(params["mean"], dtype=float))
        else:
            mean = np.zeros(dim or 1)
        if dim is not None and mean.size != dim:
            raise InvalidArgumentError(f"mean has {mean.size} entries, but dim={dim}")
        cov = params.get("cov", np.eye(mean.size))
        return sample_gaussian(num_samples, mean, cov, rng)

    if "means" in params:
        means = np.asarray(params["means"], dtype=float)
        mix_dim = means.shape[-1]
        if dim is not None and mix_dim != dim:
            raise InvalidArgumentError(f"means have {mix_dim} columns, but dim={dim}")
        covs = np.asarray(params.get("covs", np.stack([np.eye(mix_dim)] * 2)), dtype=float)
    else:
        mix_dim = dim or 2
        shift = float(params.get("shift", 2.0))
        std = float(params.get("std", 1.0))
        if not std > 0:
            raise InvalidArgumentError(f"std must be positive, but got {std}")
        means = np.zeros((2, mix_dim))
        means[0, 0], means[1, 0] = -shift, shift
        covs = np.stack([std**2 * np.eye(mix_dim)] * 2)
    return sample_two_gaussian_mixture(num_samples, means, covs, float(params.get("weight", 0.5)), rng)
