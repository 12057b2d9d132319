r"""Coordinate-wise Gibbs sampler of the Bayesian LASSO posterior with known noise variance.

With a = |\Phi_j|^2 and b = \Phi_j^T (y - \Phi_{-j} x_{-j}), the full conditional of x_j is
a two-piece mixture of normals N(\mu_\pm, \sigma^2 / a) truncated to x_j > 0 and x_j < 0,
where \mu_\pm = (b \mp \lambda \sigma^2) / a. The piece weights are handled in log-space.
"""
import time

import numpy as np
from scipy.special import log_ndtr
from scipy.stats import truncnorm

from otmap.utils import InvalidArgumentError, SamplerError, get_logger

from .dataset import RegressionDataset

__all__ = ["conditional_log_weights", "draw_conditional", "gibbs_lasso"]

logger = get_logger()

DEFAULT_BURN_IN: int = 3000
DEFAULT_NUM_DRAWS: int = 10000


def conditional_log_weights(mu_pos: float, mu_neg: float, s: float):
    """Unnormalized log-masses of the positive and negative pieces."""
    lw_pos = 0.5 * (mu_pos / s) ** 2 + log_ndtr(mu_pos / s)
    lw_neg = 0.5 * (mu_neg / s) ** 2 + log_ndtr(-mu_neg / s)
    return lw_pos, lw_neg


def draw_conditional(b: float, a: float, rate: float, noise_variance: float, u_side: float, u_draw: float) -> float:
    """Inverse-CDF draw of x_j from its full conditional given two uniforms."""
    s = np.sqrt(noise_variance / a)
    shift = rate * noise_variance / a
    mu_pos, mu_neg = b / a - shift, b / a + shift
    lw_pos, lw_neg = conditional_log_weights(mu_pos, mu_neg, s)
    if np.log(u_side) < lw_pos - np.logaddexp(lw_pos, lw_neg):
        return mu_pos + s * truncnorm.ppf(u_draw, -mu_pos / s, np.inf)
    return mu_neg + s * truncnorm.ppf(u_draw, -np.inf, -mu_neg / s)


def gibbs_lasso(
    dataset: RegressionDataset,
    rate: float,
    noise_variance: float,
    burn_in: int = DEFAULT_BURN_IN,
    n_samples: int = DEFAULT_NUM_DRAWS,
    seed: int = 0,
) -> np.ndarray:
    """Sample the Bayesian LASSO posterior with fixed sigma^2.

    Args:
        dataset (RegressionDataset): Standardized regression problem.
        rate (float): Laplace rate lambda > 0.
        noise_variance (float): sigma^2 > 0.
        burn_in (int): Sweeps discarded first.
        n_samples (int): Sweeps kept, one draw per sweep.
        seed (int): Seed of `numpy.random.default_rng`.

    Returns:
        np.ndarray: Posterior draws in shape (n_samples, d).

    Raises:
        InvalidArgumentError: When a parameter is out of range.
        SamplerError: When a conditional produces a non-finite value.
    """
    if not rate > 0 or not noise_variance > 0:
        raise InvalidArgumentError(f"lambda and sigma^2 must be positive, but got {rate}, {noise_variance}")
    if burn_in < 0 or n_samples < 1:
        raise InvalidArgumentError(f"burn_in must be >= 0 and n_samples >= 1, but got {burn_in}, {n_samples}")

    X, y = dataset.X, dataset.y
    dim = X.shape[1]
    gram = X.T @ X
    xty = X.T @ y
    if np.any(np.diag(gram) <= 0):
        raise InvalidArgumentError("Every predictor column must be non-zero")

    rng = np.random.default_rng(seed)
    x = np.linalg.lstsq(X, y, rcond=None)[0]
    draws = np.empty((n_samples, dim))
    logger.info(f"Gibbs sampler: d={dim}, lambda={rate}, sigma^2={noise_variance:.6g}, burn_in={burn_in}")

    tic = time.perf_counter()
    for sweep in range(burn_in + n_samples):
        uniforms = rng.uniform(size=(dim, 2))
        for j in range(dim):
            a = gram[j, j]
            b = xty[j] - gram[j] @ x + a * x[j]
            x[j] = draw_conditional(b, a, rate, noise_variance, uniforms[j, 0], uniforms[j, 1])
            if not np.isfinite(x[j]):
                raise SamplerError(f"Non-finite draw of coordinate {j} in sweep {sweep} (b={b}, a={a})")
        if sweep >= burn_in:
            draws[sweep - burn_in] = x

    logger.info(f"Gibbs sampler finished {burn_in + n_samples} sweeps in {time.perf_counter() - tic:.1f} s")
    return draws
