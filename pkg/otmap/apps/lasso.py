"""Bayesian LASSO posterior by transport from the Laplace prior."""
from typing import NamedTuple, Optional, Union

import numpy as np

from otmap.density import bayes_lasso_posterior
from otmap.map import SequentialMap, TransportMap, compose_forward
from otmap.solver import AdmmDiagnostics, BasisSpec, CompositionConfig, SolverConfig, fit_dense, fit_sequential
from otmap.utils import InvalidArgumentError, StructureType, get_logger

from .dataset import RegressionDataset
from .sampling import sample_source

__all__ = ["LassoTransportResult", "default_noise_variance", "lasso_map_estimate", "bayes_lasso_transport"]

logger = get_logger()

DEFAULT_NUM_PRIOR: int = 2000
DEFAULT_ORDER: int = 4


class LassoTransportResult(NamedTuple):
    """Pushed prior samples and the map that pushed them.

    Attributes:
        samples (np.ndarray): Posterior samples in shape (N_prior, d).
        map (Union[TransportMap, SequentialMap]): Fitted prior-to-posterior map.
        prior_samples (np.ndarray): Prior samples the map was fitted on.
        diagnostics (Optional[AdmmDiagnostics]): ADMM trace of a dense fit.
    """

    samples: np.ndarray
    map: Union[TransportMap, SequentialMap]
    prior_samples: np.ndarray
    diagnostics: Optional[AdmmDiagnostics] = None


def default_noise_variance(dataset: RegressionDataset) -> float:
    """Residual variance of the least-squares fit, |y - X b|^2 / (n - d)."""
    coef = np.linalg.lstsq(dataset.X, dataset.y, rcond=None)[0]
    residual = dataset.y - dataset.X @ coef
    dof = dataset.num_cases - dataset.dim
    if dof < 1:
        raise InvalidArgumentError(
            f"Cannot estimate sigma^2 from n={dataset.num_cases} cases and d={dataset.dim} predictors; "
            "pass it explicitly"
        )
    return float(residual @ residual / dof)


def lasso_map_estimate(
    dataset: RegressionDataset,
    rate: float,
    noise_variance: float,
    tol: float = 1e-10,
    max_iter: int = 10000,
) -> np.ndarray:
    """Posterior mode argmin |y - X x|^2 / (2 sigma^2) + lambda |x|_1 by cyclic coordinate descent.

    Args:
        dataset (RegressionDataset): Standardized regression problem.
        rate (float): lambda > 0.
        noise_variance (float): sigma^2 > 0.
        tol (float): Stop when no coordinate moves more than this.
        max_iter (int): Sweep cap.

    Returns:
        np.ndarray: LASSO estimate in shape (d,).
    """
    if not rate > 0 or not noise_variance > 0:
        raise InvalidArgumentError(f"lambda and sigma^2 must be positive, but got {rate}, {noise_variance}")
    X, y = dataset.X, dataset.y
    col_sq = np.sum(X**2, axis=0)
    threshold = rate * noise_variance
    x = np.zeros(X.shape[1])
    residual = y.copy()
    for sweep in range(max_iter):
        largest = 0.0
        for j in range(X.shape[1]):
            b = X[:, j] @ residual + col_sq[j] * x[j]
            new = np.sign(b) * max(abs(b) - threshold, 0.0) / col_sq[j]
            if new != x[j]:
                residual -= X[:, j] * (new - x[j])
                largest = max(largest, abs(new - x[j]))
                x[j] = new
        if largest <= tol:
            logger.debug(f"Coordinate descent converged after {sweep + 1} sweeps")
            break
    else:
        logger.warning(f"Coordinate descent stopped at max_iter={max_iter}")
    return x


def bayes_lasso_transport(
    dataset: RegressionDataset,
    rate: float,
    noise_variance: Optional[float] = None,
    num_prior: int = DEFAULT_NUM_PRIOR,
    order: int = DEFAULT_ORDER,
    structure: Union[str, StructureType] = StructureType.DENSE,
    config: Optional[SolverConfig] = None,
    composition: Optional[CompositionConfig] = None,
) -> LassoTransportResult:
    """Push Laplace prior samples to the Bayesian LASSO posterior.

    A dense map of order `order` is fitted by `fit_dense`; KR and KRSV structures fit a
    sequential map by `fit_sequential`.

    Args:
        dataset (RegressionDataset): Standardized regression problem.
        rate (float): Laplace rate lambda > 0.
        noise_variance (Optional[float]): sigma^2. Defaults to `default_noise_variance`.
        num_prior (int): Number of prior samples N_prior.
        order (int): Polynomial order of the map or of every stage.
        structure (Union[str, StructureType]): Map structure.
        config (Optional[SolverConfig]): Solver options; its seed seeds the prior draw.
        composition (Optional[CompositionConfig]): Options of a sequential fit.

    Returns:
        LassoTransportResult
    """
    config = config or SolverConfig()
    structure = StructureType.from_value(structure)
    if noise_variance is None:
        noise_variance = default_noise_variance(dataset)
    target = bayes_lasso_posterior(dataset.y, dataset.X, rate, noise_variance, config.huber_width)
    prior = sample_source("laplace", num_prior, seed=config.seed, dim=dataset.dim, rate=rate)
    basis = BasisSpec(structure=structure, order=order)
    logger.info(
        f"Bayesian LASSO transport: d={dataset.dim}, lambda={rate}, sigma^2={noise_variance:.6g}, "
        f"N_prior={num_prior}, {structure.value} O={order}"
    )

    if structure == StructureType.DENSE:
        tmap, diagnostics = fit_dense(prior, target, basis, config)
        return LassoTransportResult(tmap.forward_batch(prior), tmap, prior, diagnostics)

    seq = fit_sequential(prior, target, basis, composition, config)
    return LassoTransportResult(compose_forward(seq, prior), seq, prior)
