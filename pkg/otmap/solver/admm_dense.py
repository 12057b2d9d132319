r"""Consensus ADMM for the dense push-forward problem.

The sample objective

.. math::
    \frac{1}{N}\sum_i -\log q(B\Phi_i) - \log\det(BJ_i)

is split with per-sample copies :math:`W_i = B`, :math:`p_i = B\Phi_i` and
:math:`Z_i = BJ_i`. One iteration updates B, W, Z, p and then the multipliers
gamma (for p), lambda (for Z) and alpha (for W). Every per-sample block runs over
sample shards; the B-update is the only reduction.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg

from otmap.density import TargetDensity
from otmap.map import TransportMap, check_monotonicity
from otmap.utils import (
    DegenerateBasisError,
    InitType,
    InvalidArgumentError,
    NonConvergence,
    NonFiniteInputError,
    NumericalError,
    PUpdateType,
    StructureType,
    get_logger,
)

from .config import AdmmDiagnostics, BasisSpec, SolverConfig
from .p_update import solve_prox
from .parallel import ShardExecutor

__all__ = [
    "FitResult",
    "DenseAdmmState",
    "init_dense_state",
    "initial_map",
    "update_B",
    "update_W",
    "update_Z",
    "update_p",
    "update_multipliers",
    "residuals",
    "dense_objective",
    "fit_dense",
]

logger = get_logger()


class FitResult(NamedTuple):
    map: TransportMap
    diagnostics: AdmmDiagnostics


@dataclass
class DenseAdmmState:
    """Iterate of the dense solver; per-sample arrays are indexed by sample first.

    Attributes:
        phi (np.ndarray): Phi_i in shape (N, K).
        jac (np.ndarray): J_i in shape (N, K, D).
        rho (float): Penalty.
        B (np.ndarray): Consensus weights in shape (D, K).
        W (np.ndarray): Copies W_i in shape (N, D, K).
        Z (np.ndarray): SPD copies of B J_i in shape (N, D, D).
        p (np.ndarray): Copies of B Phi_i in shape (N, D).
        gamma (np.ndarray): Multipliers of p in shape (N, D).
        lam (np.ndarray): Multipliers of Z in shape (N, D, D).
        alpha (np.ndarray): Multipliers of W in shape (N, D, K).
        factor (tuple): Cholesky factor of L = rho (I + (1/N) sum(Phi Phi^T + J J^T)).
        B_prev (np.ndarray): B of the previous iteration.
        p_converged (np.ndarray): Per-sample flag of the last p-update.
        iteration (int): Completed iterations.
    """

    phi: np.ndarray
    jac: np.ndarray
    rho: float
    B: np.ndarray
    W: np.ndarray
    Z: np.ndarray
    p: np.ndarray
    gamma: np.ndarray
    lam: np.ndarray
    alpha: np.ndarray
    factor: tuple
    B_prev: np.ndarray
    p_converged: np.ndarray
    iteration: int = 0

    @property
    def num_samples(self) -> int:
        return self.phi.shape[0]

    @property
    def dim(self) -> int:
        return self.B.shape[0]

    @property
    def size(self) -> int:
        return self.B.shape[1]

    def static_matrix(self) -> np.ndarray:
        """L reconstructed from its factor."""
        c, lower = self.factor
        tri = np.tril(c) if lower else np.triu(c)
        return tri @ tri.T if lower else tri.T @ tri


def _factor(matrix: np.ndarray) -> tuple:
    try:
        return scipy.linalg.cho_factor(matrix, lower=True)
    except (np.linalg.LinAlgError, ValueError) as err:
        raise DegenerateBasisError(f"Static factor of the B-update is not positive definite: {err}") from err


def spd_floor(matrices: np.ndarray, min_eig: float) -> np.ndarray:
    """Symmetrize and floor eigenvalues at `min_eig`, batched over the leading axis."""
    sym = 0.5 * (matrices + np.swapaxes(matrices, -1, -2))
    eigvals, eigvecs = np.linalg.eigh(sym)
    return (eigvecs * np.maximum(eigvals, min_eig)[..., None, :]) @ np.swapaxes(eigvecs, -1, -2)


def initial_map(
    samples: np.ndarray,
    basis_spec: BasisSpec,
    config: SolverConfig,
    warm_start: Optional[TransportMap] = None,
) -> TransportMap:
    """Starting map of a fit: identity (optionally standardized) or a warm start."""
    basis = basis_spec.build(samples.shape[1])
    if warm_start is not None:
        if warm_start.basis != basis:
            raise InvalidArgumentError(f"Warm start basis {warm_start} does not match the requested basis")
        return warm_start
    shift, scale = None, None
    if config.standardize:
        shift = samples.mean(axis=0)
        scale = samples.std(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
    return TransportMap.identity(basis, basis_spec.univariate, shift=shift, scale=scale)


def validate_inputs(samples: np.ndarray, target: TargetDensity) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.ndim != 2 or samples.shape[0] < 1:
        raise InvalidArgumentError(f"Samples must have shape (N, D) with N >= 1, but got {samples.shape}")
    if not np.all(np.isfinite(samples)):
        raise NonFiniteInputError("Samples must be finite")
    if target.dim != samples.shape[1]:
        raise InvalidArgumentError(f"Target has dimension {target.dim} but the samples have D={samples.shape[1]}")
    return samples


def init_dense_state(samples: np.ndarray, start: TransportMap, config: SolverConfig) -> DenseAdmmState:
    """State with B = W_i = start.weights, Z_i = BJ_i floored to SPD, p_i = B Phi_i, zero multipliers."""
    phi, jac = start.features_and_jacobian(samples)
    num, size = phi.shape
    dim = start.dim
    rho = config.rho

    jac_rows = np.swapaxes(jac, 1, 2).reshape(-1, size)
    static = rho * (np.eye(size) + (phi.T @ phi + jac_rows.T @ jac_rows) / num)
    B = np.array(start.weights)
    return DenseAdmmState(
        phi=phi,
        jac=jac,
        rho=rho,
        B=B,
        W=np.broadcast_to(B, (num, dim, size)).copy(),
        Z=spd_floor(np.matmul(B, jac), config.min_eig_init),
        p=phi @ B.T,
        gamma=np.zeros((num, dim)),
        lam=np.zeros((num, dim, dim)),
        alpha=np.zeros((num, dim, size)),
        factor=_factor(static),
        B_prev=B.copy(),
        p_converged=np.ones(num, dtype=bool),
    )


def _serial(state: DenseAdmmState) -> ShardExecutor:
    return ShardExecutor(state.num_samples, 1)


def update_B(state: DenseAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """B = M L^{-1} with M = (1/N) sum[rho(W_i + p_i Phi_i^T + Z_i J_i^T) + gamma_i Phi_i^T + lam_i J_i^T + alpha_i]."""
    executor = executor or _serial(state)
    rho = state.rho

    def terms(sl: slice) -> np.ndarray:
        rp = rho * state.p[sl] + state.gamma[sl]
        rz = rho * state.Z[sl] + state.lam[sl]
        return (
            rp[:, :, None] * state.phi[sl][:, None, :]
            + np.matmul(rz, np.swapaxes(state.jac[sl], 1, 2))
            + rho * state.W[sl]
            + state.alpha[sl]
        )

    M = executor.sum(terms) / state.num_samples
    state.B_prev = state.B
    state.B = scipy.linalg.cho_solve(state.factor, M.T).T
    return state.B


def update_W(state: DenseAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """W_i = B - alpha_i / rho."""
    executor = executor or _serial(state)

    def step(sl: slice) -> None:
        state.W[sl] = state.B - state.alpha[sl] / state.rho

    executor.run(step)
    return state.W


def z_from_eigenvalues(nu: np.ndarray, rho: float) -> np.ndarray:
    """Positive root z of rho z - 1 / z = nu, stable for either sign of nu."""
    root = np.sqrt(nu**2 + 4.0 * rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(nu >= 0, (nu + root) / (2.0 * rho), 2.0 / (root - nu))


def update_Z(state: DenseAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """Z_i = Q diag(z(nu)) Q^T from the eigendecomposition of sym(rho B J_i - lam_i)."""
    executor = executor or _serial(state)
    rho = state.rho

    def step(sl: slice) -> None:
        M = rho * np.matmul(state.B, state.jac[sl]) - state.lam[sl]
        M = 0.5 * (M + np.swapaxes(M, 1, 2))
        try:
            nu, Q = np.linalg.eigh(M)
        except np.linalg.LinAlgError as err:
            for i in range(M.shape[0]):
                if not np.all(np.isfinite(M[i])):
                    raise NumericalError(f"eigendecomposition failed: {err}", sl.start + i) from err
            raise NumericalError(f"eigendecomposition failed: {err}", sl.start) from err
        Z = (Q * z_from_eigenvalues(nu, rho)[:, None, :]) @ np.swapaxes(Q, 1, 2)
        state.Z[sl] = 0.5 * (Z + np.swapaxes(Z, 1, 2))

    executor.run(step)
    return state.Z


def update_p(
    state: DenseAdmmState,
    target: TargetDensity,
    config: Optional[SolverConfig] = None,
    executor: Optional[ShardExecutor] = None,
) -> np.ndarray:
    """p_i = prox of -log q at B Phi_i - gamma_i / rho; failed samples keep their previous p_i."""
    config = config or SolverConfig(rho=state.rho, workers=1)
    executor = executor or _serial(state)

    def step(sl: slice) -> None:
        v = state.phi[sl] @ state.B.T
        p, converged = solve_prox(
            target,
            v,
            state.gamma[sl],
            state.rho,
            state.p[sl],
            method=config.p_update,
            tol=config.newton_tol if config.p_update == PUpdateType.NEWTON else config.lbfgs_tol,
            max_iter=config.newton_max_iter,
        )
        state.p[sl] = p
        state.p_converged[sl] = converged

    executor.run(step)
    return state.p


def update_multipliers(
    state: DenseAdmmState, executor: Optional[ShardExecutor] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """gamma += rho (p - B Phi), lam += rho (Z - B J), alpha += rho (W - B)."""
    executor = executor or _serial(state)
    rho = state.rho

    def step(sl: slice) -> None:
        state.gamma[sl] += rho * (state.p[sl] - state.phi[sl] @ state.B.T)
        state.lam[sl] += rho * (state.Z[sl] - np.matmul(state.B, state.jac[sl]))
        state.alpha[sl] += rho * (state.W[sl] - state.B)

    executor.run(step)
    return state.gamma, state.lam, state.alpha


def residuals(state: DenseAdmmState, executor: Optional[ShardExecutor] = None) -> Tuple[float, float]:
    """RMS primal residual (max over the p, Z and W constraints) and rho * RMS change of B."""
    executor = executor or _serial(state)
    num, dim, size = state.num_samples, state.dim, state.size

    def squares(sl: slice) -> np.ndarray:
        rp = state.p[sl] - state.phi[sl] @ state.B.T
        rz = state.Z[sl] - np.matmul(state.B, state.jac[sl])
        rw = state.W[sl] - state.B
        return np.stack([np.sum(rp**2, axis=1), np.sum(rz**2, axis=(1, 2)), np.sum(rw**2, axis=(1, 2))], axis=1)

    sums = executor.sum(squares)
    primal = max(
        np.sqrt(sums[0] / (num * dim)),
        np.sqrt(sums[1] / (num * dim * dim)),
        np.sqrt(sums[2] / (num * dim * size)),
    )
    dual = state.rho * np.sqrt(np.mean((state.B - state.B_prev) ** 2))
    return float(primal), float(dual)


def sample_objective(target: TargetDensity, pushed: np.ndarray, log_det: np.ndarray) -> float:
    """(1/N) sum[-log q(S(X_i)) - log det J_S(X_i)], normalized when the target's constant is known."""
    return float(np.mean(-target.log_density(pushed) - log_det))


def dense_objective(state: DenseAdmmState, target: TargetDensity) -> float:
    """Empirical objective of the current B; NaN when B J_i has a non-positive determinant."""
    sign, logdet = np.linalg.slogdet(np.matmul(state.B, state.jac))
    logdet = np.where(sign > 0, logdet, np.nan)
    return sample_objective(target, state.phi @ state.B.T, logdet)


def _score(primal: float, dual: float, config: SolverConfig) -> float:
    return max(primal / config.tol_primal, dual / config.tol_dual)


def fit_dense(
    samples: np.ndarray,
    target: TargetDensity,
    basis: Optional[BasisSpec] = None,
    config: Optional[SolverConfig] = None,
    warm_start: Optional[TransportMap] = None,
) -> FitResult:
    """Fit a dense map pushing `samples` to `target` by consensus ADMM.

    Args:
        samples (np.ndarray): Source samples in shape (N, D).
        target (TargetDensity): Log-concave target of dimension D.
        basis (Optional[BasisSpec]): Dense basis. Defaults to Hermite of order 1.
        config (Optional[SolverConfig]): Solver options.
        warm_start (Optional[TransportMap]): Starting map when `config.init` is WARM.

    Returns:
        FitResult: Map with W = B and the run's diagnostics. Without convergence the
            iterate with the smallest scaled residual is returned and flagged.
            The map is checked for a positive Jacobian determinant at every sample;
            a failing check is logged as a warning and leaves `monotone_validated` unset.

    Raises:
        InvalidArgumentError: On inconsistent input.
        DegenerateBasisError: When the static factor cannot be factorized.
        NonConvergence: Only with `config.raise_on_nonconvergence`.
    """
    basis = basis or BasisSpec()
    config = config or SolverConfig()
    if basis.structure != StructureType.DENSE:
        raise InvalidArgumentError(f"fit_dense needs a dense basis, but got {basis.structure.value}")
    if config.init == InitType.WARM and warm_start is None:
        raise InvalidArgumentError("init=warm needs a warm_start map")
    samples = validate_inputs(samples, target)

    start = initial_map(samples, basis, config, warm_start if config.init == InitType.WARM else None)
    state = init_dense_state(samples, start, config)
    num, dim, size = state.num_samples, state.dim, state.size
    logger.info(f"Dense ADMM: N={num}, D={dim}, K={size}, rho={config.rho}, workers={config.workers}")

    diagnostics = AdmmDiagnostics()
    best_B, best_score = state.B.copy(), np.inf
    tic = time.perf_counter()
    with ShardExecutor(num, config.workers, config.strict_reduction) as executor:
        for k in range(1, config.max_iters + 1):
            update_B(state, executor)
            update_W(state, executor)
            update_Z(state, executor)
            update_p(state, target, config, executor)
            update_multipliers(state, executor)
            state.iteration = k

            primal, dual = residuals(state, executor)
            objective = dense_objective(state, target)
            diagnostics.primal_history.append(primal)
            diagnostics.dual_history.append(dual)
            diagnostics.objective_history.append(objective)
            diagnostics.p_failures += int(np.sum(~state.p_converged))
            if k % config.log_every == 0:
                logger.debug(f"iter {k}: objective={objective:.6g}, primal={primal:.3e}, dual={dual:.3e}")

            score = _score(primal, dual, config)
            if score < best_score and np.isfinite(objective):
                best_B, best_score, diagnostics.best_iteration = state.B.copy(), score, k
            if primal <= config.tol_primal and dual <= config.tol_dual:
                diagnostics.converged = True
                break

    diagnostics.iterations = state.iteration
    diagnostics.wall_time = time.perf_counter() - tic
    weights = state.B if diagnostics.converged else best_B
    if diagnostics.converged:
        diagnostics.best_iteration = state.iteration
    fitted = start.with_weights(weights)
    report = check_monotonicity(fitted, samples)
    if report.ok:
        fitted.monotone_validated = True
    else:
        logger.warning(f"Dense map is not monotone at {len(report.violations)} of {report.num_points} samples")
    phi_j = fitted.features_and_jacobian(samples)
    sign, logdet = np.linalg.slogdet(np.einsum("dk,nka->nda", fitted.weights, phi_j[1]))
    diagnostics.final_objective = sample_objective(
        target, phi_j[0] @ fitted.weights.T, np.where(sign > 0, logdet, np.nan)
    )
    fitted.metadata.update({"solver": "dense", **diagnostics.summary()})

    logger.info(
        f"Dense ADMM finished after {diagnostics.iterations} iterations, converged={diagnostics.converged}, "
        f"objective={diagnostics.final_objective:.6g}"
    )
    result = FitResult(fitted, diagnostics)
    if not diagnostics.converged:
        message = (
            f"ADMM did not reach tol_primal={config.tol_primal}, tol_dual={config.tol_dual} "
            f"in {config.max_iters} iterations; returning iterate {diagnostics.best_iteration}"
        )
        if config.raise_on_nonconvergence:
            raise NonConvergence(message, result)
        logger.warning(message)
    return result
