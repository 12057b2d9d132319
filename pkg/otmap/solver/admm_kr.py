r"""Consensus ADMM for one transport-cost-regularized KR stage.

A stage minimizes

.. math::
    \frac{1}{N}\sum_i \theta\|B\Phi_i - X_i\|^2 - \log q(B\Phi_i) - \sum_d \log \partial_d S^d(X_i)

over lower-triangular B. Besides W_i and p_i every sample carries, per output
dimension d, a vector copy :math:`Y_i^d = B\Phi_i^d` (multiplier lambda) and a
positive scalar :math:`Z_i^d = (Y_i^d)_d` (multiplier beta), so the log-barrier
reduces to scalar quadratic roots and no eigendecomposition is needed.

Arrays are indexed by sample first: ``Y[i, d]`` is :math:`Y_i^d` and
``phi_d[i, d]`` is :math:`\Phi_i^d`, the partial derivative of the basis along x_d.
The B-update solves the reduced normal equations of every output row on its
first K_d columns, which leaves exact structural zeros.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from otmap.density import TargetDensity
from otmap.map import TransportMap
from otmap.utils import InitType, InvalidArgumentError, NonConvergence, PUpdateType, get_logger

from .admm_dense import FitResult, _factor, initial_map, sample_objective, validate_inputs
from .config import AdmmDiagnostics, BasisSpec, SolverConfig
from .p_update import solve_prox
from .parallel import ShardExecutor

__all__ = [
    "KrAdmmState",
    "init_kr_state",
    "update_B_kr",
    "update_W_kr",
    "update_Z_d",
    "update_Y_d",
    "update_p_kr",
    "update_multipliers_kr",
    "residuals_kr",
    "kr_objective",
    "fit_kr_stage",
]

logger = get_logger()


@dataclass
class KrAdmmState:
    """Iterate of the KR stage solver.

    Attributes:
        samples (np.ndarray): X_i in shape (N, D).
        phi (np.ndarray): Phi_i in shape (N, K).
        phi_d (np.ndarray): Phi_i^d in shape (N, D, K).
        row_sizes (Tuple[int, ...]): K_1..K_D.
        rho (float): Penalty.
        theta (float): Transport-cost weight.
        B (np.ndarray): Consensus weights in shape (D, K), KR zeros exact.
        W (np.ndarray): Copies W_i in shape (N, D, K).
        p (np.ndarray): Copies of B Phi_i in shape (N, D).
        Zd (np.ndarray): Positive scalars Z_i^d in shape (N, D).
        Y (np.ndarray): Copies Y_i^d of B Phi_i^d in shape (N, D, D).
        gamma (np.ndarray): Multipliers of p in shape (N, D).
        alpha (np.ndarray): Multipliers of W in shape (N, D, K).
        lam (np.ndarray): Multipliers of Y in shape (N, D, D).
        beta (np.ndarray): Multipliers of Z in shape (N, D).
        static (np.ndarray): L = rho I + (1/N) sum((rho + 2 theta) Phi Phi^T + rho sum_d Phi^d Phi^dT).
        B_prev (np.ndarray): B of the previous iteration.
        p_converged (np.ndarray): Per-sample flag of the last p-update.
        iteration (int): Completed iterations.
    """

    samples: np.ndarray
    phi: np.ndarray
    phi_d: np.ndarray
    row_sizes: Tuple[int, ...]
    rho: float
    theta: float
    B: np.ndarray
    W: np.ndarray
    p: np.ndarray
    Zd: np.ndarray
    Y: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray
    lam: np.ndarray
    beta: np.ndarray
    static: np.ndarray
    B_prev: np.ndarray
    p_converged: np.ndarray
    iteration: int = 0
    _row_factors: Dict[int, tuple] = field(default_factory=dict, repr=False)

    @property
    def num_samples(self) -> int:
        return self.phi.shape[0]

    @property
    def dim(self) -> int:
        return self.B.shape[0]

    @property
    def size(self) -> int:
        return self.B.shape[1]

    def row_factor(self, k_d: int) -> tuple:
        """Cholesky factor of the leading K_d x K_d block of L, cached per distinct K_d."""
        if k_d not in self._row_factors:
            self._row_factors[k_d] = _factor(self.static[:k_d, :k_d])
        return self._row_factors[k_d]

    def structural_mask(self) -> np.ndarray:
        mask = np.zeros((self.dim, self.size), dtype=bool)
        for d, k_d in enumerate(self.row_sizes):
            mask[d, :k_d] = True
        return mask


def init_kr_state(samples: np.ndarray, start: TransportMap, config: SolverConfig, theta: float) -> KrAdmmState:
    """State with B = W_i = start.weights, Y_i^d = B Phi_i^d, Z_i^d its floored diagonal, zero multipliers."""
    if not start.is_triangular:
        raise InvalidArgumentError(f"KR stage needs a KR or KRSV basis, but got {start.structure.value}")
    phi, jac = start.features_and_jacobian(samples)
    phi_d = np.swapaxes(jac, 1, 2)
    num, size = phi.shape
    dim = start.dim
    rho = config.rho

    rows = phi_d.reshape(-1, size)
    static = rho * np.eye(size) + ((rho + 2.0 * theta) * (phi.T @ phi) + rho * (rows.T @ rows)) / num
    B = np.array(start.weights)
    Y = np.matmul(phi_d, B.T)
    state = KrAdmmState(
        samples=samples,
        phi=phi,
        phi_d=phi_d,
        row_sizes=tuple(start.basis.row_sizes),
        rho=rho,
        theta=theta,
        B=B,
        W=np.broadcast_to(B, (num, dim, size)).copy(),
        p=phi @ B.T,
        Zd=np.maximum(np.diagonal(Y, axis1=1, axis2=2), config.min_eig_init).copy(),
        Y=Y,
        gamma=np.zeros((num, dim)),
        alpha=np.zeros((num, dim, size)),
        lam=np.zeros((num, dim, dim)),
        beta=np.zeros((num, dim)),
        static=static,
        B_prev=B.copy(),
        p_converged=np.ones(num, dtype=bool),
    )
    state.row_factor(size)
    return state


def _serial(state: KrAdmmState) -> ShardExecutor:
    return ShardExecutor(state.num_samples, 1)


def kr_consensus_rhs(state: KrAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """Right-hand side of the B-update.

    M = (1/N) sum[rho W_i + alpha_i + (rho p_i + 2 theta X_i + gamma_i) Phi_i^T + sum_d (rho Y_i^d + lam_i^d) Phi_i^dT].
    """
    executor = executor or _serial(state)
    rho, theta = state.rho, state.theta

    def terms(sl: slice) -> np.ndarray:
        rp = rho * state.p[sl] + 2.0 * theta * state.samples[sl] + state.gamma[sl]
        ry = rho * state.Y[sl] + state.lam[sl]
        return (
            rho * state.W[sl]
            + state.alpha[sl]
            + rp[:, :, None] * state.phi[sl][:, None, :]
            + np.matmul(np.swapaxes(ry, 1, 2), state.phi_d[sl])
        )

    return executor.sum(terms) / state.num_samples


def update_B_kr(
    state: KrAdmmState, executor: Optional[ShardExecutor] = None, structured: bool = True
) -> np.ndarray:
    """Minimize the B-block of the augmented Lagrangian.

    Args:
        state (KrAdmmState): Current iterate, updated in place.
        executor (Optional[ShardExecutor]): Shard executor of the reduction.
        structured (bool): Solve each row on its first K_d columns (exact KR zeros).
            False returns the unconstrained stationary point M L^{-1} without storing it.

    Returns:
        np.ndarray: New B in shape (D, K).
    """
    M = kr_consensus_rhs(state, executor)
    if not structured:
        return scipy.linalg.cho_solve(state.row_factor(state.size), M.T).T

    B = np.zeros_like(state.B)
    for d, k_d in enumerate(state.row_sizes):
        B[d, :k_d] = scipy.linalg.cho_solve(state.row_factor(k_d), M[d, :k_d])
    state.B_prev = state.B
    state.B = B
    return B


def update_W_kr(state: KrAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """W_i = B - alpha_i / rho, identical to the dense update."""
    executor = executor or _serial(state)

    def step(sl: slice) -> None:
        state.W[sl] = state.B - state.alpha[sl] / state.rho

    executor.run(step)
    return state.W


def z_quadratic_root(y: np.ndarray, beta: np.ndarray, rho: float) -> np.ndarray:
    """Positive root of rho z^2 + (beta - rho y) z - 1 = 0, stable for either sign of rho y - beta."""
    b = rho * y - beta
    root = np.sqrt(b**2 + 4.0 * rho)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(b >= 0, (b + root) / (2.0 * rho), 2.0 / (root - b))


def update_Z_d(state: KrAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """Z_i^d = (rho y - beta + sqrt((rho y - beta)^2 + 4 rho)) / (2 rho) with y = (Y_i^d)_d."""
    executor = executor or _serial(state)

    def step(sl: slice) -> None:
        y = np.diagonal(state.Y[sl], axis1=1, axis2=2)
        state.Zd[sl] = z_quadratic_root(y, state.beta[sl], state.rho)

    executor.run(step)
    return state.Zd


def update_Y_d(state: KrAdmmState, executor: Optional[ShardExecutor] = None) -> np.ndarray:
    """Stationary point of the Y-block.

    With r = rho Z e_d + rho B Phi^d + beta e_d - lam^d the update is Y^d = r / rho,
    except for entry d which is r_d / (2 rho); that is r (I - e_d e_d^T / 2) / rho.
    """
    executor = executor or _serial(state)
    rho = state.rho
    diag = np.arange(state.dim)

    def step(sl: slice) -> None:
        rhs = rho * np.matmul(state.phi_d[sl], state.B.T) - state.lam[sl]
        rhs[:, diag, diag] += rho * state.Zd[sl] + state.beta[sl]
        Y = rhs / rho
        Y[:, diag, diag] *= 0.5
        state.Y[sl] = Y

    executor.run(step)
    return state.Y


def update_p_kr(
    state: KrAdmmState,
    target: TargetDensity,
    config: Optional[SolverConfig] = None,
    executor: Optional[ShardExecutor] = None,
) -> np.ndarray:
    """Same proximal step as the dense solver."""
    config = config or SolverConfig(rho=state.rho, workers=1)
    executor = executor or _serial(state)

    def step(sl: slice) -> None:
        p, converged = solve_prox(
            target,
            state.phi[sl] @ state.B.T,
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


def update_multipliers_kr(
    state: KrAdmmState, executor: Optional[ShardExecutor] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """gamma += rho (p - B Phi), alpha += rho (W - B), lam^d += rho (Y^d - B Phi^d), beta^d += rho (Z^d - Y^d_d)."""
    executor = executor or _serial(state)
    rho = state.rho

    def step(sl: slice) -> None:
        state.gamma[sl] += rho * (state.p[sl] - state.phi[sl] @ state.B.T)
        state.alpha[sl] += rho * (state.W[sl] - state.B)
        state.lam[sl] += rho * (state.Y[sl] - np.matmul(state.phi_d[sl], state.B.T))
        state.beta[sl] += rho * (state.Zd[sl] - np.diagonal(state.Y[sl], axis1=1, axis2=2))

    executor.run(step)
    return state.gamma, state.alpha, state.lam, state.beta


def residuals_kr(state: KrAdmmState, executor: Optional[ShardExecutor] = None) -> Tuple[float, float]:
    """RMS primal residual over the p, W, Y and Z constraints and rho * RMS change of B."""
    executor = executor or _serial(state)
    num, dim, size = state.num_samples, state.dim, state.size

    def squares(sl: slice) -> np.ndarray:
        rp = state.p[sl] - state.phi[sl] @ state.B.T
        rw = state.W[sl] - state.B
        ry = state.Y[sl] - np.matmul(state.phi_d[sl], state.B.T)
        rz = state.Zd[sl] - np.diagonal(state.Y[sl], axis1=1, axis2=2)
        return np.stack(
            [np.sum(rp**2, axis=1), np.sum(rw**2, axis=(1, 2)), np.sum(ry**2, axis=(1, 2)), np.sum(rz**2, axis=1)],
            axis=1,
        )

    sums = executor.sum(squares)
    primal = max(
        np.sqrt(sums[0] / (num * dim)),
        np.sqrt(sums[1] / (num * dim * size)),
        np.sqrt(sums[2] / (num * dim * dim)),
        np.sqrt(sums[3] / (num * dim)),
    )
    dual = state.rho * np.sqrt(np.mean((state.B - state.B_prev) ** 2))
    return float(primal), float(dual)


def kr_objective(state: KrAdmmState, target: TargetDensity) -> Tuple[float, float]:
    """KL part (1/N) sum[-log q(B Phi_i) - sum_d log d_d S^d] and transport part theta (1/N) sum |B Phi_i - X_i|^2.

    The KL part is NaN when a diagonal partial is not positive.
    """
    pushed = state.phi @ state.B.T
    partials = np.einsum("ndk,dk->nd", state.phi_d, state.B)
    with np.errstate(divide="ignore", invalid="ignore"):
        logdet = np.where(np.all(partials > 0, axis=1), np.sum(np.log(np.abs(partials)), axis=1), np.nan)
    transport = state.theta * float(np.mean(np.sum((pushed - state.samples) ** 2, axis=1)))
    return sample_objective(target, pushed, logdet), transport


def fit_kr_stage(
    samples: np.ndarray,
    target: TargetDensity,
    basis: Optional[BasisSpec] = None,
    theta: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    warm_start: Optional[TransportMap] = None,
) -> FitResult:
    """Fit one KR or KRSV stage of the transport-cost-regularized objective.

    Args:
        samples (np.ndarray): Stage inputs X_i in shape (N, D).
        target (TargetDensity): Log-concave target of dimension D.
        basis (Optional[BasisSpec]): KR or KRSV basis. Defaults to KR of order 1.
        theta (Optional[float]): Transport-cost weight >= 0. Defaults to `config.theta`.
        config (Optional[SolverConfig]): Solver options.
        warm_start (Optional[TransportMap]): Starting map when `config.init` is WARM.

    Returns:
        FitResult: Stage map (theta recorded in its metadata) and diagnostics.

    Raises:
        InvalidArgumentError: On inconsistent input or a dense basis.
        NonConvergence: Only with `config.raise_on_nonconvergence`.
    """
    basis = basis or BasisSpec(structure="kr")
    config = config or SolverConfig()
    theta = config.theta if theta is None else float(theta)
    if not basis.structure.is_triangular:
        raise InvalidArgumentError(f"fit_kr_stage needs a KR or KRSV basis, but got {basis.structure.value}")
    if theta < 0:
        raise InvalidArgumentError(f"theta must be non-negative, but got {theta}")
    if config.init == InitType.WARM and warm_start is None:
        raise InvalidArgumentError("init=warm needs a warm_start map")
    samples = validate_inputs(samples, target)

    start = initial_map(samples, basis, config, warm_start if config.init == InitType.WARM else None)
    state = init_kr_state(samples, start, config, theta)
    num, dim, size = state.num_samples, state.dim, state.size
    logger.info(
        f"KR ADMM ({basis.structure.value}): N={num}, D={dim}, K={size}, rho={config.rho}, theta={theta}, "
        f"workers={config.workers}"
    )

    diagnostics = AdmmDiagnostics()
    best_B, best_score = state.B.copy(), np.inf
    tic = time.perf_counter()
    with ShardExecutor(num, config.workers, config.strict_reduction) as executor:
        for k in range(1, config.max_iters + 1):
            update_B_kr(state, executor)
            update_W_kr(state, executor)
            update_Z_d(state, executor)
            update_Y_d(state, executor)
            update_p_kr(state, target, config, executor)
            update_multipliers_kr(state, executor)
            state.iteration = k

            primal, dual = residuals_kr(state, executor)
            objective, transport = kr_objective(state, target)
            diagnostics.primal_history.append(primal)
            diagnostics.dual_history.append(dual)
            diagnostics.objective_history.append(objective)
            diagnostics.transport_history.append(transport)
            diagnostics.p_failures += int(np.sum(~state.p_converged))
            if k % config.log_every == 0:
                logger.debug(
                    f"iter {k}: objective={objective:.6g}, transport={transport:.3g}, "
                    f"primal={primal:.3e}, dual={dual:.3e}"
                )

            score = max(primal / config.tol_primal, dual / config.tol_dual)
            if score < best_score and np.isfinite(objective):
                best_B, best_score, diagnostics.best_iteration = state.B.copy(), score, k
            if primal <= config.tol_primal and dual <= config.tol_dual:
                diagnostics.converged = True
                break

    diagnostics.iterations = state.iteration
    diagnostics.wall_time = time.perf_counter() - tic
    if diagnostics.converged:
        weights, diagnostics.best_iteration = state.B, state.iteration
    else:
        weights = best_B
    state.B = weights
    diagnostics.final_objective = kr_objective(state, target)[0]
    fitted = start.with_weights(weights)
    fitted.metadata.update({"solver": "kr", "theta": theta, **diagnostics.summary()})

    logger.info(
        f"KR ADMM finished after {diagnostics.iterations} iterations, converged={diagnostics.converged}, "
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
