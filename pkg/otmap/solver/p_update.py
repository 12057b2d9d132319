r"""Proximal step of the target density.

Every sample solves

.. math::
    p_i = \arg\min_p -\log q(p) + \frac{\rho}{2}\|v_i - p\|^2 + \gamma_i^T (p - v_i),

with :math:`v_i = B\Phi_i`. Targets with a closed-form proximal operator use it;
otherwise a damped Newton method with Armijo backtracking runs on the smoothed
log-density, vectorized over samples, or L-BFGS-B when no Hessian is available.
"""
from typing import Tuple

import numpy as np
from scipy.optimize import minimize

from otmap.density import TargetDensity
from otmap.utils import PUpdateType

__all__ = ["prox_objective", "newton_prox", "lbfgs_prox", "solve_prox"]

ARMIJO_C: float = 1e-4
MAX_BACKTRACK: int = 60


def prox_objective(target: TargetDensity, p: np.ndarray, v: np.ndarray, gamma: np.ndarray, rho: float) -> np.ndarray:
    """Per-sample objective with the smoothed log-density, shape (n,)."""
    return (
        -target.smooth_log_q(p)
        + 0.5 * rho * np.sum((v - p) ** 2, axis=-1)
        + np.sum(gamma * (p - v), axis=-1)
    )


def _gradient(target: TargetDensity, p: np.ndarray, v: np.ndarray, gamma: np.ndarray, rho: float) -> np.ndarray:
    return -target.smooth_grad_log_q(p) + rho * (p - v) + gamma


def newton_prox(
    target: TargetDensity,
    v: np.ndarray,
    gamma: np.ndarray,
    rho: float,
    p0: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """Damped Newton on every row, warm-started at `p0`.

    A row stops when |grad| <= tol * max(1, |rho v - gamma|) or when backtracking
    cannot decrease its objective any more.

    Returns:
        p (np.ndarray): Solutions in shape (n, D); rows that failed keep `p0`.
        converged (np.ndarray): Boolean mask in shape (n,).
    """
    p = np.array(p0, dtype=float)
    n, dim = p.shape
    scale = np.maximum(1.0, np.linalg.norm(rho * v - gamma, axis=-1))
    converged = np.zeros(n, dtype=bool)
    stalled = np.zeros(n, dtype=bool)
    active = np.arange(n)

    for _ in range(max_iter + 1):
        pa, va, ga = p[active], v[active], gamma[active]
        grad = _gradient(target, pa, va, ga, rho)
        done = np.linalg.norm(grad, axis=-1) <= tol * scale[active]
        converged[active[done]] = True
        keep = ~done
        active, pa, va, ga, grad = active[keep], pa[keep], va[keep], ga[keep], grad[keep]
        if active.size == 0:
            break

        hess = -target.hess_log_q(pa) + rho * np.eye(dim)
        direction = -np.linalg.solve(hess, grad[..., None])[..., 0]
        slope = np.sum(grad * direction, axis=-1)
        f0 = prox_objective(target, pa, va, ga, rho)

        step = np.ones(active.size)
        accepted = np.zeros(active.size, dtype=bool)
        for _ in range(MAX_BACKTRACK):
            trial = pa + step[:, None] * direction
            ok = prox_objective(target, trial, va, ga, rho) <= f0 + ARMIJO_C * step * slope
            newly = ok & ~accepted
            p[active[newly]] = trial[newly]
            accepted |= ok
            if accepted.all():
                break
            step = np.where(accepted, step, 0.5 * step)

        # no decrease possible at machine precision: the row sits at its minimizer
        stalled_now = ~accepted
        stalled[active[stalled_now]] = True
        converged[active[stalled_now]] = (
            np.linalg.norm(grad[stalled_now], axis=-1) <= np.sqrt(tol) * scale[active[stalled_now]]
        )
        active = active[accepted]
        if active.size == 0:
            break

    failed = ~converged
    p[failed] = p0[failed]
    return p, converged


def lbfgs_prox(
    target: TargetDensity,
    v: np.ndarray,
    gamma: np.ndarray,
    rho: float,
    p0: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row L-BFGS-B for targets without a Hessian."""
    p = np.array(p0, dtype=float)
    converged = np.zeros(p.shape[0], dtype=bool)
    for i in range(p.shape[0]):

        def fun(x: np.ndarray, i: int = i):
            x = x[None, :]
            value = prox_objective(target, x, v[i : i + 1], gamma[i : i + 1], rho)[0]
            return value, _gradient(target, x, v[i : i + 1], gamma[i : i + 1], rho)[0]

        result = minimize(fun, p0[i], jac=True, method="L-BFGS-B", options={"gtol": tol, "maxiter": 10 * max_iter})
        if result.success and np.all(np.isfinite(result.x)):
            p[i] = result.x
            converged[i] = True
    return p, converged


def solve_prox(
    target: TargetDensity,
    v: np.ndarray,
    gamma: np.ndarray,
    rho: float,
    p0: np.ndarray,
    method: PUpdateType = PUpdateType.NEWTON,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """Closed form when the target has one, else Newton or L-BFGS-B.

    Returns:
        p (np.ndarray): Solutions in shape (n, D).
        converged (np.ndarray): Boolean mask in shape (n,).
    """
    closed = target.proximal(v, gamma, rho)
    if closed is not None:
        return np.asarray(closed, dtype=float), np.ones(v.shape[0], dtype=bool)
    if method == PUpdateType.NEWTON and target.has_hessian:
        return newton_prox(target, v, gamma, rho, p0, tol, max_iter)
    return lbfgs_prox(target, v, gamma, rho, p0, tol, max_iter)
