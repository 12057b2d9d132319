"""Pointwise monotonicity checks and the monotone projection of KR maps.

Monotonicity is validated at supplied points only; nothing here certifies it globally.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import minimize

from otmap.utils import InvalidArgumentError, ProjectionError, UnsupportedOperation, get_logger

from .transport import TransportMap

__all__ = ["MonotonicityViolation", "MonotonicityReport", "check_monotonicity", "project_monotone"]

logger = get_logger()

DEFAULT_MARGIN: float = 1e-3


@dataclass(frozen=True)
class MonotonicityViolation:
    """One failing point.

    Attributes:
        point (np.ndarray): Offending point.
        coord (Optional[int]): 0-based coordinate with d S^d / d x_d <= 0 (triangular maps).
        det_sign (Optional[float]): Sign of det J_S (dense maps).
        value (float): Offending partial derivative or determinant sign.
    """

    point: np.ndarray
    coord: Optional[int] = None
    det_sign: Optional[float] = None
    value: float = 0.0


@dataclass
class MonotonicityReport:
    violations: List[MonotonicityViolation] = field(default_factory=list)
    num_points: int = 0

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0

    def __bool__(self) -> bool:
        return self.ok


def check_monotonicity(tmap: TransportMap, points: np.ndarray) -> MonotonicityReport:
    """Test positivity of the Jacobian at every point.

    Triangular maps test every diagonal partial; dense maps test the sign of det(W J_Phi).

    Args:
        tmap (TransportMap): Map to check.
        points (np.ndarray): Points in shape (N, D).

    Returns:
        MonotonicityReport: `ok` is True when no violation was found.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    report = MonotonicityReport(num_points=points.shape[0])
    if points.shape[0] == 0:
        return report

    if tmap.is_triangular:
        partials = tmap.diagonal_partials_batch(points)
        for n, d in np.argwhere(~(partials > 0)):
            report.violations.append(MonotonicityViolation(points[n], coord=int(d), value=float(partials[n, d])))
    else:
        sign, _ = np.linalg.slogdet(tmap.jacobian_batch(points))
        for n in np.flatnonzero(~(sign > 0)):
            report.violations.append(MonotonicityViolation(points[n], det_sign=float(sign[n]), value=float(sign[n])))
    return report


def _project_row(
    phi: np.ndarray, partial: np.ndarray, target: np.ndarray, w0: np.ndarray, margin: float, ridge: float
) -> np.ndarray:
    """argmin |phi w - target|^2 / N + ridge |w - w0|^2  s.t.  partial w >= margin."""
    num = phi.shape[0]
    gram = phi.T @ phi / num + ridge * np.eye(w0.size)
    linear = phi.T @ target / num + ridge * w0

    def objective(w: np.ndarray):
        return 0.5 * w @ gram @ w - linear @ w, gram @ w - linear

    result = minimize(
        objective,
        w0,
        jac=True,
        method="SLSQP",
        constraints=[{"type": "ineq", "fun": lambda w: partial @ w - margin, "jac": lambda w: partial}],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    if not result.success:
        raise ProjectionError(f"Monotone projection failed: {result.message}")
    return result.x


def project_monotone(
    tmap: TransportMap, points: np.ndarray, margin: float = DEFAULT_MARGIN, ridge: float = 1e-10
) -> TransportMap:
    """Least-squares projection onto maps with d S^d / d x_d >= margin at `points`.

    Each output row d solves a convex QP over its first K_d weights. A map that
    already satisfies the constraints is returned unchanged.

    Args:
        tmap (TransportMap): KR or KRSV map.
        points (np.ndarray): Constraint points in shape (N, D).
        margin (float): Lower bound epsilon_m > 0 on the diagonal partials. Defaults to 1e-3.
        ridge (float): Weight of the proximity term to the input weights, which makes
            the QP strictly convex when N < K_d.

    Returns:
        TransportMap: Projected map, flagged `monotone_validated` when it passes the check.

    Raises:
        UnsupportedOperation: For dense maps.
        ProjectionError: When the QP solver fails or returns an infeasible point.
    """
    if not tmap.is_triangular:
        raise UnsupportedOperation(f"Monotone projection requires a KR or KRSV map, but got {tmap.structure.value}")
    if not margin > 0:
        raise InvalidArgumentError(f"Margin must be positive, but got {margin}")
    points = np.atleast_2d(np.asarray(points, dtype=float))

    phi, jac = tmap.features_and_jacobian(points)
    partials = np.einsum("dk,nkd->nd", tmap.weights, jac)
    if np.all(partials >= margin):
        return tmap

    values = phi @ tmap.weights.T
    weights = np.array(tmap.weights)
    for d, k_d in enumerate(tmap.basis.row_sizes):
        if np.all(partials[:, d] >= margin):
            continue
        constraint = jac[:, :k_d, d]
        row = _project_row(phi[:, :k_d], constraint, values[:, d], weights[d, :k_d], margin, ridge)
        if np.any(constraint @ row < margin - 1e-8):
            raise ProjectionError(f"Monotone projection of row {d} is infeasible at the supplied points")
        weights[d, :k_d] = row
        logger.debug(f"Projected row {d}: min partial {partials[:, d].min():.3g} -> {(constraint @ row).min():.3g}")

    projected = tmap.with_weights(weights)
    projected.monotone_validated = check_monotonicity(projected, points).ok
    return projected
