"""Coordinate-by-coordinate inversion of triangular maps.

Row d of a KR map depends on x_1..x_d only and is increasing in x_d, so the
inverse is recovered one coordinate at a time: first a sign-changing bracket is
found by window doubling around the target value, then a Newton iteration
safeguarded by bisection converges inside the bracket.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from otmap.utils import (
    BracketNotFound,
    InvalidArgumentError,
    NoConvergence,
    NonFiniteInputError,
    UnsupportedOperation,
    get_logger,
)

from .transport import TransportMap

__all__ = ["RootFinderConfig", "invert", "invert_batch"]

logger = get_logger()


@dataclass(frozen=True)
class RootFinderConfig:
    """Options of the per-coordinate root search.

    Attributes:
        tol (float): Residual tolerance |S^d(x) - y_d|. Defaults to 1e-10.
        max_iter (int): Newton/bisection iterations per coordinate. Defaults to 200.
        max_bracket (float): Largest |x_d| the bracket may reach. Defaults to 1e6.
        initial_width (float): Initial half-width of the bracket. Defaults to 1.0.
    """

    tol: float = 1e-10
    max_iter: int = 200
    max_bracket: float = 1e6
    initial_width: float = 1.0

    def __post_init__(self) -> None:
        if not (self.tol > 0 and self.max_bracket > 0 and self.initial_width > 0):
            raise InvalidArgumentError("tol, max_bracket and initial_width must be positive")
        if self.max_iter < 1:
            raise InvalidArgumentError(f"max_iter must be >= 1, but got {self.max_iter}")


def _row(tmap: TransportMap, xs: np.ndarray, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """S^d and d S^d / d x_d at every row of `xs`."""
    phi, jac = tmap.features_and_jacobian(xs)
    w = tmap.weights[d]
    return phi @ w, jac[:, :, d] @ w


def _bracket(
    tmap: TransportMap, xs: np.ndarray, target: np.ndarray, d: int, config: RootFinderConfig
) -> Tuple[np.ndarray, np.ndarray]:
    """Sign-changing bracket [lo, hi] of S^d(., t) - target, widened by doubling."""
    center = target.copy()
    width_lo = np.full_like(center, config.initial_width)
    width_hi = np.full_like(center, config.initial_width)
    lo, hi = center - width_lo, center + width_hi

    trial = xs.copy()
    trial[:, d] = lo
    f_lo = _row(tmap, trial, d)[0] - target
    trial[:, d] = hi
    f_hi = _row(tmap, trial, d)[0] - target

    while True:
        move_lo = f_lo > 0
        move_hi = f_hi < 0
        if not (np.any(move_lo) or np.any(move_hi)):
            return lo, hi
        stuck = (move_lo & (np.abs(lo) > config.max_bracket)) | (move_hi & (np.abs(hi) > config.max_bracket))
        if np.any(stuck):
            n = int(np.flatnonzero(stuck)[0])
            raise BracketNotFound(
                f"No sign change for coordinate {d} within |x| <= {config.max_bracket} at y={target[n]}"
            )
        # f increasing in t: a positive lower end means the root lies further left
        idx = np.flatnonzero(move_lo)
        if idx.size:
            hi[idx], f_hi[idx] = lo[idx], f_lo[idx]
            width_lo[idx] *= 2.0
            lo[idx] = lo[idx] - width_lo[idx]
            trial = xs[idx].copy()
            trial[:, d] = lo[idx]
            f_lo[idx] = _row(tmap, trial, d)[0] - target[idx]
        idx = np.flatnonzero(move_hi)
        if idx.size:
            lo[idx], f_lo[idx] = hi[idx], f_hi[idx]
            width_hi[idx] *= 2.0
            hi[idx] = hi[idx] + width_hi[idx]
            trial = xs[idx].copy()
            trial[:, d] = hi[idx]
            f_hi[idx] = _row(tmap, trial, d)[0] - target[idx]


def _solve_coordinate(
    tmap: TransportMap, xs: np.ndarray, target: np.ndarray, d: int, config: RootFinderConfig
) -> np.ndarray:
    lo, hi = _bracket(tmap, xs, target, d, config)
    t = np.clip(target, lo, hi)
    active = np.arange(target.size)

    for _ in range(config.max_iter):
        trial = xs[active].copy()
        trial[:, d] = t[active]
        value, slope = _row(tmap, trial, d)
        f = value - target[active]

        done = np.abs(f) <= config.tol
        # bracket collapsed to float spacing
        collapsed = (hi[active] - lo[active]) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(t[active]))
        stalled = collapsed & ~done
        if np.any(stalled):
            i = int(np.flatnonzero(stalled)[0])
            raise NoConvergence(
                f"Root search for coordinate {d} stalled at y={target[active[i]]} "
                f"with residual {abs(f[i]):.3e} above tol={config.tol}"
            )
        below = f < 0
        lo[active[below]] = t[active[below]]
        hi[active[~below]] = t[active[~below]]

        with np.errstate(divide="ignore", invalid="ignore"):
            step = t[active] - f / slope
        inside = np.isfinite(step) & (slope > 0) & (step > lo[active]) & (step < hi[active])
        step = np.where(inside, step, 0.5 * (lo[active] + hi[active]))
        t[active] = np.where(done, t[active], step)

        active = active[~done]
        if active.size == 0:
            return t

    n = int(active[0])
    raise NoConvergence(
        f"Root search for coordinate {d} did not converge in {config.max_iter} iterations at y={target[n]}"
    )


def invert_batch(tmap: TransportMap, ys: np.ndarray, config: Optional[RootFinderConfig] = None) -> np.ndarray:
    """Solve S(x) = y for every row of `ys`.

    Args:
        tmap (TransportMap): KR or KRSV map, increasing in x_d along every row d.
        ys (np.ndarray): Targets in shape (N, D).
        config (Optional[RootFinderConfig]): Root search options.

    Returns:
        np.ndarray: Pre-images in shape (N, D) with |S(x) - y|_inf <= config.tol.

    Raises:
        UnsupportedOperation: For dense maps.
        BracketNotFound: When no bracket exists within config.max_bracket.
        NoConvergence: When the iteration cap is reached.
    """
    config = config or RootFinderConfig()
    if not tmap.is_triangular:
        raise UnsupportedOperation(f"Inversion requires a KR or KRSV map, but got {tmap.structure.value}")
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if ys.shape[1] != tmap.dim:
        raise InvalidArgumentError(f"Points have dimension {ys.shape[1]} but the map has D={tmap.dim}")
    if not np.all(np.isfinite(ys)):
        raise NonFiniteInputError("Inversion requires finite input")

    # trailing coordinates do not affect earlier rows; start them at the targets
    xs = ys.copy()
    for d in range(tmap.dim):
        xs[:, d] = _solve_coordinate(tmap, xs, ys[:, d], d, config)
    logger.debug(f"Inverted {ys.shape[0]} points through {tmap}")
    return xs


def invert(tmap: TransportMap, y: np.ndarray, config: Optional[RootFinderConfig] = None) -> np.ndarray:
    """Solve S(x) = y for a single point, see `invert_batch`."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        return invert_batch(tmap, y, config)
    return invert_batch(tmap, y[None, :], config)[0]
