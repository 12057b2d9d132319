from __future__ import annotations

from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from otmap.basis import MultiIndexSet, UnivariateFamily, eval_basis, eval_basis_and_jacobian
from otmap.utils import InvalidArgumentError, NonFiniteInputError, NonMonotoneAtPoint, StructureType

__all__ = ["TransportMap"]


class TransportMap:
    """Polynomial transport map S(x) = W Phi((x - shift) / scale).

    Attributes:
        basis (MultiIndexSet): Basis terms; the structure tag is inherited from it.
        family (UnivariateFamily): Univariate polynomial family.
        weights (np.ndarray): Read-only weight matrix W in shape (D, K).
        shift (np.ndarray): Input shift m in shape (D,).
        scale (np.ndarray): Positive input scale s in shape (D,).
        metadata (Dict[str, Any]): Free-form fit metadata such as theta or diagnostics.
        monotone_validated (bool): Whether the map passed a monotonicity check on its validation points.
    """

    def __init__(
        self,
        basis: MultiIndexSet,
        weights: np.ndarray,
        family: Union[UnivariateFamily, str] = "hermite",
        shift: Optional[np.ndarray] = None,
        scale: Optional[np.ndarray] = None,
        metadata: Optional[Dict[str, Any]] = None,
        monotone_validated: bool = False,
    ) -> None:
        weights = np.array(weights, dtype=float)
        if weights.ndim == 1 and basis.dim == 1:
            weights = weights[None, :]
        if weights.shape != (basis.dim, basis.size):
            raise InvalidArgumentError(f"Weights must have shape {(basis.dim, basis.size)}, but got {weights.shape}")
        if not np.all(np.isfinite(weights)):
            raise NonFiniteInputError("Weights must be finite")
        violations = np.argwhere((weights != 0.0) & ~basis.structural_mask())
        if violations.size > 0:
            d, k = violations[0]
            raise InvalidArgumentError(
                f"{basis.structure.value} map has non-zero weight W[{d}, {k}] beyond its row size {basis.row_sizes[d]}"
            )

        self.basis: MultiIndexSet = basis
        self.family: UnivariateFamily = UnivariateFamily.from_value(family)
        weights.setflags(write=False)
        self.weights: np.ndarray = weights
        self.shift: np.ndarray = self._affine(shift, 0.0, "shift")
        self.scale: np.ndarray = self._affine(scale, 1.0, "scale")
        if np.any(self.scale <= 0):
            raise InvalidArgumentError(f"Scale must be positive, but got {self.scale.tolist()}")
        self.metadata: Dict[str, Any] = dict(metadata or {})
        self.monotone_validated: bool = monotone_validated

    def _affine(self, value: Optional[np.ndarray], default: float, name: str) -> np.ndarray:
        if value is None:
            out = np.full(self.dim, default)
        else:
            out = np.array(value, dtype=float).reshape(-1)
            if out.shape != (self.dim,):
                raise InvalidArgumentError(f"{name} must have shape ({self.dim},), but got {out.shape}")
        out.setflags(write=False)
        return out

    def __repr__(self) -> str:
        return (
            f"TransportMap(structure={self.structure.value}, family={self.family.kind.value}, "
            f"D={self.dim}, O={self.order}, K={self.size})"
        )

    @property
    def structure(self) -> StructureType:
        return self.basis.structure

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def order(self) -> int:
        return self.basis.order

    @property
    def size(self) -> int:
        return self.basis.size

    @property
    def is_triangular(self) -> bool:
        return self.structure.is_triangular

    @property
    def is_standardized(self) -> bool:
        return bool(np.any(self.shift != 0.0) or np.any(self.scale != 1.0))

    @classmethod
    def identity(
        cls,
        basis: MultiIndexSet,
        family: Union[UnivariateFamily, str] = "hermite",
        shift: Optional[np.ndarray] = None,
        scale: Optional[np.ndarray] = None,
    ) -> TransportMap:
        """Map with S(x) = x.

        With a shift m and scale s the constant term of row d carries m_d and its
        degree-1 own-coordinate term carries s_d, so that m_d + s_d (x_d - m_d) / s_d = x_d.

        Raises:
            InvalidArgumentError: When the basis has order 0.
        """
        if basis.order < 1:
            raise InvalidArgumentError("Identity map needs a basis of order >= 1")
        weights = np.zeros((basis.dim, basis.size))
        shift = np.zeros(basis.dim) if shift is None else np.asarray(shift, dtype=float)
        scale = np.ones(basis.dim) if scale is None else np.asarray(scale, dtype=float)
        constant = basis.position((0,) * basis.dim)
        for d in range(basis.dim):
            weights[d, constant] = shift[d]
            weights[d, basis.position(tuple(np.eye(basis.dim, dtype=int)[d]))] = scale[d]
        return cls(basis, weights, family, shift=shift, scale=scale)

    def with_weights(self, weights: np.ndarray, **kwargs: Any) -> TransportMap:
        """Copy of this map with new weights; keyword arguments override other fields."""
        fields = dict(
            family=self.family,
            shift=self.shift,
            scale=self.scale,
            metadata=self.metadata,
            monotone_validated=False,
        )
        fields.update(kwargs)
        return TransportMap(self.basis, weights, **fields)

    def _standardize(self, x: np.ndarray) -> Tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise InvalidArgumentError(f"Points have dimension {x.shape[-1]} but the map has D={self.dim}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteInputError("Map evaluation requires finite input")
        return (x - self.shift) / self.scale, single

    def features(self, x: np.ndarray) -> np.ndarray:
        """Phi at the standardized points, shape (N, K)."""
        z, _ = self._standardize(x)
        return eval_basis(self.basis, self.family, z)

    def features_and_jacobian(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Phi in shape (N, K) and its Jacobian with respect to x in shape (N, K, D)."""
        z, _ = self._standardize(x)
        phi, jac = eval_basis_and_jacobian(self.basis, self.family, z)
        return phi, jac / self.scale

    def forward_batch(self, xs: np.ndarray) -> np.ndarray:
        """S at every row of `xs` (N, D)."""
        return self.features(xs) @ self.weights.T

    def forward(self, x: np.ndarray) -> np.ndarray:
        """S(x) = W Phi(x).

        Raises:
            NonFiniteInputError: When x is not finite.
        """
        x = np.asarray(x, dtype=float)
        out = self.forward_batch(np.atleast_2d(x))
        return out[0] if x.ndim == 1 else out

    def jacobian_batch(self, xs: np.ndarray) -> np.ndarray:
        """J_S = W J_Phi at every row, shape (N, D, D)."""
        _, jac = self.features_and_jacobian(xs)
        return np.einsum("dk,nka->nda", self.weights, jac)

    def diagonal_partials_batch(self, xs: np.ndarray) -> np.ndarray:
        """d S^d / d x_d at every row, shape (N, D)."""
        _, jac = self.features_and_jacobian(xs)
        return np.einsum("dk,nkd->nd", self.weights, jac)

    def log_det_jacobian_batch(self, xs: np.ndarray) -> np.ndarray:
        """log det J_S at every row of `xs`.

        Triangular maps sum log d S^d / d x_d; dense maps take log det(W J_Phi).

        Raises:
            NonMonotoneAtPoint: At the first point where a diagonal partial (triangular)
                or the determinant (dense) is not positive.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        if self.is_triangular:
            partials = self.diagonal_partials_batch(xs)
            bad = np.argwhere(~(partials > 0))
            if bad.size > 0:
                n, d = bad[0]
                raise NonMonotoneAtPoint(xs[n], coord=int(d))
            return np.sum(np.log(partials), axis=1)

        sign, logdet = np.linalg.slogdet(self.jacobian_batch(xs))
        bad = np.flatnonzero(~(sign > 0))
        if bad.size > 0:
            raise NonMonotoneAtPoint(xs[bad[0]], det_sign=float(sign[bad[0]]))
        return logdet

    def log_det_jacobian(self, x: np.ndarray) -> float:
        """log det J_S(x) of a single point."""
        return float(self.log_det_jacobian_batch(np.asarray(x, dtype=float).reshape(1, -1))[0])
