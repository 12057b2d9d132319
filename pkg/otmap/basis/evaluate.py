r"""Evaluation of tensorized polynomial bases.

For an exponent vector :math:`j` the basis term is :math:`\Phi_j(x) = \prod_a \psi_{j_a}(x_a)`
and its Jacobian row is :math:`\partial_a \Phi_j(x) = \psi'_{j_a}(x_a) \prod_{b \neq a} \psi_{j_b}(x_b)`.

Every function accepts a single point in shape (D,) or a batch in shape (N, D).
"""
from typing import Tuple, Union

import numpy as np

from otmap.utils import InvalidArgumentError, NonFiniteInputError

from .family import UnivariateFamily
from .multi_index import MultiIndexSet

__all__ = ["eval_basis", "eval_basis_jacobian", "eval_basis_partial", "eval_basis_and_jacobian"]

FamilyLike = Union[UnivariateFamily, str]


def _univariate_tables(
    index_set: MultiIndexSet, family: FamilyLike, x: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, bool]:
    """Per-term, per-coordinate univariate values and derivatives in shape (N, K, D)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != index_set.dim:
        raise InvalidArgumentError(f"Points have dimension {x.shape[1]} but the basis has D={index_set.dim}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("Basis evaluation requires finite input")

    values, derivatives = UnivariateFamily.from_value(family).evaluate(x, index_set.order)
    coords = np.arange(index_set.dim)[None, :]
    # (N, D, O+1) -> (N, K, D)
    return values[:, coords, index_set.indices], derivatives[:, coords, index_set.indices], single


def _products_excluding(factors: np.ndarray) -> np.ndarray:
    """For every a, the product of factors[..., b] over b != a, without division."""
    ones = np.ones(factors.shape[:-1] + (1,))
    left = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return left * right


def eval_basis(index_set: MultiIndexSet, family: FamilyLike, x: np.ndarray) -> np.ndarray:
    """Basis vector Phi(x).

    Args:
        index_set (MultiIndexSet): Basis terms.
        family (FamilyLike): Univariate family.
        x (np.ndarray): Point (D,) or batch (N, D).

    Returns:
        np.ndarray: Shape (K,) or (N, K).

    Raises:
        NonFiniteInputError: When x contains NaN or inf.
    """
    values, _, single = _univariate_tables(index_set, family, x)
    phi = np.prod(values, axis=-1)
    return phi[0] if single else phi


def eval_basis_and_jacobian(
    index_set: MultiIndexSet, family: FamilyLike, x: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Phi(x) and J_Phi(x) from one pass over the univariate tables.

    Returns:
        phi (np.ndarray): Shape (K,) or (N, K).
        jacobian (np.ndarray): Shape (K, D) or (N, K, D).
    """
    values, derivatives, single = _univariate_tables(index_set, family, x)
    phi = np.prod(values, axis=-1)
    jacobian = derivatives * _products_excluding(values)
    if single:
        return phi[0], jacobian[0]
    return phi, jacobian


def eval_basis_jacobian(index_set: MultiIndexSet, family: FamilyLike, x: np.ndarray) -> np.ndarray:
    """Jacobian J_Phi(x) with entries (k, a) = d Phi_k / d x_a.

    Returns:
        np.ndarray: Shape (K, D) or (N, K, D).
    """
    return eval_basis_and_jacobian(index_set, family, x)[1]


def eval_basis_partial(index_set: MultiIndexSet, family: FamilyLike, x: np.ndarray, coord: int) -> np.ndarray:
    """Partial derivative of Phi with respect to one coordinate.

    Args:
        index_set (MultiIndexSet): Basis terms.
        family (FamilyLike): Univariate family.
        x (np.ndarray): Point (D,) or batch (N, D).
        coord (int): 0-based coordinate, 0 <= coord < D.

    Returns:
        np.ndarray: Shape (K,) or (N, K), equal to column `coord` of the Jacobian.

    Raises:
        InvalidArgumentError: When `coord` is out of range.
    """
    if not 0 <= coord < index_set.dim:
        raise InvalidArgumentError(f"Coordinate must be in [0, {index_set.dim}), but got {coord}")
    values, derivatives, single = _univariate_tables(index_set, family, x)
    partial = derivatives[..., coord] * _products_excluding(values)[..., coord]
    return partial[0] if single else partial
