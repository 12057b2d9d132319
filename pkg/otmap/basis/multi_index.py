r"""Multi-index sets of polynomial transport maps.

A multi-index set is an ordered list of K exponent vectors :math:`j \in \mathbb{N}^D`.
Each vector defines one basis term :math:`\Phi_j(x) = \prod_a \psi_{j_a}(x_a)`.

Indices are always ordered canonically: grouped by their KR block (the largest
coordinate they depend on, the all-zero index belonging to block 1), within a
block by total order, then lexicographically. With this ordering the first
:math:`K_d` terms depend only on :math:`x_1, \ldots, x_d`, which is what makes the
zero-embedding of a lower-triangular weight matrix work for every structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from otmap.utils import IndexSetTooLargeError, InvalidArgumentError, StructureType

__all__ = ["DEFAULT_MAX_TERMS", "MultiIndexSet", "build_multi_index_set", "count_terms"]

DEFAULT_MAX_TERMS: int = 10**6


@dataclass(frozen=True, eq=False)
class MultiIndexSet:
    """Ordered multi-index set.

    Attributes:
        structure (StructureType): DENSE, KR or KRSV.
        dim (int): Ambient dimension D.
        order (int): Maximum total order O.
        indices (np.ndarray): Exponent vectors in shape (K, D), read-only.
        row_sizes (Optional[Tuple[int, ...]]): K_1 <= ... <= K_D for KR/KRSV, None for DENSE.
    """

    structure: StructureType
    dim: int
    order: int
    indices: np.ndarray = field(repr=False)
    row_sizes: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        indices = np.array(self.indices, dtype=np.int64).reshape(-1, self.dim)
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @property
    def size(self) -> int:
        """Number of basis terms K."""
        return self.indices.shape[0]

    def __len__(self) -> int:
        return self.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiIndexSet):
            return NotImplemented
        return (
            self.structure == other.structure
            and self.dim == other.dim
            and self.order == other.order
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self) -> int:
        return hash((self.structure, self.dim, self.order))

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        """Number of leading terms depending only on x_1..x_d, for every d (any structure)."""
        blocks = block_of(self.indices)
        return tuple(int(np.sum(blocks <= d)) for d in range(1, self.dim + 1))

    def structural_mask(self) -> np.ndarray:
        """Boolean (D, K) mask of the weights allowed to be non-zero.

        For DENSE every weight is free; for KR/KRSV row d keeps its first K_d entries.
        """
        mask = np.ones((self.dim, self.size), dtype=bool)
        if self.row_sizes is not None:
            for d, k_d in enumerate(self.row_sizes):
                mask[d, k_d:] = False
        return mask

    def position(self, index: Union[Tuple[int, ...], List[int]]) -> int:
        """Position of an exponent vector in the ordered set.

        Raises:
            InvalidArgumentError: When the index is not in the set.
        """
        hits = np.flatnonzero(np.all(self.indices == np.asarray(index), axis=1))
        if hits.size == 0:
            raise InvalidArgumentError(f"Multi-index {tuple(index)} is not in the set")
        return int(hits[0])


def block_of(indices: np.ndarray) -> np.ndarray:
    """KR block of each exponent vector: 1-based position of its last non-zero entry, at least 1."""
    indices = np.atleast_2d(indices)
    nonzero = indices != 0
    dim = indices.shape[1]
    last = dim - np.argmax(nonzero[:, ::-1], axis=1)
    return np.where(nonzero.any(axis=1), last, 1)


def count_terms(structure: StructureType, dim: int, order: int) -> int:
    """Number of terms K of a set, without enumerating it."""
    structure = StructureType.from_value(structure)
    if structure == StructureType.KRSV:
        return dim * order + 1
    return comb(dim + order, order)


def _compositions(dim: int, total: int) -> Iterator[Tuple[int, ...]]:
    """Every exponent vector of length `dim` with sum exactly `total`."""
    if dim == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(dim - 1, total - first):
            yield (first,) + rest


def _block_indices(structure: StructureType, dim: int, order: int, d: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of block d (1-based), already in canonical order."""
    pad = (0,) * (dim - d)
    block: List[Tuple[int, ...]] = [(0,) * dim] if d == 1 else []
    for total in range(1, order + 1):
        if structure == StructureType.KRSV or d == 1:
            block.append((0,) * (d - 1) + (total,) + pad)
            continue
        # j_d >= 1 keeps the term out of earlier blocks.
        level = [
            head + (j_d,) + pad for j_d in range(1, total + 1) for head in _compositions(d - 1, total - j_d)
        ]
        block.extend(sorted(level))
    return block


def build_multi_index_set(
    structure: Union[StructureType, str],
    dim: int,
    order: int,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> MultiIndexSet:
    """Build a multi-index set in canonical KR ordering.

    Args:
        structure (Union[StructureType, str]): DENSE, KR or KRSV.
        dim (int): Ambient dimension D >= 1.
        order (int): Maximum total order O >= 0.
        max_terms (int): Cap on K. Defaults to 10**6.

    Returns:
        MultiIndexSet: The ordered set.

    Raises:
        InvalidArgumentError: When D < 1 or O < 0.
        IndexSetTooLargeError: When K exceeds `max_terms`.

    Examples:
        >>> build_multi_index_set("kr", 3, 3).row_sizes
        (4, 10, 20)
    """
    structure = StructureType.from_value(structure)
    if int(dim) != dim or dim < 1:
        raise InvalidArgumentError(f"Dimension must be a positive integer, but got {dim}")
    if int(order) != order or order < 0:
        raise InvalidArgumentError(f"Order must be a non-negative integer, but got {order}")
    dim, order = int(dim), int(order)

    size = count_terms(structure, dim, order)
    if size > max_terms:
        raise IndexSetTooLargeError(structure.value, dim, order, size, max_terms)

    indices: List[Tuple[int, ...]] = []
    row_sizes: List[int] = []
    for d in range(1, dim + 1):
        indices.extend(_block_indices(structure, dim, order, d))
        row_sizes.append(len(indices))

    return MultiIndexSet(
        structure=structure,
        dim=dim,
        order=order,
        indices=np.asarray(indices, dtype=np.int64).reshape(len(indices), dim),
        row_sizes=tuple(row_sizes) if structure.is_triangular else None,
    )
