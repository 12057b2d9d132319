from __future__ import annotations

from enum import Enum
from typing import Union


class _StrEnum(Enum):
    @classmethod
    def from_value(cls, value: Union[str, _StrEnum]):
        """Returns the member whose value (case-insensitive) matches `value`.

        Args:
            value (Union[str, _StrEnum]): Member or its string value.

        Raises:
            ValueError: When there is no member for the value.
        """
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise ValueError(f"`{value}` is not a valid {cls.__name__}, expected one of {[m.value for m in cls]}")


class StructureType(_StrEnum):
    """Structure of a multi-index set and of the map built on it.

    DENSE: Every multi-index with total order <= O.
    KR: Knothe-Rosenblatt (lower-triangular), total order per output row.
    KRSV: Knothe-Rosenblatt restricted to single-variable terms.
    """

    DENSE = "dense"
    KR = "kr"
    KRSV = "krsv"

    @property
    def is_triangular(self) -> bool:
        return self in (StructureType.KR, StructureType.KRSV)


class FamilyType(_StrEnum):
    """Univariate polynomial family.

    HERMITE: Probabilists' Hermite polynomials He_n, orthogonal w.r.t. N(0, 1).
    MONOMIAL: Plain powers x^n.
    """

    HERMITE = "hermite"
    MONOMIAL = "monomial"


class PUpdateType(_StrEnum):
    """Inner solver of the p-update."""

    NEWTON = "newton"
    LBFGS = "lbfgs"


class InitType(_StrEnum):
    """Initialization of the consensus variable."""

    IDENTITY = "identity"
    WARM = "warm"


class ScheduleType(_StrEnum):
    """Per-stage theta schedule of sequential composition."""

    CONSTANT = "constant"
    GEOMETRIC = "geometric"


class SourceType(_StrEnum):
    """Built-in source distributions."""

    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"
    TWO_GAUSSIAN_MIXTURE = "two-gaussian-mixture"


class MethodType(_StrEnum):
    """Posterior sampling method of the LASSO pipeline."""

    TRANSPORT = "transport"
    GIBBS = "gibbs"
    BOTH = "both"
