from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from otmap.utils import FamilyType

__all__ = ["UnivariateFamily", "HERMITE_FAMILY", "MONOMIAL_FAMILY"]


@dataclass(frozen=True)
class UnivariateFamily:
    """Univariate polynomial family psi_0, psi_1, ... with psi_0 = 1 and deg(psi_n) = n.

    Attributes:
        kind (FamilyType): HERMITE (probabilists', He_{n+1} = x He_n - n He_{n-1}) or MONOMIAL.
    """

    kind: FamilyType = FamilyType.HERMITE

    @classmethod
    def from_value(cls, value: Union[str, FamilyType, UnivariateFamily]) -> UnivariateFamily:
        if isinstance(value, UnivariateFamily):
            return value
        return cls(FamilyType.from_value(value))

    def evaluate(self, x: np.ndarray, degree: int) -> Tuple[np.ndarray, np.ndarray]:
        """Values and first derivatives of psi_0..psi_degree.

        Args:
            x (np.ndarray): Points in any shape.
            degree (int): Highest degree.

        Returns:
            values (np.ndarray): Shape x.shape + (degree + 1,).
            derivatives (np.ndarray): Shape x.shape + (degree + 1,).
        """
        x = np.asarray(x, dtype=float)
        values = np.empty(x.shape + (degree + 1,))
        derivatives = np.zeros(x.shape + (degree + 1,))
        values[..., 0] = 1.0
        if degree == 0:
            return values, derivatives

        values[..., 1] = x
        derivatives[..., 1] = 1.0
        if self.kind == FamilyType.HERMITE:
            for n in range(1, degree):
                values[..., n + 1] = x * values[..., n] - n * values[..., n - 1]
            # He_n' = n He_{n-1}
            derivatives[..., 2:] = np.arange(2, degree + 1) * values[..., 1:degree]
        else:
            for n in range(1, degree):
                values[..., n + 1] = x * values[..., n]
            derivatives[..., 2:] = np.arange(2, degree + 1) * values[..., 1:degree]
        return values, derivatives


HERMITE_FAMILY = UnivariateFamily(FamilyType.HERMITE)
MONOMIAL_FAMILY = UnivariateFamily(FamilyType.MONOMIAL)
