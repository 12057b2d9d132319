from typing import Any, Optional, Sequence

import numpy as np


class OtmapError(Exception):
    """Base class of every error raised by otmap."""


class InvalidArgumentError(OtmapError, ValueError):
    """Argument violates a documented precondition."""


class IndexSetTooLargeError(InvalidArgumentError):
    """Requested multi-index set exceeds the configured number of terms."""

    def __init__(self, structure: str, dim: int, order: int, size: int, cap: int) -> None:
        super().__init__(
            f"{structure} index set with D={dim}, O={order} has {size} terms, "
            f"which exceeds the cap of {cap} terms. Use a KR or KRSV structure or a lower order."
        )
        self.size = size
        self.cap = cap


class NonFiniteInputError(InvalidArgumentError):
    """Input contains NaN or infinity."""


class NonMonotoneAtPoint(OtmapError):
    """The map is not monotone at a point (left the set of monotone diffeomorphisms).

    Attributes:
        point (np.ndarray): Offending point.
        coord (Optional[int]): Offending coordinate for triangular maps.
        det_sign (Optional[float]): Sign of det J_S for dense maps.
        stage (Optional[int]): Stage index within a sequential map, if any.
    """

    def __init__(
        self,
        point: np.ndarray,
        coord: Optional[int] = None,
        det_sign: Optional[float] = None,
        stage: Optional[int] = None,
    ) -> None:
        self.point = np.asarray(point, dtype=float)
        self.coord = coord
        self.det_sign = det_sign
        self.stage = stage
        super().__init__(self._message())

    def _message(self) -> str:
        where = f"coordinate {self.coord}" if self.coord is not None else f"det sign {self.det_sign}"
        stage = f" in stage {self.stage}" if self.stage is not None else ""
        return f"Map is not monotone at x={self.point.tolist()} ({where}){stage}"

    def with_stage(self, stage: int) -> "NonMonotoneAtPoint":
        return NonMonotoneAtPoint(self.point, self.coord, self.det_sign, stage)


class BracketNotFound(OtmapError):
    """No sign-changing bracket was found within the search limit."""


class NoConvergence(OtmapError):
    """An inner iterative method hit its iteration cap."""


class NonConvergence(OtmapError):
    """ADMM residuals stayed above tolerance at max_iters.

    Attributes:
        result (Any): Best iterate and its diagnostics.
    """

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class DegenerateBasisError(OtmapError):
    """Static factor of the consensus update is not positive definite."""


class NumericalError(OtmapError):
    """A linear-algebra kernel failed on one sample.

    Attributes:
        sample (int): 0-based index of the offending sample.
    """

    def __init__(self, message: str, sample: int) -> None:
        super().__init__(f"Sample {sample}: {message}")
        self.sample = sample


class ProjectionError(OtmapError):
    """Monotone projection quadratic program failed."""


class UnsupportedOperation(OtmapError):
    """Operation is not defined for this map structure."""


class SchemaError(OtmapError):
    """Document violates the map/config schema.

    Attributes:
        path (str): Location of the violation, e.g. "stages.0.W.1".
    """

    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnsupportedVersion(SchemaError):
    """Document version is not understood by this release."""


class StageFitError(OtmapError):
    """A stage of sequential composition failed.

    Attributes:
        stage (int): 1-based index of the failing stage.
        partial (Any): SequentialMap with the stages fitted so far.
    """

    def __init__(self, stage: int, partial: Any, cause: Exception) -> None:
        super().__init__(f"Stage {stage} failed: {cause}")
        self.stage = stage
        self.partial = partial


class SamplerError(OtmapError):
    """Gibbs sampler produced a non-finite quantity."""


class DatasetError(OtmapError):
    """Regression dataset could not be loaded."""


class MissingValueError(DatasetError):
    """A cell is empty."""

    def __init__(self, path: str, row: int, column: str) -> None:
        super().__init__(f"{path}: missing value in row {row}, column `{column}`")


class NonNumericCellError(DatasetError):
    """A cell does not parse as a float."""

    def __init__(self, path: str, row: int, column: str, value: str) -> None:
        super().__init__(f"{path}: non-numeric value `{value}` in row {row}, column `{column}`")


class MissingColumnError(DatasetError):
    """Requested column is absent."""

    def __init__(self, path: str, column: str, available: Sequence[str]) -> None:
        super().__init__(f"{path}: column `{column}` not found, available columns are {list(available)}")


class StandardizationError(DatasetError):
    """A predictor column has zero standard deviation."""
