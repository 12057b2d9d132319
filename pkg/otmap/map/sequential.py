from __future__ import annotations

from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from otmap.utils import BracketNotFound, InvalidArgumentError, NoConvergence, NonMonotoneAtPoint

from .inverse import RootFinderConfig, invert_batch
from .transport import TransportMap

__all__ = ["SequentialMap", "compose_forward", "compose_inverse", "push_with_log_det"]


class SequentialMap:
    """Composition S_T o ... o S_1; stage 1 is applied first.

    Per-stage theta and diagnostics live in each stage's `metadata`.

    Attributes:
        stages (List[TransportMap]): Stages in application order.
    """

    def __init__(self, stages: Sequence[TransportMap]) -> None:
        stages = list(stages)
        if len(stages) == 0:
            raise InvalidArgumentError("SequentialMap needs at least one stage")
        dims = {stage.dim for stage in stages}
        if len(dims) != 1:
            raise InvalidArgumentError(f"All stages must share D, but got dimensions {sorted(dims)}")
        self.stages: List[TransportMap] = stages

    def __len__(self) -> int:
        return len(self.stages)

    def __iter__(self) -> Iterator[TransportMap]:
        return iter(self.stages)

    def __getitem__(self, index: int) -> TransportMap:
        return self.stages[index]

    def __repr__(self) -> str:
        return f"SequentialMap(T={len(self)}, D={self.dim})"

    @property
    def dim(self) -> int:
        return self.stages[0].dim

    @property
    def is_triangular(self) -> bool:
        return all(stage.is_triangular for stage in self.stages)

    @property
    def thetas(self) -> List[Optional[float]]:
        return [stage.metadata.get("theta") for stage in self.stages]

    @property
    def diagnostics(self) -> List[Dict[str, Any]]:
        return [dict(stage.metadata) for stage in self.stages]

    def append(self, stage: TransportMap) -> SequentialMap:
        """New sequence with one more stage."""
        return SequentialMap(self.stages + [stage])

    def truncated(self, num_stages: int) -> SequentialMap:
        """First `num_stages` stages."""
        return SequentialMap(self.stages[:num_stages])

    def forward_batch(self, xs: np.ndarray) -> np.ndarray:
        return compose_forward(self, xs)

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = compose_forward(self, np.atleast_2d(x))
        return out[0] if x.ndim == 1 else out

    def log_det_jacobian_batch(self, xs: np.ndarray) -> np.ndarray:
        return push_with_log_det(self, xs)[1]


MapLike = Union[TransportMap, SequentialMap]


def compose_forward(seq: MapLike, xs: np.ndarray) -> np.ndarray:
    """Apply stages 1..T to every row of `xs`.

    Args:
        seq (MapLike): Sequence, or a single map treated as one stage.
        xs (np.ndarray): Points in shape (N, D).

    Returns:
        np.ndarray: Pushed points in shape (N, D).
    """
    out = np.atleast_2d(np.asarray(xs, dtype=float))
    for stage in _stages(seq):
        out = stage.forward_batch(out)
    return out


def compose_inverse(seq: MapLike, ys: np.ndarray, config: Optional[RootFinderConfig] = None) -> np.ndarray:
    """Invert stages T..1.

    Raises:
        UnsupportedOperation: When a stage is not triangular.
        BracketNotFound: With the 1-based stage index in the message.
        NoConvergence: With the 1-based stage index in the message.
        NonMonotoneAtPoint: With `stage` set.
    """
    out = np.atleast_2d(np.asarray(ys, dtype=float))
    stages = _stages(seq)
    for t in range(len(stages), 0, -1):
        try:
            out = invert_batch(stages[t - 1], out, config)
        except NonMonotoneAtPoint as err:
            raise err.with_stage(t) from err
        except (BracketNotFound, NoConvergence) as err:
            raise type(err)(f"Stage {t}: {err}") from err
    return out


def push_with_log_det(seq: MapLike, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pushed points and log det of the composed Jacobian, accumulated by the chain rule.

    Raises:
        NonMonotoneAtPoint: With the 1-based stage index set.
    """
    out = np.atleast_2d(np.asarray(xs, dtype=float))
    total = np.zeros(out.shape[0])
    for t, stage in enumerate(_stages(seq), start=1):
        try:
            total += stage.log_det_jacobian_batch(out)
        except NonMonotoneAtPoint as err:
            raise err.with_stage(t) from err
        out = stage.forward_batch(out)
    return out, total


def _stages(seq: MapLike) -> List[TransportMap]:
    if isinstance(seq, TransportMap):
        return [seq]
    return seq.stages
