"""Sample-sharded execution of per-sample ADMM updates.

Samples are split into contiguous shards, one per worker. Per-sample updates
write disjoint slices of the state, so shards run concurrently on a thread
pool (the numpy kernels release the GIL). Reductions add shard partial sums in
shard order; in strict mode the per-sample terms are gathered and summed in
global sample order, which makes the result independent of the worker count.
"""
from __future__ import annotations

from multiprocessing.pool import ThreadPool
from typing import Callable, List, Optional, TypeVar

import numpy as np

__all__ = ["ShardExecutor"]

T = TypeVar("T")


class ShardExecutor:
    """Runs functions of a sample slice over contiguous shards.

    Attributes:
        num_samples (int): N.
        workers (int): Number of shards and threads.
        strict (bool): Reduce in global sample order.
        shards (List[slice]): Contiguous sample ranges in shard order.
    """

    def __init__(self, num_samples: int, workers: int = 1, strict: bool = False) -> None:
        self.num_samples: int = num_samples
        self.workers: int = max(1, min(workers, num_samples))
        self.strict: bool = strict
        bounds = np.linspace(0, num_samples, self.workers + 1).round().astype(int)
        self.shards: List[slice] = [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
        self._pool: Optional[ThreadPool] = ThreadPool(self.workers) if self.workers > 1 else None

    def map(self, fn: Callable[[slice], T]) -> List[T]:
        """fn applied to every shard, results in shard order."""
        if self._pool is None:
            return [fn(shard) for shard in self.shards]
        return self._pool.map(fn, self.shards)

    def run(self, fn: Callable[[slice], None]) -> None:
        """Run an in-place per-sample update on every shard."""
        self.map(fn)

    def sum(self, fn: Callable[[slice], np.ndarray]) -> np.ndarray:
        """Sum over samples of the per-sample terms fn(shard) in shape (n_shard, ...)."""
        terms = self.map(fn)
        if self.strict:
            return np.concatenate(terms, axis=0).sum(axis=0)
        total = terms[0].sum(axis=0)
        for term in terms[1:]:
            total = total + term.sum(axis=0)
        return total

    def close(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self) -> ShardExecutor:
        return self

    def __exit__(self, exc_type, exc_value, traceback) -> None:
        self.close()

    def __del__(self):
        self.close()
