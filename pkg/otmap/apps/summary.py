from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import gaussian_kde

from otmap.utils import InvalidArgumentError, MethodType, write_records_csv, write_samples_csv

__all__ = [
    "SUMMARY_FIELDS",
    "PosteriorSummary",
    "summarize_posterior",
    "kde_dump",
    "write_summary_csv",
    "write_kde_csv",
]

SUMMARY_FIELDS: Tuple[str, ...] = ("name", "median", "q2.5", "q97.5", "mean", "std")


@dataclass
class PosteriorSummary:
    """Per-coordinate posterior statistics.

    Attributes:
        median (np.ndarray): Medians in shape (d,).
        q_low (np.ndarray): 2.5% quantiles.
        q_high (np.ndarray): 97.5% quantiles.
        mean (np.ndarray): Means.
        std (np.ndarray): Standard deviations.
        num_samples (int): Sample count.
        method (MethodType): TRANSPORT or GIBBS.
        names (List[str]): Coordinate labels.
    """

    median: np.ndarray
    q_low: np.ndarray
    q_high: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    num_samples: int
    method: MethodType
    names: List[str]

    @property
    def dim(self) -> int:
        return self.median.size

    def to_rows(self, lasso: Optional[np.ndarray] = None) -> List[Dict[str, Any]]:
        """Records of the summary CSV; adds a `lasso` column when an estimate is given."""
        rows = []
        for j, name in enumerate(self.names):
            row = {
                "name": name,
                "median": self.median[j],
                "q2.5": self.q_low[j],
                "q97.5": self.q_high[j],
                "mean": self.mean[j],
                "std": self.std[j],
            }
            if lasso is not None:
                row["lasso"] = float(lasso[j])
            rows.append(row)
        return rows


def summarize_posterior(
    samples: np.ndarray,
    method: Union[str, MethodType] = MethodType.TRANSPORT,
    names: Optional[Sequence[str]] = None,
) -> PosteriorSummary:
    """Medians, 95% credible intervals with linear-interpolated quantiles, means and stds.

    Args:
        samples (np.ndarray): Draws in shape (n, d) or (n,).
        method (Union[str, MethodType]): Tag of the method that produced the draws.
        names (Optional[Sequence[str]]): Coordinate labels. Defaults to x0..x{d-1}.

    Returns:
        PosteriorSummary

    Raises:
        InvalidArgumentError: When there are no samples.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] == 0:
        raise InvalidArgumentError("Cannot summarize an empty sample set")
    dim = samples.shape[1]
    names = list(names) if names is not None else [f"x{j}" for j in range(dim)]
    if len(names) != dim:
        raise InvalidArgumentError(f"Got {len(names)} names for {dim} coordinates")

    q_low, median, q_high = np.quantile(samples, [0.025, 0.5, 0.975], axis=0)
    return PosteriorSummary(
        median=median,
        q_low=q_low,
        q_high=q_high,
        mean=samples.mean(axis=0),
        std=samples.std(axis=0, ddof=1) if samples.shape[0] > 1 else np.zeros(dim),
        num_samples=samples.shape[0],
        method=MethodType.from_value(method),
        names=names,
    )


def kde_dump(samples: np.ndarray, grid_size: int = 200) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Per-coordinate Gaussian KDE evaluated on a grid spanning the samples.

    Args:
        samples (np.ndarray): Draws in shape (n, d).
        grid_size (int): Number of grid points.

    Returns:
        List[Tuple[np.ndarray, np.ndarray]]: (grid, density) per coordinate.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] < 2:
        raise InvalidArgumentError("KDE needs at least 2 samples")
    if grid_size < 2:
        raise InvalidArgumentError(f"grid_size must be >= 2, but got {grid_size}")

    curves = []
    for column in samples.T:
        lo, hi = column.min(), column.max()
        pad = 0.1 * (hi - lo) if hi > lo else 1.0
        grid = np.linspace(lo - pad, hi + pad, grid_size)
        if np.ptp(column) == 0:
            # point mass, no bandwidth
            density = np.zeros(grid_size)
        else:
            density = gaussian_kde(column)(grid)
        curves.append((grid, density))
    return curves


def write_summary_csv(
    path: str,
    summary: PosteriorSummary,
    lasso: Optional[np.ndarray] = None,
    comments: Optional[Sequence[str]] = None,
) -> None:
    fields = list(SUMMARY_FIELDS) + (["lasso"] if lasso is not None else [])
    write_records_csv(path, fields, summary.to_rows(lasso), comments)


def write_kde_csv(path: str, curves: List[Tuple[np.ndarray, np.ndarray]], names: Sequence[str]) -> None:
    """KDE curves side by side, a `<name>_grid` and a `<name>_density` column per coordinate."""
    header = [f"{name}_{col}" for name in names for col in ("grid", "density")]
    table = np.column_stack([arr for curve in curves for arr in curve])
    write_samples_csv(path, table, header)
