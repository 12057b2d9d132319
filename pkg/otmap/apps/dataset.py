import csv
import os.path as osp
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from otmap.utils import (
    DatasetError,
    MissingColumnError,
    MissingValueError,
    NonNumericCellError,
    StandardizationError,
    get_logger,
)

__all__ = ["RegressionDataset", "load_regression_csv", "standardize"]

logger = get_logger()

STANDARDIZATION_ATOL: float = 1e-10


@dataclass
class RegressionDataset:
    """Standardized regression problem y = X x + noise.

    Attributes:
        X (np.ndarray): Predictors in shape (n, d), columns of mean 0 and std 1.
        y (np.ndarray): Centered response in shape (n,).
        names (List[str]): Predictor labels.
        x_mean (np.ndarray): Column means of the raw predictors.
        x_std (np.ndarray): Column standard deviations of the raw predictors.
        y_mean (float): Mean of the raw response.
        X_raw (np.ndarray): Predictors as loaded.
        y_raw (np.ndarray): Response as loaded.
        response (str): Response label.
    """

    X: np.ndarray
    y: np.ndarray
    names: List[str]
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    X_raw: np.ndarray
    y_raw: np.ndarray
    response: str = "y"

    @property
    def num_cases(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def destandardize(self, coef: np.ndarray) -> np.ndarray:
        """Coefficients on the raw predictor scale from coefficients of the standardized ones."""
        return np.asarray(coef, dtype=float) / self.x_std


def standardize(
    X: np.ndarray,
    y: np.ndarray,
    names: Optional[List[str]] = None,
    response: str = "y",
) -> RegressionDataset:
    """Standardize predictor columns and center the response.

    Args:
        X (np.ndarray): Raw predictors in shape (n, d).
        y (np.ndarray): Raw response in shape (n,).
        names (Optional[List[str]]): Predictor labels. Defaults to x0..x{d-1}.
        response (str): Response label.

    Returns:
        RegressionDataset

    Raises:
        StandardizationError: When a predictor column is constant.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    names = list(names) if names is not None else [f"x{j}" for j in range(X.shape[1])]

    x_mean = X.mean(axis=0)
    x_std = X.std(axis=0)
    constant = [names[j] for j in np.flatnonzero(x_std <= STANDARDIZATION_ATOL * np.maximum(1.0, np.abs(x_mean)))]
    if constant:
        raise StandardizationError(f"Predictor columns {constant} have zero standard deviation")

    y_mean = float(y.mean())
    return RegressionDataset(
        X=(X - x_mean) / x_std,
        y=y - y_mean,
        names=names,
        x_mean=x_mean,
        x_std=x_std,
        y_mean=y_mean,
        X_raw=X,
        y_raw=y,
        response=response,
    )


def load_regression_csv(path: str, response: str) -> RegressionDataset:
    """Load a headed CSV, take `response` as y and every other column as a predictor.

    Args:
        path (str): CSV path; the first row names the columns.
        response (str): Name of the response column.

    Returns:
        RegressionDataset: Standardized dataset.

    Raises:
        FileNotFoundError: When cannot find the file.
        MissingColumnError: When `response` is not a column.
        MissingValueError: When a cell is empty.
        NonNumericCellError: When a cell is not a number.
        StandardizationError: When a predictor column is constant.
    """
    if not osp.exists(path):
        raise FileNotFoundError(f"Cannot find {path}")

    with open(path, newline="") as f:
        reader = csv.reader(line for line in f if not line.lstrip().startswith("#"))
        header = [name.strip() for name in next(reader, [])]
        if response not in header:
            raise MissingColumnError(path, response, header)

        rows: List[List[float]] = []
        for r, row in enumerate(reader, start=1):
            if not any(cell.strip() for cell in row):
                continue
            cells = [cell.strip() for cell in row] + [""] * (len(header) - len(row))
            values = []
            for name, cell in zip(header, cells):
                if cell == "" or cell.lower() in ("na", "nan"):
                    raise MissingValueError(path, r, name)
                try:
                    values.append(float(cell))
                except ValueError:
                    raise NonNumericCellError(path, r, name, cell) from None
            rows.append(values)

    if len(rows) < 2:
        raise DatasetError(f"{path}: needs at least 2 data rows, but got {len(rows)}")
    table = np.asarray(rows, dtype=float).reshape(len(rows), len(header))
    col = header.index(response)
    names = [name for j, name in enumerate(header) if j != col]
    logger.info(f"Loaded {path}: n={table.shape[0]}, d={len(names)}, response `{response}`")
    return standardize(np.delete(table, col, axis=1), table[:, col], names, response)
