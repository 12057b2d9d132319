import csv
import os.path as osp
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidArgumentError
from .format import dict2list, format_float


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_samples_csv(path: str, dim: Optional[int] = None) -> Tuple[np.ndarray, Optional[List[str]]]:
    """Read a sample batch, one sample per row, optional header row.

    Lines starting with "#" are skipped. A first row with any non-numeric cell is a header.

    Args:
        path (str): CSV file path.
        dim (Optional[int]): Expected number of columns. Defaults to None.

    Returns:
        samples (np.ndarray): Array in shape (N, D).
        header (Optional[List[str]]): Column names if the file has a header.

    Raises:
        FileNotFoundError: When cannot find the file.
        InvalidArgumentError: When a row is ragged, non-numeric, or does not have `dim` columns.
    """
    if not osp.exists(path):
        raise FileNotFoundError(f"Cannot find {path}")

    header: Optional[List[str]] = None
    rows: List[List[float]] = []
    with open(path, newline="") as f:
        reader = csv.reader(line for line in f if line.strip() and not line.lstrip().startswith("#"))
        for i, row in enumerate(reader):
            cells = [c.strip() for c in row]
            if i == 0 and not all(_is_float(c) for c in cells):
                header = cells
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError as err:
                raise InvalidArgumentError(f"{path}: row {i + 1} is not numeric ({err})") from err

    width = len(header) if header is not None else (len(rows[0]) if rows else 0)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InvalidArgumentError(f"{path}: row {i + 1} has {len(row)} columns, expected {width}")
    if dim is not None and width != dim:
        raise InvalidArgumentError(f"{path}: samples have {width} columns but the map has D={dim}")

    return np.asarray(rows, dtype=float).reshape(len(rows), width), header


def write_samples_csv(
    path: str,
    samples: np.ndarray,
    header: Optional[Sequence[str]] = None,
    comments: Optional[Iterable[str]] = None,
) -> None:
    """Write a sample batch, one sample per row, floats in shortest round-trip form.

    Args:
        path (str): Output path.
        samples (np.ndarray): Array in shape (N, D).
        header (Optional[Sequence[str]]): Column names. Defaults to None.
        comments (Optional[Iterable[str]]): Lines written first, prefixed by "# ". Defaults to None.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    with open(path, "w", newline="") as f:
        for line in comments or ():
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        if header is not None:
            writer.writerow(list(header))
        for row in samples:
            writer.writerow([format_float(v) for v in row])


def write_records_csv(
    path: str,
    fieldnames: Sequence[str],
    records: Iterable[Dict[str, Any]],
    comments: Optional[Iterable[str]] = None,
) -> None:
    """Write dict records as CSV with a header row.

    Args:
        path (str): Output path.
        fieldnames (Sequence[str]): Column order.
        records (Iterable[Dict[str, Any]]): Rows.
        comments (Optional[Iterable[str]]): Lines written first, prefixed by "# ". Defaults to None.
    """
    with open(path, "w", newline="") as f:
        for line in comments or ():
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(fieldnames))
        for record in records:
            writer.writerow(dict2list(record, list(fieldnames)))
