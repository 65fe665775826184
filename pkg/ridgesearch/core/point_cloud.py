"""Point clouds and their CSV representation."""
from __future__ import annotations

import re
from collections.abc import Sequence
from pathlib import Path
from typing import NamedTuple

import chex
import numpy as np
import pandas as pd

from .errors import DataFormatError, DomainError

# 17 significant digits round-trip every double exactly
FLOAT_FORMAT = "%.17g"


@chex.dataclass(frozen=True)
class PointCloud:
    """Ordered d-dimensional sample points with optional column labels."""

    points: np.ndarray
    labels: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        """Number of points."""
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        """Dimension of the points."""
        return int(self.points.shape[1])


class BoxFilter(NamedTuple):
    """Closed interval filter on one column. Consists of (column, lo, hi)."""

    column: str
    lo: float
    hi: float

    @classmethod
    def parse(cls, spec: str) -> BoxFilter:
        """Parses a filter given as "column:lo:hi".

        Args:
            spec (str): Filter specification.

        Returns:
            BoxFilter: Parsed filter.
        """
        parts = str(spec).rsplit(":", 2)
        if len(parts) != 3:
            raise DomainError(f"Invalid filter '{spec}', expected column:lo:hi.")
        try:
            lo, hi = float(parts[1]), float(parts[2])
        except ValueError:
            raise DomainError(f"Invalid filter bounds in '{spec}'.")
        if lo > hi:
            raise DomainError(f"Invalid filter '{spec}': lower bound exceeds upper bound.")
        return cls(parts[0], lo, hi)


def make_cloud(points: np.ndarray | Sequence[Sequence[float]], labels: Sequence[str] | None = None) -> PointCloud:
    """Creates a validated point cloud.

    Args:
        points (np.ndarray | Sequence[Sequence[float]]): Points as n x d array.
        labels (Sequence[str] | None, optional): Column labels. Defaults to None.

    Returns:
        PointCloud: Point cloud.
    """
    array = np.array(points, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
        raise DomainError(f"Expected a non-empty n x d array of points, got shape {array.shape}.")
    if not np.all(np.isfinite(array)):
        raise DomainError("Point cloud contains non-finite coordinates.")
    if labels is not None and len(labels) != array.shape[1]:
        raise DomainError(f"Got {len(labels)} labels for {array.shape[1]} columns.")
    return PointCloud(points=array, labels=None if labels is None else tuple(labels))


def as_points(data: PointCloud | np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    """Returns the n x d coordinate array of a point cloud or array-like.

    Args:
        data (PointCloud | np.ndarray | Sequence[Sequence[float]]): Sample.

    Returns:
        np.ndarray: Float64 array of shape (n, d).
    """
    if isinstance(data, PointCloud):
        return data.points
    return make_cloud(data).points


def default_labels(d: int, prefix: str = "x") -> tuple[str, ...]:
    """Column labels prefix_1, ..., prefix_d."""
    return tuple(f"{prefix}_{j + 1}" for j in range(d))


def _parse_line_number(message: str) -> int | None:
    match = re.search(r"line (\d+)", message)
    return int(match.group(1)) if match else None


def read_numeric_csv(path: str | Path) -> pd.DataFrame:
    """Reads a CSV file with a header row and numeric rows.

    Values are parsed with Python's float so that files written with FLOAT_FORMAT
    are read back bit for bit. Empty cells become NaN.

    Args:
        path (str | Path): File to read.

    Returns:
        pd.DataFrame: Frame of float64 columns.
    """
    path = str(path)
    if not Path(path).is_file():
        raise DataFormatError(path, None, "file does not exist")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise DataFormatError(path, 1, "missing header row")
    except pd.errors.ParserError as e:
        raise DataFormatError(path, _parse_line_number(str(e)), f"malformed row ({e})")

    columns = {}
    for column in frame.columns:
        values = np.empty(len(frame), dtype=np.float64)
        for i, raw in enumerate(frame[column].tolist()):
            if raw is None or (isinstance(raw, float) and np.isnan(raw)):
                raise DataFormatError(path, i + 2, f"missing value in column '{column}'")
            text = str(raw).strip()
            if text == "":
                values[i] = np.nan
                continue
            try:
                values[i] = float(text)
            except ValueError:
                raise DataFormatError(path, i + 2, f"non-numeric value '{text}' in column '{column}'")
        columns[str(column)] = values
    return pd.DataFrame(columns)


def ingest(
    path: str | Path,
    filters: Sequence[BoxFilter] | None = None,
    columns: Sequence[str] | None = None,
) -> PointCloud:
    """Reads a point cloud from CSV, keeping rows inside the closed filter box.

    Args:
        path (str | Path): CSV file with a header row of column names.
        filters (Sequence[BoxFilter] | None, optional): Per-column closed intervals. Defaults to None.
        columns (Sequence[str] | None, optional): Coordinate columns, all columns if None. Defaults to None.

    Returns:
        PointCloud: Surviving rows in file order with their column labels.
    """
    path = str(path)
    frame = read_numeric_csv(path)
    if frame.isna().to_numpy().any():
        row = int(np.argmax(frame.isna().to_numpy().any(axis=1)))
        raise DataFormatError(path, row + 2, "empty value")
    if not np.all(np.isfinite(frame.to_numpy())):
        row = int(np.argmax(~np.isfinite(frame.to_numpy()).all(axis=1)))
        raise DataFormatError(path, row + 2, "non-finite value")

    mask = np.ones(len(frame), dtype=bool)
    for box in filters or []:
        if box.column not in frame.columns:
            raise DataFormatError(path, 1, f"unknown filter column '{box.column}'")
        values = frame[box.column].to_numpy()
        mask &= (values >= box.lo) & (values <= box.hi)

    selected = list(frame.columns) if columns is None or len(columns) == 0 else list(columns)
    for column in selected:
        if column not in frame.columns:
            raise DataFormatError(path, 1, f"unknown column '{column}'")

    points = frame.loc[mask, selected].to_numpy(dtype=np.float64)
    if points.shape[0] == 0:
        raise DataFormatError(path, None, "zero rows after filtering")
    return PointCloud(points=points, labels=tuple(selected))


def emit(cloud: PointCloud, path: str | Path) -> None:
    """Writes a point cloud as CSV with 17 significant digits.

    Args:
        cloud (PointCloud): Point cloud.
        path (str | Path): Output file.
    """
    labels = cloud.labels if cloud.labels is not None else default_labels(cloud.d)
    frame = pd.DataFrame(cloud.points, columns=list(labels))
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
