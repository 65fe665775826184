"""CSV layout of ridge search results, iterate traces and evaluation summaries."""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from ridgesearch.core.algorithms import RidgeResult
from ridgesearch.core.errors import DataFormatError
from ridgesearch.core.point_cloud import FLOAT_FORMAT, read_numeric_csv

EVALUATION_COLUMNS = ["hausdorff", "mean_radius", "radial_std", "n_points"]


def result_columns(d: int, with_ci: bool = False) -> list[str]:
    """Header of the results CSV for dimension d.

    The uncertainty segment columns ci_lo_*, ci_hi_* are appended only when requested.
    """
    columns = (
        [f"start_{j}" for j in range(1, d + 1)]
        + [f"point_{j}" for j in range(1, d + 1)]
        + ["iterations", "converged"]
        + [f"int_lo_{j}" for j in range(1, d + 1)]
        + [f"int_hi_{j}" for j in range(1, d + 1)]
        + ["flat_top"]
    )
    if with_ci:
        columns += [f"ci_lo_{j}" for j in range(1, d + 1)] + [f"ci_hi_{j}" for j in range(1, d + 1)]
    return columns


def _vector_or_empty(vector: np.ndarray | None, d: int) -> list[float]:
    return [np.nan] * d if vector is None else [float(v) for v in vector]


def results_frame(results: Sequence[RidgeResult], d: int, with_ci: bool = False) -> pd.DataFrame:
    """Tabulates ridge search results, one row per starting point.

    Args:
        results (Sequence[RidgeResult]): Results in start order.
        d (int): Dimension.
        with_ci (bool, optional): Add the uncertainty segment columns. Defaults to False.

    Returns:
        pd.DataFrame: Frame with the columns of result_columns; missing intervals are NaN.
    """
    rows = []
    for r in results:
        row = (
            _vector_or_empty(r.start, d)
            + _vector_or_empty(r.point, d)
            + [int(r.iterations), int(bool(r.converged))]
            + _vector_or_empty(r.interval_lo, d)
            + _vector_or_empty(r.interval_hi, d)
            + [int(bool(r.flat_top))]
        )
        if with_ci:
            row += _vector_or_empty(r.ci_lo, d) + _vector_or_empty(r.ci_hi, d)
        rows.append(row)
    frame = pd.DataFrame(rows, columns=result_columns(d, with_ci))
    return frame.astype({"iterations": "int64", "converged": "int64", "flat_top": "int64"})


def write_results(results: Sequence[RidgeResult], d: int, path: str | Path, with_ci: bool = False) -> None:
    """Writes ridge search results as CSV with 17 significant digits and empty missing cells."""
    frame = results_frame(results, d, with_ci)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")


def write_trace(results: Sequence[RidgeResult], d: int, path: str | Path) -> None:
    """Writes every recorded iterate as (start_index, iteration, x_1, ..., x_d)."""
    rows = []
    for index, r in enumerate(results):
        if r.trace is None:
            continue
        for iteration, x in enumerate(r.trace):
            rows.append([index, iteration, *(float(v) for v in x)])
    frame = pd.DataFrame(rows, columns=["start_index", "iteration"] + [f"x_{j}" for j in range(1, d + 1)])
    frame = frame.astype({"start_index": "int64", "iteration": "int64"})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def read_results(path: str | Path) -> pd.DataFrame:
    """Reads a results CSV and checks its header.

    Args:
        path (str | Path): Results file.

    Returns:
        pd.DataFrame: Float columns, NaN where the file has empty cells.
    """
    frame = read_numeric_csv(path)
    d = sum(1 for c in frame.columns if str(c).startswith("point_"))
    if d == 0:
        raise DataFormatError(str(path), 1, "no point columns in results header")
    expected = result_columns(d)
    if list(frame.columns[: len(expected)]) != expected:
        raise DataFormatError(str(path), 1, f"unexpected results header, expected {','.join(expected)}")
    return frame


def result_dimension(frame: pd.DataFrame) -> int:
    """Dimension d of a results frame."""
    return sum(1 for c in frame.columns if str(c).startswith("point_"))


def ridge_points(frame: pd.DataFrame) -> np.ndarray:
    """The (m, d) array of final points."""
    d = result_dimension(frame)
    return frame[[f"point_{j}" for j in range(1, d + 1)]].to_numpy(dtype=np.float64)


def ridge_intervals(frame: pd.DataFrame) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of the threshold intervals for the rows that have one."""
    d = result_dimension(frame)
    lo = frame[[f"int_lo_{j}" for j in range(1, d + 1)]].to_numpy(dtype=np.float64)
    hi = frame[[f"int_hi_{j}" for j in range(1, d + 1)]].to_numpy(dtype=np.float64)
    present = np.all(np.isfinite(lo), axis=1) & np.all(np.isfinite(hi), axis=1)
    return lo[present], hi[present]


def uncertainty_segments(frame: pd.DataFrame) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints of the likelihood ratio uncertainty segments, empty if the file has none."""
    d = result_dimension(frame)
    lo_columns = [f"ci_lo_{j}" for j in range(1, d + 1)]
    hi_columns = [f"ci_hi_{j}" for j in range(1, d + 1)]
    if not set(lo_columns + hi_columns) <= set(frame.columns):
        return np.empty((0, d)), np.empty((0, d))
    lo = frame[lo_columns].to_numpy(dtype=np.float64)
    hi = frame[hi_columns].to_numpy(dtype=np.float64)
    present = np.all(np.isfinite(lo), axis=1) & np.all(np.isfinite(hi), axis=1)
    return lo[present], hi[present]


def write_evaluation(hausdorff: float, mean_radius: float, radial_std: float, n_points: int, path: str | Path) -> None:
    """Writes the one-row evaluation summary."""
    frame = pd.DataFrame([[hausdorff, mean_radius, radial_std, n_points]], columns=EVALUATION_COLUMNS)
    frame = frame.astype({"n_points": "int64"})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
