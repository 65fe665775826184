from .plotting import plot_ridges
from .results import (
    read_results,
    result_columns,
    results_frame,
    ridge_intervals,
    ridge_points,
    uncertainty_segments,
    write_evaluation,
    write_results,
    write_trace,
)

__all__ = [
    "plot_ridges",
    "read_results",
    "result_columns",
    "results_frame",
    "ridge_intervals",
    "ridge_points",
    "uncertainty_segments",
    "write_evaluation",
    "write_results",
    "write_trace",
]
