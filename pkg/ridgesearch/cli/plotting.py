"""Static SVG plots of data, ridge points and threshold intervals."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from ridgesearch.core.errors import DomainError

# fixed salt and no date keep the SVG text identical across runs
SVG_RC = {
    "svg.hashsalt": "ridgesearch",
    "svg.fonttype": "path",
    "path.simplify": False,
}


def plot_ridges(
    data: np.ndarray,
    points: np.ndarray,
    interval_lo: np.ndarray,
    interval_hi: np.ndarray,
    path: str | Path,
    labels: tuple[str, str] = ("x_1", "x_2"),
    ci_lo: np.ndarray | None = None,
    ci_hi: np.ndarray | None = None,
) -> None:
    """Writes an SVG with data as light markers, ridge points as dark markers and interval segments.

    The plot uses the first two coordinates and equal aspect axes. The layers carry the
    SVG ids data-points, ridge-points, ridge-intervals and, when uncertainty segments are
    given, ridge-uncertainty.

    Args:
        data (np.ndarray): (n, d) data points.
        points (np.ndarray): (m, d) ridge points, possibly empty.
        interval_lo (np.ndarray): (k, d) lower interval endpoints.
        interval_hi (np.ndarray): (k, d) upper interval endpoints.
        path (str | Path): Output file.
        labels (tuple[str, str], optional): Axis labels. Defaults to ("x_1", "x_2").
        ci_lo (np.ndarray | None, optional): (j, d) lower uncertainty segment endpoints. Defaults to None.
        ci_hi (np.ndarray | None, optional): (j, d) upper uncertainty segment endpoints. Defaults to None.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] < 2:
        raise DomainError(f"Plotting needs at least 2 coordinates, got shape {data.shape}.")
    points = np.asarray(points, dtype=np.float64).reshape(-1, data.shape[1])
    interval_lo = np.asarray(interval_lo, dtype=np.float64).reshape(-1, data.shape[1])
    interval_hi = np.asarray(interval_hi, dtype=np.float64).reshape(-1, data.shape[1])
    ci_lo = np.asarray([] if ci_lo is None else ci_lo, dtype=np.float64).reshape(-1, data.shape[1])
    ci_hi = np.asarray([] if ci_hi is None else ci_hi, dtype=np.float64).reshape(-1, data.shape[1])
    if ci_lo.shape != ci_hi.shape:
        raise DomainError(f"Uncertainty segment endpoints differ in shape: {ci_lo.shape} vs {ci_hi.shape}.")

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6.0, 6.0))
        ax.scatter(data[:, 0], data[:, 1], s=4, c="#b0b0b0", linewidths=0, gid="data-points")
        if len(interval_lo):
            segments = np.stack([interval_lo[:, :2], interval_hi[:, :2]], axis=1)
            ax.add_collection(LineCollection(segments, colors="#1f77b4", linewidths=0.8, gid="ridge-intervals"))
        if len(ci_lo):
            segments = np.stack([ci_lo[:, :2], ci_hi[:, :2]], axis=1)
            ax.add_collection(
                LineCollection(segments, colors="#d62728", linewidths=0.6, linestyles="dashed", gid="ridge-uncertainty")
            )
        if len(points):
            ax.scatter(points[:, 0], points[:, 1], s=8, c="#202020", linewidths=0, gid="ridge-points")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel(labels[0])
        ax.set_ylabel(labels[1])
        ax.autoscale_view()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
