"""Bandwidth selectors: Silverman's rule and the Euclidean minimum spanning tree rule."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSampleError, DomainError
from .point_cloud import PointCloud, as_points

logger = logging.getLogger(__name__)


class EmstResult(NamedTuple):
    """Euclidean minimum spanning tree. Consists of (edges, total_length)."""

    edges: list[tuple[int, int]]
    total_length: float


def silverman_bandwidth(data: PointCloud | np.ndarray, A0: float = 1.0) -> float:
    """Silverman-type rule h = A0 (d + 2)^{-1/(d+4)} n^{-1/(d+4)} sigma_min.

    Args:
        data (PointCloud | np.ndarray): Sample of n >= 2 points.
        A0 (float, optional): Scale constant. Defaults to 1.0.

    Returns:
        float: Bandwidth.
    """
    points = as_points(data)
    n, d = points.shape
    if n < 2:
        raise DomainError(f"Silverman's rule needs at least 2 points, got {n}.")
    if not (math.isfinite(A0) and A0 > 0):
        raise DomainError(f"Invalid constant A0: {A0}")
    std = np.std(points, axis=0, ddof=1)
    positive = std[std > 0]
    if positive.size == 0:
        raise DegenerateSampleError("All coordinates are constant.")
    sigma_min = float(np.min(positive))
    return A0 * (d + 2) ** (-1.0 / (d + 4)) * n ** (-1.0 / (d + 4)) * sigma_min


def emst(data: PointCloud | np.ndarray) -> EmstResult:
    """Exact Euclidean minimum spanning tree by Prim's algorithm.

    Distances are computed one row at a time, so memory stays linear in n.
    Ties are broken by the smallest vertex index; duplicate points give zero-length edges.

    Args:
        data (PointCloud | np.ndarray): Sample of n >= 2 points.

    Returns:
        EmstResult: Tree edges (parent, child) in insertion order and their total length.
    """
    points = as_points(data)
    n = points.shape[0]
    if n < 2:
        raise DomainError(f"A spanning tree needs at least 2 points, got {n}.")

    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    parent = np.full(n, -1)
    edges: list[tuple[int, int]] = []
    total = 0.0

    current = 0
    in_tree[0] = True
    for _ in range(n - 1):
        distances = np.sqrt(np.sum((points - points[current]) ** 2, axis=1))
        closer = ~in_tree & (distances < best)
        best[closer] = distances[closer]
        parent[closer] = current
        candidates = np.where(in_tree, np.inf, best)
        current = int(np.argmin(candidates))
        in_tree[current] = True
        edges.append((int(parent[current]), current))
        total += float(best[current])
    logger.debug(f"EMST over {n} points has length {total}.")
    return EmstResult(edges=edges, total_length=total)


def emst_bandwidth(data: PointCloud | np.ndarray) -> float:
    """EMST rule h = (L_n / n)^{1/(d+4)}.

    Args:
        data (PointCloud | np.ndarray): Sample of n >= 2 points.

    Returns:
        float: Bandwidth.
    """
    points = as_points(data)
    n, d = points.shape
    length = emst(points).total_length
    if not length > 0:
        raise DegenerateSampleError("All points coincide, the spanning tree has length 0.")
    return (length / n) ** (1.0 / (d + 4))
