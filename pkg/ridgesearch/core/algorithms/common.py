"""Types shared by the ridge search algorithms, the mean shift vector and starting grids."""
from __future__ import annotations

import dataclasses
import functools
import itertools
import math
import warnings
from collections.abc import Mapping
from enum import Enum
from typing import TYPE_CHECKING, Any, NamedTuple

import jax
import jax.numpy as jnp
import numpy as np
from scipy.spatial.distance import cdist

from ridgesearch.core.errors import DomainError, EmptyNeighborhoodError
from ridgesearch.core.kernels import Kernel, ShadowKernel
from ridgesearch.core.local_moments import MOMENT_FLOOR
from ridgesearch.core.point_cloud import PointCloud, as_points

if TYPE_CHECKING:
    import chex
    from ConfigSpace import Configuration


class Variant(str, Enum):
    """Ridge search variants."""

    MEAN_SHIFT = "mean_shift"
    SCMS = "scms"
    LCRS = "lcrs"
    SLCRS = "slcrs"

    @property
    def is_logconcave(self) -> bool:
        """Whether the variant steps to modes of log-concave fits."""
        return self in (Variant.LCRS, Variant.SLCRS)


# keys understood by SearchConfig.from_configuration, with their defaults
SEARCH_CONFIG_DEFAULTS: dict[str, Any] = {
    "rel_tol": 1e-4,
    "max_iter": 500,
    "tau": 0.9,
    "ridge_dim": None,
    "align_tol": 1e-8,
    "weight_cutoff": 1e-12,
    "min_effective_size": 5.0,
    "ci_alpha": 0.0,
    "ci_reps": 500,
    "ci_seed": 0,
}


@dataclasses.dataclass(frozen=True)
class SearchConfig:
    """Immutable settings of a single ridge search."""

    h: float
    tol: float
    max_iter: int = 500
    tau: float = 0.9
    ridge_dim: int = 1
    variant: Variant = Variant.LCRS
    align_tol: float = 1e-8
    weight_cutoff: float = 1e-12
    min_effective_size: float = 5.0
    ci_alpha: float = 0.0
    ci_reps: int = 500
    ci_seed: int = 0
    kernel: Kernel | None = None
    record_trace: bool = False
    debug: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if not (math.isfinite(self.h) and self.h > 0):
            raise DomainError(f"Invalid bandwidth: {self.h}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise DomainError(f"Invalid tolerance: {self.tol}")
        if self.max_iter < 1:
            raise DomainError(f"Invalid max_iter: {self.max_iter}")
        if not 0 < self.tau <= 1:
            raise DomainError(f"Invalid threshold level tau: {self.tau}")
        if self.ridge_dim < 0:
            raise DomainError(f"Invalid ridge dimension: {self.ridge_dim}")
        if not 0 <= self.ci_alpha < 1:
            raise DomainError(f"Invalid ci_alpha: {self.ci_alpha}")
        if not 0 <= self.weight_cutoff < 1:
            raise DomainError(f"Invalid weight_cutoff: {self.weight_cutoff}")

    @classmethod
    def from_configuration(
        cls,
        h: float,
        configuration: Configuration | Mapping[str, Any] | None,
        variant: Variant | str,
        dimension: int,
        **kwargs: Any,
    ) -> SearchConfig:
        """Builds a search configuration from a ConfigSpace configuration or a plain mapping.

        The tolerance is rel_tol * h. LCRS and sLCRS always search (d-1)-dimensional ridges.

        Args:
            h (float): Bandwidth.
            configuration (Configuration | Mapping[str, Any] | None): Hyperparameters, see SEARCH_CONFIG_DEFAULTS.
            variant (Variant | str): Algorithm variant.
            dimension (int): Data dimension d.
            **kwargs: Further SearchConfig fields (kernel, record_trace, debug).

        Returns:
            SearchConfig: Configuration.
        """
        variant = Variant(variant)
        values = dict(SEARCH_CONFIG_DEFAULTS)
        for k, v in dict(configuration or {}).items():
            if k in SEARCH_CONFIG_DEFAULTS:
                values[k] = v
            else:
                warnings.warn(f"Invalid config key '{k}'. This item will be ignored.")

        if variant.is_logconcave or values["ridge_dim"] is None:
            ridge_dim = dimension - 1
        else:
            ridge_dim = int(values["ridge_dim"])
        if not 0 <= ridge_dim < dimension:
            raise DomainError(f"Invalid ridge dimension {ridge_dim} for d={dimension}.")

        return cls(
            h=float(h),
            tol=float(values["rel_tol"]) * float(h),
            max_iter=int(values["max_iter"]),
            tau=float(values["tau"]),
            ridge_dim=ridge_dim,
            variant=variant,
            align_tol=float(values["align_tol"]),
            weight_cutoff=float(values["weight_cutoff"]),
            min_effective_size=float(values["min_effective_size"]),
            ci_alpha=float(values["ci_alpha"]),
            ci_reps=int(values["ci_reps"]),
            ci_seed=int(values["ci_seed"]),
            **kwargs,
        )


class RidgeResult(NamedTuple):
    """Outcome of one search. Consists of (start, point, iterations, converged, interval_lo, interval_hi, flat_top, trace, direction, diagnostic, ci_lo, ci_hi)."""

    start: np.ndarray
    point: np.ndarray
    iterations: int
    converged: bool
    interval_lo: np.ndarray | None = None
    interval_hi: np.ndarray | None = None
    flat_top: bool = False
    trace: np.ndarray | None = None
    direction: np.ndarray | None = None
    diagnostic: str = ""
    ci_lo: np.ndarray | None = None
    ci_hi: np.ndarray | None = None


class MeanShiftVector(NamedTuple):
    """Shadow-kernel weighted mean minus the query point. Consists of (m)."""

    m: np.ndarray

    @property
    def norm(self) -> float:
        """Euclidean length of the mean shift."""
        return float(np.linalg.norm(self.m))


@functools.partial(jax.jit, static_argnames=("shadow",))
def _shadow_sums(points: chex.Array, x: chex.Array, h: float, shadow: ShadowKernel) -> tuple[chex.Array, chex.Array]:
    diffs = points - x
    g = shadow(jnp.sum(diffs**2, axis=1) / h**2)
    return jnp.sum(g), g @ diffs


def mean_shift_step(
    data: PointCloud | np.ndarray,
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
) -> MeanShiftVector:
    """Mean shift m = sum X_i g(||(X_i - x)/h||^2) / sum g(.) - x with the shadow kernel g = -k'.

    Args:
        data (PointCloud | np.ndarray): Sample.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.

    Returns:
        MeanShiftVector: Mean shift vector.
    """
    points = as_points(data)
    d = points.shape[1]
    kernel = kernel or Kernel.gaussian(d)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (d,) or not np.all(np.isfinite(x)):
        raise DomainError(f"Invalid query point {x} for dimension {d}.")
    if not (math.isfinite(h) and h > 0):
        raise DomainError(f"Invalid bandwidth: {h}")
    total, weighted = _shadow_sums(jnp.asarray(points), jnp.asarray(x), h, kernel.shadow())
    total = float(total)
    if not total >= MOMENT_FLOOR:
        raise EmptyNeighborhoodError(x.tolist(), h, total, MOMENT_FLOOR)
    return MeanShiftVector(m=np.asarray(weighted) / total)


def starting_grid(data: PointCloud | np.ndarray, spacing: float = 0.5, max_dist: float = 0.5) -> np.ndarray:
    """Axis-aligned grid over the bounding box of the data, restricted to nodes near the data.

    Nodes are lo + k * spacing per axis up to the upper corner of the box; nodes farther
    than max_dist from every data point are removed.

    Args:
        data (PointCloud | np.ndarray): Sample.
        spacing (float, optional): Grid spacing. Defaults to 0.5.
        max_dist (float, optional): Largest distance to the nearest data point. Defaults to 0.5.

    Returns:
        np.ndarray: (m, d) array of starting points in lexicographic order.
    """
    points = as_points(data)
    if not (math.isfinite(spacing) and spacing > 0):
        raise DomainError(f"Invalid grid spacing: {spacing}")
    if not (math.isfinite(max_dist) and max_dist > 0):
        raise DomainError(f"Invalid max_dist: {max_dist}")
    lo, hi = points.min(axis=0), points.max(axis=0)
    axes = [
        lo[j] + spacing * np.arange(int(math.floor((hi[j] - lo[j]) / spacing + 1e-9)) + 1)
        for j in range(points.shape[1])
    ]
    nodes = np.array(list(itertools.product(*axes)), dtype=np.float64)

    keep = np.zeros(nodes.shape[0], dtype=bool)
    for chunk in range(0, nodes.shape[0], 4096):
        block = nodes[chunk : chunk + 4096]
        keep[chunk : chunk + 4096] = cdist(block, points).min(axis=1) <= max_dist
    return nodes[keep]
