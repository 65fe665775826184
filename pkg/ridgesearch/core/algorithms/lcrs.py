"""Log-concave ridge search (LCRS) and its smoothed version (sLCRS)."""
from __future__ import annotations

import functools
import logging
import warnings
from typing import NamedTuple

import numpy as np
from ConfigSpace import Configuration, ConfigurationSpace, Float, Integer

from ridgesearch.core import logconcave
from ridgesearch.core.errors import DegenerateSampleError, DomainError
from ridgesearch.core.kernels import Kernel, require_kernel_conditions
from ridgesearch.core.local_moments import conditional_covariance
from ridgesearch.core.point_cloud import PointCloud, as_points
from ridgesearch.core.symmetric_eigen import spectral

from .algorithm import RidgeAlgorithm
from .common import RidgeResult, SearchConfig, Variant

logger = logging.getLogger(__name__)


class ProjectedSample(NamedTuple):
    """Weighted projection of the local sample onto the direction of smallest conditional variance. Consists of (direction, sample)."""

    direction: np.ndarray
    sample: logconcave.WeightedSample


@functools.lru_cache(maxsize=128)
def _critical_value(alpha: float, n: int, reps: int, seed: int) -> float:
    return logconcave.calibrate_critical_value(alpha, n, reps=reps, seed=seed)


def project(
    points: np.ndarray,
    x: np.ndarray,
    config: SearchConfig,
    previous: np.ndarray | None = None,
) -> ProjectedSample:
    """Projects the kernel-weighted sample at x onto the smallest eigenvector of the conditional covariance.

    The direction is flipped to agree with `previous`; weights below weight_cutoff times the
    largest weight are dropped.

    Args:
        points (np.ndarray): Sample.
        x (np.ndarray): Current point.
        config (SearchConfig): Search configuration.
        previous (np.ndarray | None, optional): Direction of the previous iteration. Defaults to None.

    Returns:
        ProjectedSample: Direction and weighted projected sample.
    """
    covariance = conditional_covariance(points, x, config.h, config.kernel)
    direction = spectral(covariance.sigma).eigenvectors[:, -1]
    if previous is not None and direction @ previous < 0:
        direction = -direction

    weights = covariance.base.weights
    keep = weights >= config.weight_cutoff * weights.max()
    kept = weights[keep] / weights[keep].sum()
    n_eff = 1.0 / float(np.sum(kept**2))
    if n_eff < config.min_effective_size:
        raise DegenerateSampleError(f"Effective sample size {n_eff:.2f} below {config.min_effective_size}.")
    sample = logconcave.make_weighted_sample((points[keep] - x) @ direction, kept)
    if sample.z.size < 2:
        raise DegenerateSampleError("Fewer than 2 distinct projected points.")
    return ProjectedSample(direction=direction, sample=sample)


def _step(fit: logconcave.LogConcaveFit, sample: logconcave.WeightedSample, smoothed: bool) -> float:
    if not smoothed:
        return logconcave.mode(fit)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sf = logconcave.smooth(fit, logconcave.weighted_variance(sample))
    for w in caught:
        logger.debug(f"sLCRS smoothing fallback: {w.message}")
    return logconcave.smoothed_mode(sf)


def check_kernel(kernel: Kernel | None, dimension: int) -> None:
    """Raises a DomainError unless the kernel may be used for log-concave ridge search.

    The standard Gaussian satisfies the kernel conditions in every dimension; any other
    kernel has to pass verify_kernel_conditions.

    Args:
        kernel (Kernel | None): Kernel of the search, Gaussian if None.
        dimension (int): Dimension of the sample.
    """
    if kernel is None or kernel == Kernel.gaussian(dimension):
        return
    if kernel.dimension != dimension:
        raise DomainError(f"Kernel dimension {kernel.dimension} does not match data dimension {dimension}.")
    require_kernel_conditions(kernel)


def _search(data: PointCloud | np.ndarray, start: np.ndarray, config: SearchConfig, smoothed: bool) -> RidgeResult:
    points = as_points(data)
    if config.ridge_dim != points.shape[1] - 1:
        raise DomainError(f"Log-concave ridge search needs ridge_dim = d - 1, got {config.ridge_dim}.")
    check_kernel(config.kernel, points.shape[1])
    start = np.asarray(start, dtype=np.float64)
    x = start.copy()
    trace = [x.copy()] if config.record_trace else None

    direction = None
    projected = None
    origin = x
    interval = None
    flat_top = False
    iterations = 0
    converged = False
    diagnostic = "max_iter reached"
    while True:
        try:
            projected = project(points, x, config, direction)
        except DegenerateSampleError as e:
            diagnostic = str(e)
            logger.debug(f"Search from {start.tolist()} stopped: {e}")
            break
        direction = projected.direction
        origin = x
        fit = logconcave.fit(projected.sample)
        lo, hi = logconcave.threshold_interval(fit, config.tau)
        interval = (x + lo * direction, x + hi * direction)
        flat_top = fit.flat_top
        m = _step(fit, projected.sample, smoothed)
        if abs(m) <= config.tol:
            converged, diagnostic = True, ""
            break
        if iterations >= config.max_iter:
            break
        x = x + m * direction
        iterations += 1
        if trace is not None:
            trace.append(x.copy())

    ci = None
    if config.ci_alpha > 0 and projected is not None:
        ci = _uncertainty_segment(projected, origin, config)

    logger.debug(f"Search from {start.tolist()} stopped after {iterations} iterations, converged={converged}.")
    return RidgeResult(
        start=start,
        point=x,
        iterations=iterations,
        converged=converged,
        interval_lo=None if interval is None else interval[0],
        interval_hi=None if interval is None else interval[1],
        flat_top=flat_top,
        trace=None if trace is None else np.array(trace),
        direction=direction,
        diagnostic=diagnostic,
        ci_lo=None if ci is None else ci[0],
        ci_hi=None if ci is None else ci[1],
    )


def _uncertainty_segment(
    projected: ProjectedSample, origin: np.ndarray, config: SearchConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Likelihood ratio interval of the last projected sample, mapped to the line origin + t v."""
    n = max(2, int(round(projected.sample.n_eff)))
    critical_value = _critical_value(config.ci_alpha, n, config.ci_reps, config.ci_seed)
    ci = logconcave.lr_confidence_interval(projected.sample, config.ci_alpha, critical_value, check_monotone=False)
    return origin + ci.lo * projected.direction, origin + ci.hi * projected.direction


def lcrs(data: PointCloud | np.ndarray, start: np.ndarray, config: SearchConfig) -> RidgeResult:
    """Log-concave ridge search.

    Each iteration projects the kernel-weighted sample onto v, the eigenvector of the smallest
    eigenvalue of the conditional covariance at x, fits a weighted log-concave density to the
    projections and moves to its mode, x <- x + m v, until |m| <= tol. The threshold interval
    of the last fit at level tau is returned as an uncertainty segment along v.

    Args:
        data (PointCloud | np.ndarray): Sample.
        start (np.ndarray): Starting point.
        config (SearchConfig): Search configuration with variant lcrs.

    Returns:
        RidgeResult: Ridge point close to the start.
    """
    if config.variant != Variant.LCRS:
        raise DomainError(f"Expected an LCRS configuration, got {config.variant.value}.")
    return _search(data, start, config, smoothed=False)


def slcrs(data: PointCloud | np.ndarray, start: np.ndarray, config: SearchConfig) -> RidgeResult:
    """Smoothed log-concave ridge search, LCRS stepping to the mode of the smoothed fit.

    Args:
        data (PointCloud | np.ndarray): Sample.
        start (np.ndarray): Starting point.
        config (SearchConfig): Search configuration with variant slcrs.

    Returns:
        RidgeResult: Ridge point close to the start.
    """
    if config.variant != Variant.SLCRS:
        raise DomainError(f"Expected an sLCRS configuration, got {config.variant.value}.")
    return _search(data, start, config, smoothed=True)


def _logconcave_config_space(name: str, seed: int | None) -> ConfigurationSpace:
    return ConfigurationSpace(
        name=name,
        seed=seed,
        space={
            "rel_tol": Float("rel_tol", (1e-10, 1e-1), default=1e-4, log=True),
            "max_iter": Integer("max_iter", (1, 100000), default=500, log=True),
            "tau": Float("tau", (1e-3, 1.0), default=0.9),
            "weight_cutoff": Float("weight_cutoff", (0.0, 1e-3), default=1e-12),
            "min_effective_size": Float("min_effective_size", (2.0, 1000.0), default=5.0),
            "ci_alpha": Float("ci_alpha", (0.0, 0.5), default=0.0),
        },
    )


class LCRS(RidgeAlgorithm):
    """Log-concave ridge search."""

    name = "lcrs"
    variant = Variant.LCRS

    @staticmethod
    def get_config_space(seed: int | None = None) -> ConfigurationSpace:
        """Returns the hyperparameter configuration space for LCRS."""
        return _logconcave_config_space("LCRSConfigSpace", seed)

    @staticmethod
    def get_default_config() -> Configuration:
        """Returns the default hyperparameter configuration for LCRS."""
        return LCRS.get_config_space().get_default_configuration()

    def search(self, data: PointCloud | np.ndarray, start: np.ndarray) -> RidgeResult:
        """Runs LCRS from one starting point."""
        return lcrs(data, start, self.config)


class SLCRS(RidgeAlgorithm):
    """Smoothed log-concave ridge search."""

    name = "slcrs"
    variant = Variant.SLCRS

    @staticmethod
    def get_config_space(seed: int | None = None) -> ConfigurationSpace:
        """Returns the hyperparameter configuration space for sLCRS."""
        return _logconcave_config_space("SLCRSConfigSpace", seed)

    @staticmethod
    def get_default_config() -> Configuration:
        """Returns the default hyperparameter configuration for sLCRS."""
        return SLCRS.get_config_space().get_default_configuration()

    def search(self, data: PointCloud | np.ndarray, start: np.ndarray) -> RidgeResult:
        """Runs sLCRS from one starting point."""
        return slcrs(data, start, self.config)
