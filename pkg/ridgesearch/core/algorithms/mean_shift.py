"""Mean shift mode search."""
from __future__ import annotations

import logging

import numpy as np
from ConfigSpace import Configuration, ConfigurationSpace, Float, Integer

from ridgesearch.core.errors import DomainError, RidgeSearchError
from ridgesearch.core.local_moments import kde
from ridgesearch.core.point_cloud import PointCloud, as_points

from .algorithm import RidgeAlgorithm
from .common import RidgeResult, SearchConfig, Variant, mean_shift_step

logger = logging.getLogger(__name__)

# slack of the ascent check in debug mode
ASCENT_SLACK = 1e-12


def mean_shift(data: PointCloud | np.ndarray, start: np.ndarray, config: SearchConfig) -> RidgeResult:
    """Iterates x <- x + m(x) until ||m|| <= tol or max_iter steps were taken.

    In debug mode the kernel density estimate is checked to be non-decreasing along the iterates.

    Args:
        data (PointCloud | np.ndarray): Sample.
        start (np.ndarray): Starting point.
        config (SearchConfig): Search configuration with variant mean_shift.

    Returns:
        RidgeResult: Mode estimate close to the start.
    """
    if config.variant != Variant.MEAN_SHIFT:
        raise DomainError(f"Expected a mean shift configuration, got {config.variant.value}.")
    points = as_points(data)
    start = np.asarray(start, dtype=np.float64)
    x = start.copy()
    trace = [x.copy()] if config.record_trace else None
    density = kde(points, x, config.h, config.kernel) if config.debug else None

    iterations = 0
    converged = False
    while True:
        step = mean_shift_step(points, x, config.h, config.kernel)
        if step.norm <= config.tol:
            converged = True
            break
        if iterations >= config.max_iter:
            break
        x = x + step.m
        iterations += 1
        if trace is not None:
            trace.append(x.copy())
        if density is not None:
            updated = kde(points, x, config.h, config.kernel)
            if updated < density - ASCENT_SLACK:
                raise RidgeSearchError(f"Kernel density decreased from {density} to {updated} at iteration {iterations}.")
            density = updated

    logger.debug(f"Mean shift from {start.tolist()} stopped after {iterations} iterations, converged={converged}.")
    return RidgeResult(
        start=start,
        point=x,
        iterations=iterations,
        converged=converged,
        trace=None if trace is None else np.array(trace),
        diagnostic="" if converged else "max_iter reached",
    )


class MeanShift(RidgeAlgorithm):
    """Mean shift mode search."""

    name = "mean_shift"
    variant = Variant.MEAN_SHIFT

    @staticmethod
    def get_config_space(seed: int | None = None) -> ConfigurationSpace:
        """Returns the hyperparameter configuration space for mean shift."""
        return ConfigurationSpace(
            name="MeanShiftConfigSpace",
            seed=seed,
            space={
                "rel_tol": Float("rel_tol", (1e-10, 1e-1), default=1e-4, log=True),
                "max_iter": Integer("max_iter", (1, 100000), default=500, log=True),
                "tau": Float("tau", (1e-3, 1.0), default=0.9),
            },
        )

    @staticmethod
    def get_default_config() -> Configuration:
        """Returns the default hyperparameter configuration for mean shift."""
        return MeanShift.get_config_space().get_default_configuration()

    def search(self, data: PointCloud | np.ndarray, start: np.ndarray) -> RidgeResult:
        """Runs mean shift from one starting point."""
        return mean_shift(data, start, self.config)
