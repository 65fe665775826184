"""Subspace constrained mean shift (SCMS)."""
from __future__ import annotations

import logging

import numpy as np
from ConfigSpace import Configuration, ConfigurationSpace, Float, Integer

from ridgesearch.core.errors import DomainError
from ridgesearch.core.local_moments import kde_derivatives
from ridgesearch.core.point_cloud import PointCloud, as_points
from ridgesearch.core.symmetric_eigen import spectral, v_parallel, v_perp

from .algorithm import RidgeAlgorithm
from .common import RidgeResult, SearchConfig, Variant, mean_shift_step

logger = logging.getLogger(__name__)


def _gradient_aligned(gradient: np.ndarray, hessian: np.ndarray, parallel: np.ndarray, perp: np.ndarray, tol: float) -> bool:
    """Whether the gradient is an eigenvector of the Hessian lying in the ridge tangent space."""
    if parallel.shape[1] == 0:
        return False
    hg = hessian @ gradient
    scale = np.linalg.norm(gradient) * np.linalg.norm(hg)
    if scale == 0:
        return False
    if abs(gradient @ hg) < (1.0 - tol) * scale:
        return False
    return bool(np.linalg.norm(perp.T @ gradient) <= np.linalg.norm(parallel.T @ gradient))


def scms(data: PointCloud | np.ndarray, start: np.ndarray, config: SearchConfig) -> RidgeResult:
    """Iterates x <- x + V V^T m(x), V spanning the d - s most negative curvature directions of log f.

    H is the closed-form Hessian of the log kernel density estimate. The search stops when
    the projected step is at most tol or when the gradient is aligned with an eigenvector
    of H inside the ridge tangent space.

    Args:
        data (PointCloud | np.ndarray): Sample of dimension d >= 2.
        start (np.ndarray): Starting point.
        config (SearchConfig): Search configuration with variant scms.

    Returns:
        RidgeResult: Ridge point close to the start.
    """
    if config.variant != Variant.SCMS:
        raise DomainError(f"Expected an SCMS configuration, got {config.variant.value}.")
    points = as_points(data)
    d = points.shape[1]
    if d < 2:
        raise DomainError("SCMS needs data of dimension at least 2.")
    s = config.ridge_dim
    start = np.asarray(start, dtype=np.float64)
    x = start.copy()
    trace = [x.copy()] if config.record_trace else None

    iterations = 0
    converged = False
    direction = None
    diagnostic = "max_iter reached"
    while True:
        derivatives = kde_derivatives(points, x, config.h, config.kernel)
        decomposition = spectral(derivatives.log_hessian)
        perp = v_perp(decomposition, s)
        direction = perp[:, 0]
        step = perp @ (perp.T @ mean_shift_step(points, x, config.h, config.kernel).m)
        if np.linalg.norm(step) <= config.tol:
            converged, diagnostic = True, ""
            break
        if _gradient_aligned(derivatives.gradient, derivatives.log_hessian, v_parallel(decomposition, s), perp, config.align_tol):
            converged, diagnostic = True, ""
            logger.debug(f"SCMS gradient aligned at iteration {iterations}.")
            break
        if iterations >= config.max_iter:
            break
        x = x + step
        iterations += 1
        if trace is not None:
            trace.append(x.copy())

    logger.debug(f"SCMS from {start.tolist()} stopped after {iterations} iterations, converged={converged}.")
    return RidgeResult(
        start=start,
        point=x,
        iterations=iterations,
        converged=converged,
        trace=None if trace is None else np.array(trace),
        direction=direction,
        diagnostic=diagnostic,
    )


class SCMS(RidgeAlgorithm):
    """Subspace constrained mean shift."""

    name = "scms"
    variant = Variant.SCMS

    @staticmethod
    def get_config_space(seed: int | None = None) -> ConfigurationSpace:
        """Returns the hyperparameter configuration space for SCMS.

        The ridge_dim default of 1 belongs to sampled configurations. Without a configuration,
        make_algorithm searches (d - 1)-dimensional ridges.
        """
        return ConfigurationSpace(
            name="SCMSConfigSpace",
            seed=seed,
            space={
                "rel_tol": Float("rel_tol", (1e-10, 1e-1), default=1e-4, log=True),
                "max_iter": Integer("max_iter", (1, 100000), default=500, log=True),
                "tau": Float("tau", (1e-3, 1.0), default=0.9),
                "ridge_dim": Integer("ridge_dim", (0, 8), default=1),
                "align_tol": Float("align_tol", (1e-14, 1e-1), default=1e-8, log=True),
            },
        )

    @staticmethod
    def get_default_config() -> Configuration:
        """Returns the default hyperparameter configuration for SCMS."""
        return SCMS.get_config_space().get_default_configuration()

    def search(self, data: PointCloud | np.ndarray, start: np.ndarray) -> RidgeResult:
        """Runs SCMS from one starting point."""
        return scms(data, start, self.config)
