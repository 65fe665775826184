"""Kernel-weighted local moments, conditional covariance matrices and kernel density derivatives."""
from __future__ import annotations

import functools
import math
from collections.abc import Callable
from typing import TYPE_CHECKING, NamedTuple

import jax
import jax.numpy as jnp
import numpy as np

from .errors import DomainError, EmptyNeighborhoodError, QuadratureError
from .kernels import Kernel, profile_derivatives
from .point_cloud import PointCloud, as_points

if TYPE_CHECKING:
    import chex

MOMENT_FLOOR = 1e-300


class LocalMoments(NamedTuple):
    """Zeroth, first and second local moments at a query point. Consists of (s, s_vec, S_mat, weights)."""

    s: float
    s_vec: np.ndarray
    S_mat: np.ndarray
    weights: np.ndarray

    @property
    def effective_size(self) -> float:
        """Kish effective sample size (sum w)^2 / sum w^2 of the normalized weights."""
        return float(1.0 / np.sum(self.weights**2))


class ConditionalCovariance(NamedTuple):
    """Local conditional covariance. Consists of (sigma, mu, base)."""

    sigma: np.ndarray
    mu: np.ndarray
    base: LocalMoments


class KDEDerivatives(NamedTuple):
    """Kernel density estimate with derivatives. Consists of (value, gradient, hessian, log_hessian)."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray
    log_hessian: np.ndarray


def _check_query(points: np.ndarray, x: np.ndarray | list[float], h: float, kernel: Kernel) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (points.shape[1],):
        raise DomainError(f"Query point has shape {x.shape}, data has dimension {points.shape[1]}.")
    if kernel.dimension != points.shape[1]:
        raise DomainError(f"Kernel dimension {kernel.dimension} does not match data dimension {points.shape[1]}.")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"Non-finite query point: {x}")
    if not (math.isfinite(h) and h > 0):
        raise DomainError(f"Invalid bandwidth: {h}")
    return x


@functools.partial(jax.jit, static_argnames=("kernel",))
def _moment_sums(
    points: chex.Array, x: chex.Array, h: float, kernel: Kernel
) -> tuple[chex.Array, chex.Array, chex.Array, chex.Array]:
    """Kernel values K_h(X_i - x) and the three local moments."""
    n = points.shape[0]
    scaled = (points - x) / h
    k = kernel.scaled(jnp.sum(scaled**2, axis=1), h)
    s = jnp.sum(k) / n
    s_vec = k @ scaled / n
    S_mat = (scaled.T * k) @ scaled / n
    return k, s, s_vec, S_mat


def local_moments(
    data: PointCloud | np.ndarray,
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
    floor: float = MOMENT_FLOOR,
) -> LocalMoments:
    """Computes the local moments s, s_vec and S_mat of the sample around x.

    Args:
        data (PointCloud | np.ndarray): Sample of n points.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.
        floor (float, optional): Smallest admissible zeroth moment. Defaults to 1e-300.

    Returns:
        LocalMoments: Moments and normalized kernel weights.
    """
    points = as_points(data)
    kernel = kernel or Kernel.gaussian(points.shape[1])
    x = _check_query(points, x, h, kernel)
    k, s, s_vec, S_mat = _moment_sums(jnp.asarray(points), jnp.asarray(x), h, kernel)
    s = float(s)
    if not s >= floor:
        raise EmptyNeighborhoodError(x.tolist(), h, s, floor)
    k = np.asarray(k)
    S_mat = np.asarray(S_mat)
    return LocalMoments(
        s=s,
        s_vec=np.asarray(s_vec),
        S_mat=0.5 * (S_mat + S_mat.T),
        weights=k / k.sum(),
    )


def conditional_covariance(
    data: PointCloud | np.ndarray,
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
    floor: float = MOMENT_FLOOR,
) -> ConditionalCovariance:
    """Computes the local conditional covariance matrix and conditional mean at x.

    The covariance is the weighted covariance of the displacements X_i - x, computed in
    centered form, which equals h^2 (S_mat/s - s_vec s_vec^T / s^2).

    Args:
        data (PointCloud | np.ndarray): Sample of n points.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.
        floor (float, optional): Smallest admissible zeroth moment. Defaults to 1e-300.

    Returns:
        ConditionalCovariance: Covariance, conditional mean and the underlying moments.
    """
    points = as_points(data)
    base = local_moments(points, x, h, kernel, floor)
    x = np.asarray(x, dtype=np.float64)
    displacements = points - x
    mean = base.weights @ displacements
    centered = displacements - mean
    sigma = (centered.T * base.weights) @ centered
    return ConditionalCovariance(sigma=0.5 * (sigma + sigma.T), mu=x + mean, base=base)


def kde(
    data: PointCloud | np.ndarray,
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
) -> float:
    """Kernel density estimate f_{h,K}(x) = n^-1 sum K_h(X_i - x).

    Args:
        data (PointCloud | np.ndarray): Sample.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.

    Returns:
        float: Density estimate.
    """
    points = as_points(data)
    kernel = kernel or Kernel.gaussian(points.shape[1])
    x = _check_query(points, x, h, kernel)
    return float(_moment_sums(jnp.asarray(points), jnp.asarray(x), h, kernel)[1])


@functools.partial(jax.jit, static_argnames=("kernel",))
def _kde_derivative_sums(
    points: chex.Array, x: chex.Array, h: float, kernel: Kernel
) -> tuple[chex.Array, chex.Array, chex.Array]:
    n, d = points.shape
    first, second = profile_derivatives(kernel)
    diffs = points - x
    u = jnp.sum(diffs**2, axis=1) / h**2
    c = kernel.normalization / (n * h**d)
    value = c * jnp.sum(kernel.profile(u))
    k1 = first(u)
    k2 = second(u)
    gradient = -2.0 * c * (k1 @ diffs) / h**2
    hessian = c * (
        4.0 * (diffs.T * k2) @ diffs / h**4 + 2.0 * jnp.sum(k1) * jnp.eye(d) / h**2
    )
    return value, gradient, hessian


def kde_derivatives(
    data: PointCloud | np.ndarray,
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
    floor: float = MOMENT_FLOOR,
) -> KDEDerivatives:
    """Closed-form value, gradient and Hessians of the kernel density estimate.

    With u_i = ||X_i - x||^2 / h^2 the derivatives are Df = -2c/(nh^{d+2}) sum k'(u_i)(X_i - x)
    and D^2 f = c/(nh^d) sum (4k''(u_i)(X_i - x)(X_i - x)^T / h^4 + 2k'(u_i) I / h^2); the
    log-density Hessian is D^2 f / f - Df Df^T / f^2. k' and k'' are exact derivatives of the
    profile obtained by automatic differentiation.

    Args:
        data (PointCloud | np.ndarray): Sample.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.
        floor (float, optional): Smallest admissible density value. Defaults to 1e-300.

    Returns:
        KDEDerivatives: Density value, gradient, Hessian and Hessian of the log-density.
    """
    points = as_points(data)
    kernel = kernel or Kernel.gaussian(points.shape[1])
    x = _check_query(points, x, h, kernel)
    value, gradient, hessian = _kde_derivative_sums(jnp.asarray(points), jnp.asarray(x), h, kernel)
    value = float(value)
    if not value >= floor:
        raise EmptyNeighborhoodError(x.tolist(), h, value, floor)
    gradient = np.asarray(gradient)
    hessian = np.asarray(hessian)
    log_hessian = hessian / value - np.outer(gradient, gradient) / value**2
    return KDEDerivatives(
        value=value,
        gradient=gradient,
        hessian=0.5 * (hessian + hessian.T),
        log_hessian=0.5 * (log_hessian + log_hessian.T),
    )


def population_conditional_covariance(
    density: Callable[[np.ndarray], np.ndarray],
    x: np.ndarray | list[float],
    h: float,
    kernel: Kernel | None = None,
    tol: float = 1e-10,
    max_nodes: int = 256,
) -> np.ndarray:
    """Conditional covariance Var(X | X + Z_h = x) of a density by quadrature.

    Substituting y = x + h z, the conditional law of X has density proportional to
    K(z) f(x + h z). Moments are computed with tensor-product Gauss-Legendre rules
    on [-8, 8]^d, doubling the nodes until successive results agree within `tol`
    relative to h^2.

    Args:
        density (Callable[[np.ndarray], np.ndarray]): Vectorized density, maps (m, d) points to m values.
        x (np.ndarray | list[float]): Query point.
        h (float): Bandwidth.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.
        tol (float, optional): Relative tolerance. Defaults to 1e-10.
        max_nodes (int, optional): Largest number of nodes per axis. Defaults to 256.

    Returns:
        np.ndarray: d x d covariance matrix.
    """
    x = np.asarray(x, dtype=np.float64)
    d = x.shape[0]
    kernel = kernel or Kernel.gaussian(d)
    if not (math.isfinite(h) and h > 0):
        raise DomainError(f"Invalid bandwidth: {h}")

    previous = None
    n = 16
    while n <= max_nodes:
        nodes, weights = np.polynomial.legendre.leggauss(n)
        nodes, weights = 8.0 * nodes, 8.0 * weights
        grids = np.meshgrid(*([nodes] * d), indexing="ij")
        weight_grids = np.meshgrid(*([weights] * d), indexing="ij")
        z = np.stack([g.ravel() for g in grids], axis=1)
        w = np.prod(np.stack([g.ravel() for g in weight_grids], axis=1), axis=1)
        w = w * np.asarray(kernel(jnp.sum(jnp.asarray(z) ** 2, axis=1))) * np.asarray(density(x + h * z))
        mass = w.sum()
        if not mass > 0:
            raise QuadratureError(f"Density has no mass around x={x.tolist()} at h={h}.")
        w = w / mass
        mean = w @ z
        centered = z - mean
        sigma = h**2 * (centered.T * w) @ centered
        if previous is not None and np.max(np.abs(sigma - previous)) <= tol * h**2:
            return 0.5 * (sigma + sigma.T)
        previous = sigma
        n *= 2
    raise QuadratureError(
        f"Conditional covariance at x={x.tolist()}, h={h} did not converge with {max_nodes} nodes per axis."
    )


def sigma_lipschitz_constant(
    data: PointCloud | np.ndarray,
    h: float,
    hull_points: np.ndarray,
    kernel: Kernel | None = None,
) -> float:
    """Lipschitz constant L = 4 d M sqrt(L~) / m^2 of x -> Sigma(x) on the convex hull of the sample.

    L~ bounds the Lipschitz constants of the local moments up to order two,
    L~ = max(diam/h, 1)^2 (3 sup K + h^{-d-1} sup |grad K|); M >= 1 bounds those moments and
    m is the moment floor, both taken over `hull_points`, which should cover the hull densely.

    Args:
        data (PointCloud | np.ndarray): Sample.
        h (float): Bandwidth.
        hull_points (np.ndarray): Points of the convex hull used to estimate M and m.
        kernel (Kernel | None, optional): Kernel, Gaussian if None. Defaults to None.

    Returns:
        float: Lipschitz constant.
    """
    points = as_points(data)
    d = points.shape[1]
    kernel = kernel or Kernel.gaussian(d)
    diameter = float(np.max(np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)))

    radii = jnp.linspace(0.0, 10.0, 4001)
    first = profile_derivatives(kernel)[0]
    # |grad K(z)| = 2 c |k'(||z||^2)| ||z||
    sup_gradient = float(jnp.max(2.0 * kernel.normalization * jnp.abs(first(radii**2)) * radii))
    sup_kernel = float(jnp.max(kernel(radii**2)))
    scale = max(diameter / h, 1.0) ** 2
    lipschitz_moments = scale * (3.0 * sup_kernel + h ** (-d - 1) * sup_gradient)

    largest, smallest = 1.0, math.inf
    for y in np.asarray(hull_points, dtype=np.float64):
        moments = local_moments(points, y, h, kernel)
        largest = max(largest, moments.s, float(np.max(np.abs(moments.s_vec))), float(np.max(np.abs(moments.S_mat))))
        smallest = min(smallest, moments.s)
    return 4.0 * d * largest * math.sqrt(lipschitz_moments) / smallest**2
