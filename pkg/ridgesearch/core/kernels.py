"""Radially symmetric kernels, their shadow kernels and checks of the kernel conditions K0 to K5."""
from __future__ import annotations

import dataclasses
import functools
import math
from collections.abc import Callable
from typing import Literal, NamedTuple

import jax
import jax.numpy as jnp
import numpy as np
from scipy import integrate

from .errors import DomainError

ConditionStatus = Literal["pass", "fail", "undetermined"]

# Gauss-Legendre node counts per axis, refined until two successive rules agree
_NODE_SCHEDULE = {1: (16, 32, 64, 128, 256, 512), 2: (16, 32, 64, 128, 256), 3: (16, 32, 64)}
_QUADRATURE_RADIUS = 8.0
_K5_GRID_RADIUS = 3.0


def gaussian_profile(y: jax.Array) -> jax.Array:
    """Gaussian profile k(y) = exp(-y/2)."""
    return jnp.exp(-0.5 * y)


def ball_profile(y: jax.Array) -> jax.Array:
    """Uniform profile on the unit ball, k(y) = 1{y <= 1}."""
    return jnp.where(y <= 1.0, 1.0, 0.0)


@dataclasses.dataclass(frozen=True)
class Kernel:
    """Rotationally symmetric kernel K(z) = c * k(||z||^2).

    Kernels are immutable and hashable, so they can be passed as static arguments
    to jitted functions and shared between threads.
    """

    dimension: int
    profile: Callable[[jax.Array], jax.Array]
    normalization: float
    name: str = "custom"

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise DomainError(f"Invalid kernel dimension: {self.dimension}")
        if not (math.isfinite(self.normalization) and self.normalization > 0):
            raise DomainError(f"Invalid kernel normalization: {self.normalization}")

    @classmethod
    def gaussian(cls, dimension: int) -> Kernel:
        """The standard Gaussian kernel in the given dimension."""
        return cls(
            dimension=dimension,
            profile=gaussian_profile,
            normalization=(2.0 * math.pi) ** (-dimension / 2),
            name="gaussian",
        )

    @classmethod
    def uniform_ball(cls, dimension: int) -> Kernel:
        """The uniform density on the unit ball."""
        return cls(
            dimension=dimension,
            profile=ball_profile,
            normalization=math.gamma(dimension / 2 + 1) / math.pi ** (dimension / 2),
            name="uniform_ball",
        )

    def __call__(self, squared_norms: jax.Array) -> jax.Array:
        """Evaluates K at points given by their squared norms."""
        return self.normalization * self.profile(squared_norms)

    def scaled(self, squared_norms: jax.Array, h: float | jax.Array) -> jax.Array:
        """Evaluates K_h(z) = h^-d K(z/h) at points given by their squared norms ||z||^2."""
        return h ** (-self.dimension) * self(squared_norms / h**2)

    def shadow(self) -> ShadowKernel:
        """Returns the shadow kernel with profile g = -k'."""
        return _shadow_of(self)


@dataclasses.dataclass(frozen=True)
class ShadowKernel:
    """Shadow kernel G(z) = c_g * g(||z||^2) of a kernel with profile k, where g = -k'."""

    dimension: int
    profile: Callable[[jax.Array], jax.Array]
    normalization: float

    def __call__(self, squared_norms: jax.Array) -> jax.Array:
        """Evaluates G at points given by their squared norms."""
        return self.normalization * self.profile(squared_norms)


@functools.lru_cache(maxsize=None)
def _shadow_of(kernel: Kernel) -> ShadowKernel:
    d = kernel.dimension
    if kernel.profile is gaussian_profile:
        # -k' = exp(-y/2)/2 exactly, so G = K
        return ShadowKernel(
            dimension=d,
            profile=_gaussian_shadow_profile,
            normalization=2.0 * (2.0 * math.pi) ** (-d / 2),
        )

    profile = profile_derivatives(kernel)[0]

    def shadow_profile(y: jax.Array) -> jax.Array:
        return -profile(y)

    sphere = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
    mass, _ = integrate.quad(
        lambda r: float(shadow_profile(jnp.asarray(r * r))) * r ** (d - 1), 0.0, np.inf
    )
    mass *= sphere
    if not mass > 0:
        raise DomainError(
            f"Kernel '{kernel.name}' has no integrable shadow kernel (integral of -k' is {mass})."
        )
    return ShadowKernel(dimension=d, profile=shadow_profile, normalization=1.0 / mass)


def _gaussian_shadow_profile(y: jax.Array) -> jax.Array:
    return 0.5 * jnp.exp(-0.5 * y)


@functools.lru_cache(maxsize=None)
def profile_derivatives(
    kernel: Kernel,
) -> tuple[Callable[[jax.Array], jax.Array], Callable[[jax.Array], jax.Array]]:
    """Returns the elementwise first and second derivatives k' and k'' of the kernel profile.

    Args:
        kernel (Kernel): Kernel whose profile is differentiated.

    Returns:
        tuple[Callable, Callable]: Vectorized k' and k''.
    """
    first = jax.grad(kernel.profile)
    second = jax.grad(first)
    return jax.vmap(first), jax.vmap(second)


def kernel_eval(kernel: Kernel, z: np.ndarray | list[float], h: float) -> float:
    """Evaluates the rescaled kernel K_h(z) = h^-d c k(||z/h||^2).

    Args:
        kernel (Kernel): Kernel.
        z (np.ndarray | list[float]): Point of length d.
        h (float): Bandwidth.

    Returns:
        float: Kernel value.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (kernel.dimension,):
        raise DomainError(f"Expected a vector of length {kernel.dimension}, got shape {z.shape}.")
    if not np.all(np.isfinite(z)) or not math.isfinite(h):
        raise DomainError(f"Non-finite kernel argument z={z}, h={h}.")
    if h <= 0:
        raise DomainError(f"Invalid bandwidth: {h}")
    return float(kernel.scaled(jnp.sum(jnp.asarray(z) ** 2), h))


class KernelConditionReport(NamedTuple):
    """Outcome of the kernel condition checks. Consists of (status, integral, second_moment, mu4, mu22, quadrature_error, quadrature_nodes, k5_grid_radius, k5_grid_points)."""

    status: dict[str, ConditionStatus]
    integral: float
    second_moment: np.ndarray
    mu4: float
    mu22: float
    quadrature_error: float
    quadrature_nodes: int
    k5_grid_radius: float
    k5_grid_points: int

    @property
    def passed(self) -> bool:
        """Whether every condition passed."""
        return all(s == "pass" for s in self.status.values())


def _tensor_rule(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes = nodes * _QUADRATURE_RADIUS
    weights = weights * _QUADRATURE_RADIUS
    grids = np.meshgrid(*([nodes] * d), indexing="ij")
    weight_grids = np.meshgrid(*([weights] * d), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    return points, np.prod(np.stack([w.ravel() for w in weight_grids], axis=1), axis=1)


def _moment_estimates(kernel: Kernel, n: int) -> np.ndarray:
    """Integral, second moment matrix, mu4 and mu22 flattened into one vector."""
    points, weights = _tensor_rule(n, kernel.dimension)
    values = np.asarray(kernel(jnp.sum(jnp.asarray(points) ** 2, axis=1))) * weights
    integral = values.sum()
    second = (points.T * values) @ points
    mu4 = np.sum(values * points[:, 0] ** 4)
    mu22 = np.sum(values * points[:, 0] ** 2 * points[:, 1] ** 2) if kernel.dimension > 1 else 1.0
    return np.concatenate([[integral], second.ravel(), [mu4, mu22]])


def _judge(deviation: float, error: float, converged: bool, tol: float) -> ConditionStatus:
    if converged:
        return "pass" if deviation <= tol else "fail"
    if deviation > error + tol:
        return "fail"
    return "undetermined"


def _symmetry_status(kernel: Kernel, transforms: list[np.ndarray], rtol: float) -> ConditionStatus:
    rng = np.random.default_rng(0)
    for transform in transforms:
        z = 2.0 * rng.normal(size=kernel.dimension)
        base = kernel(jnp.sum(jnp.asarray(z) ** 2))
        moved = kernel(jnp.sum(jnp.asarray(transform @ z) ** 2))
        if abs(float(moved) - float(base)) > rtol * max(abs(float(base)), 1e-300):
            return "fail"
    return "pass"


def _k5_status(kernel: Kernel) -> tuple[ConditionStatus, int]:
    d = kernel.dimension
    per_axis = 7 if d <= 2 else 5
    axis = np.linspace(-_K5_GRID_RADIUS, _K5_GRID_RADIUS, per_axis)
    grid = np.stack([g.ravel() for g in np.meshgrid(*([axis] * d), indexing="ij")], axis=1)

    def log_kernel(z: jax.Array) -> jax.Array:
        return jnp.log(kernel(jnp.sum(z**2)))

    hessians = np.asarray(jax.vmap(jax.hessian(log_kernel))(jnp.asarray(grid)))
    if not np.all(np.isfinite(hessians)):
        return "fail", len(grid)
    largest = np.linalg.eigvalsh(hessians).max()
    return ("pass" if largest <= -1e-8 else "fail"), len(grid)


@functools.lru_cache(maxsize=None)
def verify_kernel_conditions(kernel: Kernel, tol: float = 1e-6) -> KernelConditionReport:
    """Checks the kernel conditions K0 to K5 numerically.

    Moments are computed with tensor-product Gauss-Legendre rules on [-8, 8]^d, doubling
    the number of nodes until two successive rules agree within `tol`. A condition whose
    estimate is within the remaining quadrature error of its target is "undetermined".
    Log-concavity (K5) is checked on a grid over [-3, 3]^d only.

    Args:
        kernel (Kernel): Kernel to check, dimension at most 3.
        tol (float, optional): Quadrature tolerance. Defaults to 1e-6.

    Returns:
        KernelConditionReport: Per-condition status and the computed moments.
    """
    d = kernel.dimension
    if d not in _NODE_SCHEDULE:
        raise DomainError(f"Kernel conditions can only be checked for d <= 3, got d={d}.")

    previous = None
    converged = False
    error = math.inf
    nodes = 0
    estimate = np.empty(0)
    for nodes in _NODE_SCHEDULE[d]:
        estimate = _moment_estimates(kernel, nodes)
        if previous is not None:
            error = float(np.max(np.abs(estimate - previous)))
            if error <= tol:
                converged = True
                break
        previous = estimate

    integral = float(estimate[0])
    second = estimate[1 : 1 + d * d].reshape(d, d)
    mu4, mu22 = float(estimate[-2]), float(estimate[-1])

    rng = np.random.default_rng(1)
    flips = [np.diag(rng.choice([-1.0, 1.0], size=d)) for _ in range(10)]
    permutations = [np.eye(d)[rng.permutation(d)] for _ in range(10)]
    rotations = [np.linalg.qr(rng.normal(size=(d, d)))[0] for _ in range(10)]
    k5, grid_points = _k5_status(kernel)

    status: dict[str, ConditionStatus] = {
        "K0": _judge(abs(integral - 1.0), error, converged, tol),
        "K1": _symmetry_status(kernel, flips + permutations, 1e-12),
        "K2": _judge(float(np.max(np.abs(second - np.eye(d)))), error, converged, tol),
        "K3": _judge(max(abs(mu4 - 3.0), abs(mu22 - 1.0)), error, converged, tol),
        "K4": _symmetry_status(kernel, rotations, 1e-10),
        "K5": k5,
    }
    return KernelConditionReport(
        status=status,
        integral=integral,
        second_moment=second,
        mu4=mu4,
        mu22=mu22 if d > 1 else math.nan,
        quadrature_error=error,
        quadrature_nodes=nodes,
        k5_grid_radius=_K5_GRID_RADIUS,
        k5_grid_points=grid_points,
    )


def require_kernel_conditions(kernel: Kernel) -> None:
    """Raises a DomainError unless all kernel conditions pass.

    Args:
        kernel (Kernel): Kernel to be used for log-concave ridge search.
    """
    report = verify_kernel_conditions(kernel)
    if not report.passed:
        failed = {k: v for k, v in report.status.items() if v != "pass"}
        raise DomainError(f"Kernel '{kernel.name}' violates kernel conditions: {failed}")
