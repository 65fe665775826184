"""Noisy circle model: sampling, density, true ridge and Hausdorff evaluation."""
from __future__ import annotations

import dataclasses
import math

import jax
import numpy as np
from scipy import special
from scipy.spatial.distance import cdist

from .errors import DomainError
from .point_cloud import PointCloud, as_points, default_labels

_SERIES_CUTOFF = 30.0
_MAX_TERMS = 100_000


@dataclasses.dataclass(frozen=True)
class CircleModel:
    """X = r (cos 2 pi U, sin 2 pi U) + sigma Z with U uniform on [0, 1] and Z standard normal."""

    r: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.r) and self.r > 0):
            raise DomainError(f"Invalid circle radius: {self.r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"Invalid noise level: {self.sigma}")

    @property
    def alpha(self) -> float:
        """Bessel argument scale r / sigma^2."""
        return self.r / self.sigma**2


def sample_circle(model: CircleModel, n: int, seed: int = 0) -> PointCloud:
    """Draws n points from the noisy circle model with a threefry counter-based generator.

    Args:
        model (CircleModel): Circle model.
        n (int): Number of points, n >= 1.
        seed (int, optional): Seed. Defaults to 0.

    Returns:
        PointCloud: Sample with labels x_1, x_2.
    """
    if n < 1:
        raise DomainError(f"Invalid sample size: {n}")
    angle_key, noise_key = jax.random.split(jax.random.key(seed))
    u = np.asarray(jax.random.uniform(angle_key, (n,)), dtype=np.float64)
    z = np.asarray(jax.random.normal(noise_key, (n, 2)), dtype=np.float64)
    points = model.r * np.column_stack([np.cos(2.0 * math.pi * u), np.sin(2.0 * math.pi * u)]) + model.sigma * z
    return PointCloud(points=points, labels=default_labels(2))


def bessel_ratio(t: float) -> float:
    """I_1(t) / I_0(t), by power series for t <= 30 and by continued fraction beyond.

    Args:
        t (float): Argument, t >= 0.

    Returns:
        float: Ratio in [0, 1).
    """
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"Invalid Bessel argument: {t}")
    if t == 0:
        return 0.0
    if t <= _SERIES_CUTOFF:
        return t / _nu_series(t)

    # modified Lentz for 1/(2/t + 1/(4/t + 1/(6/t + ...)))
    tiny = 1e-300
    f = c = tiny
    d = 0.0
    for k in range(1, _MAX_TERMS):
        b = 2.0 * k / t
        d = b + d
        d = 1.0 / (d if d != 0 else tiny)
        c = b + 1.0 / c
        if c == 0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return f
    raise DomainError(f"Continued fraction for I1/I0 did not converge at t={t}.")


def _nu_series(t: float) -> float:
    """2 S0 / S1 with S0 = sum a_k, S1 = sum a_k / (k + 1), a_k = (t^2/4)^k / (k!)^2."""
    quarter = 0.25 * t * t
    term = 1.0
    s0 = s1 = 1.0
    k = 0
    while True:
        k += 1
        term *= quarter / (k * k)
        s0 += term
        s1 += term / (k + 1)
        if term <= 1e-16 * s1 and k * k > quarter:
            break
    return 2.0 * s0 / s1


def bessel_nu(t: float) -> float:
    """nu(t) = t I_0(t) / I_1(t), strictly increasing and convex with nu(0+) = 2.

    Args:
        t (float): Argument, t >= 0.

    Returns:
        float: nu(t).
    """
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"Invalid Bessel argument: {t}")
    if t == 0:
        return 2.0
    if t <= _SERIES_CUTOFF:
        return _nu_series(t)
    return t / bessel_ratio(t)


def log_bessel_i0(t: np.ndarray | float) -> np.ndarray:
    """log I_0(t) from the power series summed in log space, so large arguments do not overflow."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    terms = int(math.ceil(float(np.max(t, initial=0.0)))) + 40
    k = np.arange(terms, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_half = np.log(0.5 * t)[..., None]
    log_terms = np.where(k == 0, 0.0, 2.0 * k * log_half) - 2.0 * special.gammaln(k + 1.0)
    return special.logsumexp(log_terms, axis=-1)


def _radii(x: np.ndarray | list[float]) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != 2:
        raise DomainError(f"Expected points in the plane, got shape {x.shape}.")
    if not np.all(np.isfinite(x)):
        raise DomainError("Non-finite point.")
    return np.linalg.norm(x, axis=-1)


def circle_log_density(model: CircleModel, x: np.ndarray | list[float]) -> np.ndarray | float:
    """log f(x) = -log(2 pi sigma^2) + log I_0(r ||x|| / sigma^2) - (||x||^2 + r^2) / (2 sigma^2)."""
    t = _radii(x)
    value = (
        -math.log(2.0 * math.pi * model.sigma**2)
        + log_bessel_i0(model.alpha * t)
        - (t**2 + model.r**2) / (2.0 * model.sigma**2)
    )
    return float(value) if np.ndim(value) == 0 else value


def circle_density(model: CircleModel, x: np.ndarray | list[float]) -> np.ndarray | float:
    """Density of the noisy circle model at a point or an (m, 2) array of points.

    Args:
        model (CircleModel): Circle model.
        x (np.ndarray | list[float]): Point(s).

    Returns:
        np.ndarray | float: Density value(s).
    """
    value = np.exp(circle_log_density(model, x))
    return float(value) if np.ndim(value) == 0 else value


def _ratio_derivative(u: float, ratio: float) -> float:
    """R'(u) = 1 - R/u - R^2 for R = I_1/I_0."""
    if u < 1e-6:
        return 0.5 - 3.0 * u * u / 16.0
    return 1.0 - ratio / u - ratio * ratio


def circle_log_density_hessian(model: CircleModel, x: np.ndarray | list[float]) -> np.ndarray:
    """Analytic Hessian of log f for the circle density.

    With l(t) the radial log-profile, D^2 log f = l''(t) e e^T + l'(t)/t (I - e e^T), e = x/||x||,
    where l'(t) = alpha R(alpha t) - t/sigma^2 and l''(t) = alpha^2 R'(alpha t) - 1/sigma^2.

    Args:
        model (CircleModel): Circle model.
        x (np.ndarray | list[float]): Point in the plane.

    Returns:
        np.ndarray: 2 x 2 matrix.
    """
    t = float(_radii(x))
    alpha, inv_var = model.alpha, 1.0 / model.sigma**2
    u = alpha * t
    ratio = bessel_ratio(u)
    radial = alpha**2 * _ratio_derivative(u, ratio) - inv_var
    if u < 1e-6:
        return radial * np.eye(2)
    tangential = (alpha * ratio - t * inv_var) / t
    e = np.asarray(x, dtype=np.float64) / t
    outer = np.outer(e, e)
    return radial * outer + tangential * (np.eye(2) - outer)


def true_ridge_radius(model: CircleModel, tol: float = 1e-10) -> float:
    """Radius of the density ridge of the circle model.

    The ridge is the origin when r / sigma <= sqrt(2); otherwise it is the circle of radius
    t solving nu(r t / sigma^2) = r^2 / sigma^2, found by bisection on [0, r].

    Args:
        model (CircleModel): Circle model.
        tol (float, optional): Bisection tolerance on the radius. Defaults to 1e-10.

    Returns:
        float: Ridge radius, 0 for the origin.
    """
    target = (model.r / model.sigma) ** 2
    # ratios within rounding of sqrt(2) belong to the origin case
    if target <= 2.0 * (1.0 + 1e-12):
        return 0.0
    lo, hi = 0.0, model.r
    while hi - lo > tol:
        middle = 0.5 * (lo + hi)
        if bessel_nu(model.alpha * middle) < target:
            lo = middle
        else:
            hi = middle
    return 0.5 * (lo + hi)


def ridge_oracle_points(model: CircleModel, k: int = 1000) -> np.ndarray:
    """k equally spaced points on the true ridge circle, or the origin alone.

    Args:
        model (CircleModel): Circle model.
        k (int, optional): Number of points. Defaults to 1000.

    Returns:
        np.ndarray: (k, 2) array, (1, 2) for the origin.
    """
    if k < 1:
        raise DomainError(f"Invalid number of oracle points: {k}")
    radius = true_ridge_radius(model)
    if radius == 0.0:
        return np.zeros((1, 2))
    angles = 2.0 * math.pi * np.arange(k) / k
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def hausdorff(a: PointCloud | np.ndarray, b: PointCloud | np.ndarray) -> float:
    """Hausdorff distance max(sup_a d(a, B), sup_b d(b, A)) by exact pairwise distances.

    Args:
        a (PointCloud | np.ndarray): First non-empty point set.
        b (PointCloud | np.ndarray): Second non-empty point set.

    Returns:
        float: Distance.
    """
    a, b = as_points(a), as_points(b)
    if a.shape[1] != b.shape[1]:
        raise DomainError(f"Dimension mismatch: {a.shape[1]} vs {b.shape[1]}.")
    distances = cdist(a, b)
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def radial_summary(points: PointCloud | np.ndarray) -> tuple[float, float]:
    """Mean and standard deviation of the distances of the points to the origin."""
    radii = np.linalg.norm(as_points(points), axis=1)
    return float(radii.mean()), float(radii.std())
