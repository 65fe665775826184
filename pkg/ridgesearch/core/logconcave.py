"""Weighted univariate log-concave maximum likelihood estimation, its smoothed version and mode inference."""
from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence
from typing import NamedTuple

import jax
import numpy as np
from scipy import special

from .errors import DegenerateSampleError, DomainError, RidgeSearchError

logger = logging.getLogger(__name__)

DIRECTIONAL_TOL = 1e-10
# log-density differences below this count as a flat segment
FLAT_TOL = 1e-12
_SERIES_CUTOFF = 0.1
_SERIES_TERMS = 16
_MAX_NEWTON = 100


class WeightedSample(NamedTuple):
    """Weighted univariate sample with strictly increasing support. Consists of (z, w, n_eff)."""

    z: np.ndarray
    w: np.ndarray
    n_eff: float


class LogConcaveFit(NamedTuple):
    """Concave piecewise-linear log-density. Consists of (knots, phi, slopes, log_likelihood)."""

    knots: np.ndarray
    phi: np.ndarray
    slopes: np.ndarray
    log_likelihood: float

    @property
    def flat_top(self) -> bool:
        """Whether the log-density attains its maximum on an interval."""
        lo, hi = argmax_interval(self)
        return hi > lo


class SmoothedFit(NamedTuple):
    """Log-concave fit convolved with a centered Gaussian. Consists of (base, gamma, clamped)."""

    base: LogConcaveFit
    gamma: float
    clamped: bool


class ConfidenceInterval(NamedTuple):
    """Likelihood-ratio interval for the mode. Consists of (lo, hi, monotone)."""

    lo: float
    hi: float
    monotone: bool


def make_weighted_sample(z: np.ndarray | Sequence[float], w: np.ndarray | Sequence[float] | None = None) -> WeightedSample:
    """Sorts a weighted sample, merges coincident points and normalizes the weights.

    Args:
        z (np.ndarray | Sequence[float]): Observations.
        w (np.ndarray | Sequence[float] | None, optional): Positive weights, equal if None. Defaults to None.

    Returns:
        WeightedSample: Sample with strictly increasing z and weights summing to one.
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    w = np.full(z.shape, 1.0) if w is None else np.asarray(w, dtype=np.float64).ravel()
    if z.shape != w.shape or z.size == 0:
        raise DomainError(f"Invalid sample shapes z={z.shape}, w={w.shape}.")
    if not (np.all(np.isfinite(z)) and np.all(np.isfinite(w))):
        raise DomainError("Sample has non-finite values.")
    if np.any(w <= 0):
        raise DomainError("Sample weights must be positive.")
    w = w / w.sum()
    n_eff = float(1.0 / np.sum(w**2))
    order = np.argsort(z, kind="stable")
    z, w = z[order], w[order]
    support, index = np.unique(z, return_inverse=True)
    merged = np.zeros(support.shape)
    np.add.at(merged, index, w)
    return WeightedSample(z=support, w=merged / merged.sum(), n_eff=n_eff)


def weighted_variance(sample: WeightedSample) -> float:
    """Variance of the weighted empirical distribution."""
    mean = sample.w @ sample.z
    return float(sample.w @ (sample.z - mean) ** 2)


def _exp_moments(r: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, ...]:
    """Integrals of u^k exp((1-u) r + u s) over [0, 1] for k = 0, 1, 2 and of u(1-u) exp(...).

    Taylor series are used when |s - r| is small to avoid cancellation.
    """
    delta = s - r
    small = np.abs(delta) < _SERIES_CUTOFF
    dd = np.where(small, 1.0, delta)
    with np.errstate(over="ignore", invalid="ignore"):
        es, er = np.exp(s), np.exp(r)
        closed = (
            (es - er) / dd,
            (es * (dd - 1.0) + er) / dd**2,
            (es * (dd * dd - 2.0 * dd + 2.0) - 2.0 * er) / dd**3,
            (es * (dd - 2.0) + er * (dd + 2.0)) / dd**3,
        )
        m = np.arange(_SERIES_TERMS, dtype=np.float64)[:, None]
        terms = np.where(small, delta, 0.0)[None, :] ** m / special.factorial(m)
        series = (
            er * np.sum(terms / (m + 1.0), axis=0),
            er * np.sum(terms / (m + 2.0), axis=0),
            er * np.sum(terms / (m + 3.0), axis=0),
            er * np.sum(terms / ((m + 2.0) * (m + 3.0)), axis=0),
        )
    return tuple(np.where(small, a, b) for a, b in zip(series, closed, strict=True))


def _segment_integrals(knots: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per segment integrals of exp(theta), (t - a) exp(theta) and (t - a)^2 exp(theta), a the left knot."""
    dx = np.diff(knots)
    j00, j01, j02, _ = _exp_moments(phi[:-1], phi[1:])
    return dx * j00, dx**2 * j01, dx**3 * j02


def _objective(y: np.ndarray, w: np.ndarray, dx: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """Value, gradient and tridiagonal negative Hessian (main, off) of sum w y - int exp(theta)."""
    r, s = y[:-1], y[1:]
    j00, j01, j02, j11 = _exp_moments(r, s)
    _, j10, j20, _ = _exp_moments(s, r)
    value = float(w @ y - np.sum(dx * j00))
    gradient = w.copy()
    gradient[:-1] -= dx * j10
    gradient[1:] -= dx * j01
    main = np.zeros_like(y)
    main[:-1] += dx * j20
    main[1:] += dx * j02
    return value, gradient, main, dx * j11


def _tridiagonal_dot(main: np.ndarray, off: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    product = main[:, None] * matrix
    product[:-1] += off[:, None] * matrix[1:]
    product[1:] += off[:, None] * matrix[:-1]
    return product


class _ActiveSetSolver:
    """Maximizes sum w y - int exp(theta) over y = B c with free and non-negative dictionary coefficients."""

    def __init__(self, grid: np.ndarray, w: np.ndarray, free: np.ndarray, hinges: np.ndarray, tol: float) -> None:
        self.w = w
        self.dx = np.diff(grid)
        self.n_free = free.shape[1]
        self.basis = np.column_stack([free, hinges]) if hinges.size else free
        self.is_hinge = np.arange(self.basis.shape[1]) >= self.n_free
        self.tol = tol
        self.coef = np.zeros(self.basis.shape[1])
        # constant column first: start from the uniform density on the grid
        self.coef[0] = -math.log(grid[-1] - grid[0])
        self.active = ~self.is_hinge

    def value(self, coef: np.ndarray) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            value = _objective(self.basis @ coef, self.w, self.dx)[0]
        return value if math.isfinite(value) else -math.inf

    def _newton(self) -> None:
        for _ in range(_MAX_NEWTON):
            index = np.flatnonzero(self.active)
            y = self.basis @ self.coef
            value, gradient, main, off = _objective(y, self.w, self.dx)
            columns = self.basis[:, index]
            g = columns.T @ gradient
            hessian = columns.T @ _tridiagonal_dot(main, off, columns)
            try:
                step = np.linalg.solve(hessian, g)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(hessian, g, rcond=None)[0]
            decrement = float(g @ step)
            if not decrement > 1e-24:
                return

            shrinking = self.is_hinge[index] & (step < 0)
            t_max = float(np.min(self.coef[index][shrinking] / -step[shrinking])) if shrinking.any() else math.inf
            t = min(1.0, t_max)
            while t > 1e-14:
                trial = self.coef.copy()
                trial[index] += t * step
                if self.value(trial) >= value + 0.25 * t * decrement:
                    break
                t *= 0.5
            else:
                return
            self.coef[index] += t * step
            self._drop_vanished()

    def _drop_vanished(self) -> None:
        vanished = self.is_hinge & self.active & (self.coef <= 1e-14)
        self.coef[vanished] = 0.0
        self.active &= ~vanished

    def _enter(self, k: int, derivative: float) -> None:
        """Adds coefficient k to the active set with a positive coordinate step."""
        y = self.basis @ self.coef
        value, _, main, off = _objective(y, self.w, self.dx)
        column = self.basis[:, k : k + 1]
        curvature = float(column[:, 0] @ _tridiagonal_dot(main, off, column)[:, 0])
        t = derivative / curvature if curvature > 0 else 1.0
        while t > 1e-16:
            trial = self.coef.copy()
            trial[k] += t
            if self.value(trial) > value:
                self.coef = trial
                break
            t *= 0.5
        self.active[k] = True

    def solve(self) -> np.ndarray:
        max_outer = 4 * self.basis.shape[0] + 20
        for _ in range(max_outer):
            self._newton()
            _, gradient, _, _ = _objective(self.basis @ self.coef, self.w, self.dx)
            derivatives = self.basis.T @ gradient
            derivatives[self.active] = -math.inf
            k = int(np.argmax(derivatives))
            if not derivatives[k] > self.tol:
                break
            self._enter(k, float(derivatives[k]))
        else:
            warnings.warn(f"Active set iteration stopped after {max_outer} steps before reaching tolerance {self.tol}.")
        return self.coef


def _standardize(sample: WeightedSample) -> tuple[float, float]:
    center = float(sample.w @ sample.z)
    scale = math.sqrt(weighted_variance(sample))
    return center, scale


def _finish(
    grid: np.ndarray, y: np.ndarray, knot_index: np.ndarray, center: float, scale: float, sample: WeightedSample
) -> LogConcaveFit:
    """Normalizes, maps back to data coordinates and extracts the knot representation."""
    knots_std = grid[knot_index]
    phi_std = y[knot_index]
    mass = float(np.sum(_segment_integrals(knots_std, phi_std)[0]))
    phi = phi_std - math.log(mass) - math.log(scale)
    knots = center + scale * knots_std
    knots[0], knots[-1] = sample.z[0], sample.z[-1]
    slopes = np.diff(phi) / np.diff(knots)
    fit = LogConcaveFit(knots=knots, phi=phi, slopes=slopes, log_likelihood=0.0)
    return fit._replace(log_likelihood=float(sample.w @ evaluate(fit, sample.z)))


def fit(sample: WeightedSample, tol: float = DIRECTIONAL_TOL) -> LogConcaveFit:
    """Weighted log-concave maximum likelihood estimate.

    Maximizes sum w_i theta(z_i) - int exp(theta) over concave theta with an active-set
    method: theta = c + a z - sum_k b_k (z - z_k)_+ with b_k >= 0, knots entering
    most-violating-first until no directional derivative exceeds `tol`. The data is
    standardized internally so that the tolerance is scale free.

    Args:
        sample (WeightedSample): Weighted sample.
        tol (float, optional): Tolerance on the directional derivatives. Defaults to 1e-10.

    Returns:
        LogConcaveFit: The fitted log-density.
    """
    if sample.z.size < 2:
        raise DegenerateSampleError(f"Log-concave fit needs at least 2 distinct points, got {sample.z.size}.")
    center, scale = _standardize(sample)
    grid = (sample.z - center) / scale
    free = np.column_stack([np.ones_like(grid), grid - grid[0]])
    interior = np.arange(1, grid.size - 1)
    hinges = -np.maximum(grid[:, None] - grid[None, interior], 0.0)
    solver = _ActiveSetSolver(grid, sample.w, free, hinges, tol)
    coef = solver.solve()
    y = solver.basis @ coef
    kinks = interior[coef[2:] > 0]
    knot_index = np.unique(np.concatenate([[0, grid.size - 1], kinks]))
    logger.debug(f"Log-concave fit with {knot_index.size} knots on {grid.size} points.")
    return _finish(grid, y, knot_index, center, scale, sample)


def constrained_fit(sample: WeightedSample, m: float, tol: float = DIRECTIONAL_TOL) -> LogConcaveFit:
    """Log-concave maximum likelihood estimate with its mode constrained to m.

    The log-density is non-decreasing left of m and non-increasing right of m; m is a knot.

    Args:
        sample (WeightedSample): Weighted sample.
        m (float): Mode location inside [z_1, z_n].
        tol (float, optional): Tolerance on the directional derivatives. Defaults to 1e-10.

    Returns:
        LogConcaveFit: The constrained fit.
    """
    if sample.z.size < 2:
        raise DegenerateSampleError(f"Log-concave fit needs at least 2 distinct points, got {sample.z.size}.")
    if not (math.isfinite(m) and sample.z[0] <= m <= sample.z[-1]):
        raise DomainError(f"Mode {m} outside the sample range [{sample.z[0]}, {sample.z[-1]}].")
    center, scale = _standardize(sample)
    grid = (sample.z - center) / scale
    w = sample.w
    m_std = (m - center) / scale
    q = int(np.searchsorted(grid, m_std))
    snap = 1e-12 * (grid[-1] - grid[0])
    if q < grid.size and abs(grid[q] - m_std) <= snap:
        pass
    elif q > 0 and abs(grid[q - 1] - m_std) <= snap:
        q -= 1
    else:
        grid = np.insert(grid, q, m_std)
        w = np.insert(w, q, 0.0)

    left = np.arange(1, q + 1)
    right = np.arange(q, grid.size - 1)
    hinges = np.column_stack(
        [-np.maximum(grid[None, left] - grid[:, None], 0.0), -np.maximum(grid[:, None] - grid[None, right], 0.0)]
    )
    solver = _ActiveSetSolver(grid, w, np.ones((grid.size, 1)), hinges, tol)
    coef = solver.solve()
    y = solver.basis @ coef
    kinks = np.concatenate([left[coef[1 : 1 + left.size] > 0], right[coef[1 + left.size :] > 0]])
    knot_index = np.unique(np.concatenate([[0, q, grid.size - 1], kinks]))
    return _finish(grid, y, knot_index, center, scale, sample)


def evaluate(fit: LogConcaveFit, t: np.ndarray | float) -> np.ndarray:
    """Fitted log-density theta(t), -inf outside the support.

    Args:
        fit (LogConcaveFit): Fit.
        t (np.ndarray | float): Evaluation points.

    Returns:
        np.ndarray: Log-density values.
    """
    t = np.asarray(t, dtype=np.float64)
    values = np.interp(t, fit.knots, fit.phi)
    return np.where((t < fit.knots[0]) | (t > fit.knots[-1]), -np.inf, values)


def density(fit: LogConcaveFit, t: np.ndarray | float) -> np.ndarray:
    """Fitted density exp(theta(t))."""
    return np.exp(evaluate(fit, t))


def integral(fit: LogConcaveFit) -> float:
    """Total mass of the fitted density, one up to rounding."""
    return float(np.sum(_segment_integrals(fit.knots, fit.phi)[0]))


def fit_mean(fit: LogConcaveFit) -> float:
    """Mean of the fitted density."""
    m0, m1, _ = _segment_integrals(fit.knots, fit.phi)
    return float(np.sum(fit.knots[:-1] * m0 + m1) / np.sum(m0))


def fit_variance(fit: LogConcaveFit) -> float:
    """Variance of the fitted density."""
    m0, m1, m2 = _segment_integrals(fit.knots, fit.phi)
    offset = fit.knots[:-1] - fit_mean(fit)
    return float(np.sum(offset**2 * m0 + 2.0 * offset * m1 + m2) / np.sum(m0))


def argmax_interval(fit: LogConcaveFit) -> tuple[float, float]:
    """The interval of knots on which the log-density attains its maximum."""
    j = int(np.argmax(fit.phi))
    top = fit.phi[j]
    lo = j
    while lo > 0 and top - fit.phi[lo - 1] <= FLAT_TOL:
        lo -= 1
    hi = j
    while hi < fit.phi.size - 1 and top - fit.phi[hi + 1] <= FLAT_TOL:
        hi += 1
    return float(fit.knots[lo]), float(fit.knots[hi])


def mode(fit: LogConcaveFit) -> float:
    """Mode of the fitted density, the midpoint of the argmax interval for flat tops.

    Args:
        fit (LogConcaveFit): Fit.

    Returns:
        float: Mode.
    """
    lo, hi = argmax_interval(fit)
    return lo if hi == lo else 0.5 * (lo + hi)


def threshold_interval(fit: LogConcaveFit, tau: float) -> tuple[float, float]:
    """Superlevel set {t: theta(t) >= theta(mode) + log tau}.

    Args:
        fit (LogConcaveFit): Fit.
        tau (float): Level in (0, 1].

    Returns:
        tuple[float, float]: Interval endpoints, found by linear interpolation between knots.
    """
    if not 0 < tau <= 1:
        raise DomainError(f"Invalid threshold level: {tau}")
    lo, hi = argmax_interval(fit)
    if tau == 1:
        return lo, hi
    level = float(np.max(fit.phi)) + math.log(tau)
    knots, phi = fit.knots, fit.phi
    j_lo = int(np.searchsorted(knots, lo))
    j_hi = int(np.searchsorted(knots, hi))

    left = knots[0]
    for i in range(j_lo, 0, -1):
        if phi[i - 1] < level:
            left = knots[i - 1] + (level - phi[i - 1]) / (phi[i] - phi[i - 1]) * (knots[i] - knots[i - 1])
            break
    right = knots[-1]
    for i in range(j_hi, knots.size - 1):
        if phi[i + 1] < level:
            right = knots[i] + (phi[i] - level) / (phi[i] - phi[i + 1]) * (knots[i + 1] - knots[i])
            break
    return float(left), float(right)


def smooth(fit: LogConcaveFit, empirical_variance: float) -> SmoothedFit:
    """Convolves the fit with N(0, gamma^2), gamma^2 = empirical variance - Var(fit).

    Args:
        fit (LogConcaveFit): Fit.
        empirical_variance (float): Variance of the weighted sample the fit was computed from.

    Returns:
        SmoothedFit: Smoothed fit; `clamped` is set when the variance deficit was below 1e-12.
    """
    if not (math.isfinite(empirical_variance) and empirical_variance > 0):
        raise DomainError(f"Invalid empirical variance: {empirical_variance}")
    deficit = empirical_variance - fit_variance(fit)
    if deficit < 1e-12:
        gamma = 1e-6 * math.sqrt(empirical_variance)
        warnings.warn(f"Variance deficit {deficit:.3e} of the log-concave fit is too small, gamma clamped to {gamma:.3e}.")
        return SmoothedFit(base=fit, gamma=gamma, clamped=True)
    return SmoothedFit(base=fit, gamma=math.sqrt(deficit), clamped=False)


def _log_normal_mass(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """log(Phi(upper) - Phi(lower)) for lower <= upper without cancellation in the tails."""
    upper_tail = lower > 0
    a = np.where(upper_tail, -upper, lower)
    b = np.where(upper_tail, -lower, upper)
    log_b = special.log_ndtr(b)
    with np.errstate(divide="ignore", invalid="ignore"):
        return log_b + np.log1p(-np.exp(special.log_ndtr(a) - log_b))


def _smoothed_log_terms(sf: SmoothedFit, y: np.ndarray | float) -> tuple[np.ndarray, ...]:
    """Per segment and per point quantities of the closed forms, on log scale.

    Returns (log_terms, slopes, log_left, log_right, x_left, x_right) with shapes (m, k) where
    terms = f_{j-1} q_gamma(y, s_j, x_{j-1}, x_j), boundary_left = f_{j-1} phi_gamma(y - x_{j-1}),
    boundary_right = f_j phi_gamma(y - x_j), and x_left, x_right are the knots relative to y.
    """
    gamma = sf.gamma
    knots, phi, slopes = sf.base.knots, sf.base.phi, sf.base.slopes
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    u, v, a = knots[:-1][None, :], knots[1:][None, :], slopes[None, :]
    lower = (u - y) / gamma - a * gamma
    upper = (v - y) / gamma - a * gamma
    log_terms = phi[:-1][None, :] + a * (y - u) + 0.5 * (a * gamma) ** 2 + _log_normal_mass(lower, upper)
    log_normal = -math.log(gamma * math.sqrt(2.0 * math.pi))
    log_left = phi[:-1][None, :] - 0.5 * ((y - u) / gamma) ** 2 + log_normal
    log_right = phi[1:][None, :] - 0.5 * ((y - v) / gamma) ** 2 + log_normal
    return log_terms, a, log_left, log_right, u - y, v - y


def _smoothed_terms(sf: SmoothedFit, y: np.ndarray | float) -> tuple[np.ndarray, ...]:
    """The quantities of _smoothed_log_terms with terms and boundary terms exponentiated."""
    log_terms, a, log_left, log_right, du, dv = _smoothed_log_terms(sf, y)
    return np.exp(log_terms), a, np.exp(log_left), np.exp(log_right), du, dv


def smoothed_density(sf: SmoothedFit, y: np.ndarray | float) -> np.ndarray:
    """Smoothed density g*(y)."""
    terms = _smoothed_terms(sf, y)[0]
    return terms.sum(axis=1)


def smoothed_derivative(sf: SmoothedFit, y: np.ndarray | float) -> np.ndarray:
    """First derivative of the smoothed density."""
    terms, a, left, right, _, _ = _smoothed_terms(sf, y)
    return (a * terms + left - right).sum(axis=1)


def smoothed_second_derivative(sf: SmoothedFit, y: np.ndarray | float) -> np.ndarray:
    """Second derivative of the smoothed density."""
    terms, a, left, right, du, dv = _smoothed_terms(sf, y)
    first = a * terms + left - right
    gamma2 = sf.gamma**2
    return (a * first + du / gamma2 * left - dv / gamma2 * right).sum(axis=1)


def smoothed_mode(sf: SmoothedFit, tol: float = 1e-10, max_iter: int = 200) -> float:
    """Mode of the smoothed density by safeguarded Newton iteration on (log g*)'.

    The root is bracketed in [knots_1 - 4 gamma, knots_m + 4 gamma]; bisection is used
    whenever a Newton step leaves the bracket. The log-derivatives are computed from the
    terms of the closed forms rescaled by the largest one, so they stay finite where g*
    itself underflows.

    Args:
        sf (SmoothedFit): Smoothed fit.
        tol (float, optional): Tolerance on |g*'|. Defaults to 1e-10.
        max_iter (int, optional): Iteration limit. Defaults to 200.

    Returns:
        float: Mode.
    """
    knots = sf.base.knots
    lo, hi = knots[0] - 4.0 * sf.gamma, knots[-1] + 4.0 * sf.gamma

    gamma2 = sf.gamma**2

    def log_slope(y: float) -> tuple[float, float, float]:
        log_terms, a, log_left, log_right, du, dv = _smoothed_log_terms(sf, y)
        shift = max(float(np.max(log_terms)), float(np.max(log_left)), float(np.max(log_right)))
        terms, left, right = (np.exp(t - shift) for t in (log_terms, log_left, log_right))
        first = a * terms + left - right
        g0 = float(terms.sum())
        g1 = float(first.sum())
        g2 = float((a * first + du / gamma2 * left - dv / gamma2 * right).sum())
        scale = math.exp(shift)
        # g*' itself, nan where it underflows
        slope = g1 * scale if scale > 0 else math.nan
        if g0 <= 0:
            return slope, math.copysign(math.inf, g1), math.nan
        ratio = g1 / g0
        return slope, ratio, g2 / g0 - ratio**2

    if not (log_slope(lo)[1] > 0 > log_slope(hi)[1]):
        raise RidgeSearchError(f"Smoothed mode is not bracketed by [{lo}, {hi}].")

    y = min(max(mode(sf.base), lo), hi)
    for _ in range(max_iter):
        g1, ratio, curvature = log_slope(y)
        if abs(g1) <= tol:
            return y
        if ratio > 0:
            lo = y
        else:
            hi = y
        if hi - lo <= 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi), sf.gamma):
            return y
        candidate = y - ratio / curvature if curvature < 0 else math.nan
        y = candidate if lo < candidate < hi else 0.5 * (lo + hi)
    return y


def likelihood_ratio_statistic(sample: WeightedSample, m: float, unconstrained: LogConcaveFit | None = None) -> float:
    """Likelihood ratio statistic 2 n_eff sum w_i (theta(z_i) - theta_m(z_i)) for the mode m.

    Args:
        sample (WeightedSample): Weighted sample.
        m (float): Hypothesized mode.
        unconstrained (LogConcaveFit | None, optional): Precomputed unconstrained fit. Defaults to None.

    Returns:
        float: Non-negative statistic.
    """
    unconstrained = unconstrained or fit(sample)
    constrained = constrained_fit(sample, m)
    return max(0.0, 2.0 * sample.n_eff * (unconstrained.log_likelihood - constrained.log_likelihood))


def lr_confidence_interval(
    sample: WeightedSample,
    alpha: float,
    critical_value: float,
    check_monotone: bool = True,
    rel_tol: float = 1e-6,
) -> ConfidenceInterval:
    """Likelihood-ratio interval {m: 2 log lambda(m) <= c_alpha} for the mode.

    The statistic is assumed monotone on each side of the mode and the endpoints are
    found by bisection from the mode outward; with `check_monotone` the assumption is
    verified on a 50-point grid and a violation is reported by a warning.

    Args:
        sample (WeightedSample): Weighted sample.
        alpha (float): Level of the interval, informational since the critical value is supplied.
        critical_value (float): Critical value c_alpha.
        check_monotone (bool, optional): Verify monotonicity on a grid. Defaults to True.
        rel_tol (float, optional): Bisection tolerance relative to the sample range. Defaults to 1e-6.

    Returns:
        ConfidenceInterval: Interval endpoints and the monotonicity flag.
    """
    if not 0 < alpha < 1:
        raise DomainError(f"Invalid alpha: {alpha}")
    unconstrained = fit(sample)
    center = mode(unconstrained)
    z = sample.z
    span = z[-1] - z[0]

    def statistic(m: float) -> float:
        return likelihood_ratio_statistic(sample, m, unconstrained)

    def endpoint(outer: float) -> float:
        if statistic(outer) <= critical_value:
            return outer
        inside = center
        while abs(outer - inside) > rel_tol * span:
            middle = 0.5 * (inside + outer)
            if statistic(middle) <= critical_value:
                inside = middle
            else:
                outer = middle
        return inside

    lo, hi = endpoint(z[0]), endpoint(z[-1])

    monotone = True
    if check_monotone:
        grid = np.linspace(z[0], z[-1], 50)
        values = np.array([statistic(m) for m in grid])
        left, right = values[grid <= center], values[grid >= center]
        slack = 1e-8 * max(1.0, float(values.max()))
        monotone = bool(np.all(np.diff(left) <= slack) and np.all(np.diff(right) >= -slack))
        if not monotone:
            warnings.warn("Likelihood ratio statistic is not monotone on both sides of the mode.")
    return ConfidenceInterval(lo=float(lo), hi=float(hi), monotone=monotone)


def calibrate_critical_value(alpha: float, n: int, reps: int = 500, seed: int = 0) -> float:
    """Monte Carlo (1 - alpha)-quantile of the likelihood ratio statistic for the mode.

    The statistic is computed on `reps` standard normal samples of size n at the true mode 0.

    Args:
        alpha (float): Level in (0, 1]; alpha = 1 gives 0.
        n (int): Sample size.
        reps (int, optional): Number of Monte Carlo samples, at least 200. Defaults to 500.
        seed (int, optional): Seed of the counter-based generator. Defaults to 0.

    Returns:
        float: Critical value.
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"Invalid alpha: {alpha}")
    if reps < 200:
        raise DomainError(f"Calibration needs at least 200 replications, got {reps}.")
    if n < 2:
        raise DomainError(f"Invalid sample size: {n}")
    if alpha == 1:
        return 0.0
    draws = np.asarray(jax.random.normal(jax.random.key(seed), (reps, n)))
    statistics = []
    for z in draws:
        sample = make_weighted_sample(z)
        if not sample.z[0] <= 0.0 <= sample.z[-1]:
            statistics.append(math.inf)
            continue
        statistics.append(likelihood_ratio_statistic(sample, 0.0))
    return float(np.quantile(np.asarray(statistics), 1.0 - alpha))
