from __future__ import annotations

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from ridgesearch.core.circle_oracle import (
    CircleModel,
    circle_density,
    circle_log_density_hessian,
    sample_circle,
    true_ridge_radius,
)
from ridgesearch.core.errors import EmptyNeighborhoodError
from ridgesearch.core.kernels import Kernel
from ridgesearch.core.local_moments import (
    conditional_covariance,
    kde,
    kde_derivatives,
    local_moments,
    population_conditional_covariance,
    sigma_lipschitz_constant,
)
from scipy import integrate
from scipy.stats import multivariate_normal


def test_single_point_at_query():
    x = np.array([0.3, -1.2])
    moments = local_moments(x[None, :], x, 0.5)
    assert moments.s == pytest.approx(float(Kernel.gaussian(2).scaled(0.0, 0.5)), rel=1e-14)
    np.testing.assert_array_equal(moments.s_vec, 0.0)
    np.testing.assert_array_equal(moments.S_mat, 0.0)


def test_symmetric_pair_has_zero_first_moment():
    x = np.array([1.0, 2.0])
    data = np.stack([x + [0.4, 0.0], x - [0.4, 0.0]])
    moments = local_moments(data, x, 0.3)
    np.testing.assert_allclose(moments.s_vec, 0.0, atol=1e-15)


def test_zeroth_moment_against_gaussian_convolution(rng):
    data = rng.normal(size=(1000, 2))
    h = 0.5
    moments = local_moments(data, [0.0, 0.0], h)
    kernel_values = np.exp(-0.5 * np.sum(data**2, axis=1) / h**2) / (2 * np.pi * h**2)
    # radial form of E[K_h(X)] for X ~ N(0, I)
    radial, _ = integrate.quad(lambda r: r * np.exp(-0.5 * r**2 * (1 + 1 / h**2)), 0, np.inf)
    expected = radial / (2 * np.pi * h**2)
    assert expected == pytest.approx(1 / (2 * np.pi * (1 + h**2)), rel=1e-8)
    se = kernel_values.std(ddof=1) / np.sqrt(len(data))
    assert abs(moments.s - expected) <= 3 * se


def test_single_point_covariance():
    p = np.array([[0.5, 0.5]])
    cov = conditional_covariance(p, [0.4, 0.6], 1.0)
    np.testing.assert_allclose(cov.sigma, 0.0, atol=1e-15)
    np.testing.assert_allclose(cov.mu, p[0], atol=1e-15)


def test_symmetric_pair_covariance():
    a = 0.3
    data = np.array([[a, 0.0], [-a, 0.0]])
    cov = conditional_covariance(data, [0.0, 0.0], 0.5)
    np.testing.assert_allclose(cov.sigma, np.diag([a**2, 0.0]), atol=1e-15)


def test_monte_carlo_gaussian_conditioning(rng):
    sigma = np.diag([1.0, 0.25])
    h = 0.5
    data = rng.multivariate_normal(np.zeros(2), sigma, size=20000)
    cov = conditional_covariance(data, [0.0, 0.0], h)
    expected = np.linalg.inv(np.linalg.inv(sigma) + np.eye(2) / h**2)

    w = cov.base.weights
    centered = data - cov.mu
    for j in range(2):
        for k in range(2):
            products = centered[:, j] * centered[:, k]
            se = np.sqrt(np.sum(w**2 * (products - cov.sigma[j, k]) ** 2))
            assert abs(cov.sigma[j, k] - expected[j, k]) <= 5 * se


def test_covariance_is_positive_semidefinite(rng):
    data = rng.normal(size=(300, 3))
    for x in rng.normal(size=(10, 3)):
        sigma = conditional_covariance(data, x, 0.4).sigma
        np.testing.assert_allclose(sigma, sigma.T, atol=0)
        assert np.linalg.eigvalsh(sigma).min() >= -1e-12


def test_translation_equivariance(rng):
    data = rng.normal(size=(150, 2))
    x = np.array([0.3, -0.2])
    shift = np.array([5.0, -3.0])
    plain = conditional_covariance(data, x, 0.5)
    moved = conditional_covariance(data + shift, x + shift, 0.5)
    np.testing.assert_allclose(moved.mu, plain.mu + shift, atol=1e-12)
    np.testing.assert_allclose(moved.sigma, plain.sigma, atol=1e-12)


@pytest.mark.parametrize("c", [0.1, 3.0])
def test_scale_equivariance(rng, c):
    data = rng.normal(size=(150, 3))
    x = np.array([0.1, 0.4, -0.3])
    plain = conditional_covariance(data, x, 0.6)
    scaled = conditional_covariance(c * data, c * x, c * 0.6)
    np.testing.assert_allclose(scaled.mu, c * plain.mu, rtol=1e-10, atol=1e-13 * c)
    np.testing.assert_allclose(scaled.sigma, c**2 * plain.sigma, rtol=1e-10, atol=1e-14 * c**2)


def test_empty_neighborhood_with_compact_kernel():
    data = np.zeros((5, 2))
    with pytest.raises(EmptyNeighborhoodError):
        local_moments(data, [10.0, 10.0], 1.0, Kernel.uniform_ball(2))


def test_population_covariance_of_gaussian():
    sigma = np.array([[1.0, 0.3], [0.3, 0.5]])
    h = 0.5
    density = multivariate_normal(mean=np.zeros(2), cov=sigma).pdf
    result = population_conditional_covariance(density, [0.3, -0.2], h)
    expected = np.linalg.inv(np.linalg.inv(sigma) + np.eye(2) / h**2)
    np.testing.assert_allclose(result, expected, atol=1e-6)


def test_population_covariance_isotropic_at_center():
    density = multivariate_normal(mean=np.zeros(3), cov=np.eye(3)).pdf
    result = population_conditional_covariance(density, [0.0, 0.0, 0.0], 0.7)
    np.testing.assert_allclose(result, result[0, 0] * np.eye(3), atol=1e-9)


def test_small_bandwidth_expansion_on_circle():
    model = CircleModel(r=1.0, sigma=0.3)
    x = np.array([true_ridge_radius(model), 0.0])

    def density(points):
        return circle_density(model, points)

    target = circle_log_density_hessian(model, x)
    errors = []
    for h in (0.4, 0.2, 0.1):
        sigma = population_conditional_covariance(density, x, h)
        errors.append(np.linalg.norm((sigma - h**2 * np.eye(2)) / h**4 - target))
    assert errors[0] > errors[1] > errors[2]


def test_kde_derivatives_against_autodiff(rng):
    data = rng.normal(size=(60, 2))
    h = 0.6
    x = np.array([0.2, -0.4])
    result = kde_derivatives(data, x, h)

    def log_kde(y):
        u = jnp.sum((jnp.asarray(data) - y) ** 2, axis=1) / h**2
        return jnp.log(jnp.mean(jnp.exp(-0.5 * u)) / (2 * jnp.pi * h**2))

    assert result.value == pytest.approx(kde(data, x, h), rel=1e-13)
    np.testing.assert_allclose(result.gradient / result.value, np.asarray(jax.grad(log_kde)(jnp.asarray(x))), rtol=1e-10)
    np.testing.assert_allclose(result.log_hessian, np.asarray(jax.hessian(log_kde)(jnp.asarray(x))), rtol=1e-9, atol=1e-12)


@pytest.mark.slow
def test_sigma_lipschitz_bound(rng):
    data = sample_circle(CircleModel(r=1.0, sigma=0.1), 100, seed=3).points
    h = 0.5
    # sparse weights spread the points over the whole hull
    weights = rng.dirichlet(np.full(100, 0.05), size=2000)
    hull = weights @ data
    constant = sigma_lipschitz_constant(data, h, hull)
    for i in range(0, 2000, 2):
        x, y = hull[i], hull[i + 1]
        gap = np.linalg.norm(conditional_covariance(data, x, h).sigma - conditional_covariance(data, y, h).sigma)
        assert gap <= constant * np.linalg.norm(x - y)
