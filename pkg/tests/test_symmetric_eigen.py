from __future__ import annotations

import itertools
import math

import jax
import jax.numpy as jnp
import numpy as np
import pytest
from jax.scipy.special import logsumexp
from jax.scipy.stats import multivariate_normal as jax_multivariate_normal
from ridgesearch.core.circle_oracle import CircleModel, circle_density, circle_log_density_hessian, true_ridge_radius
from ridgesearch.core.errors import DomainError
from ridgesearch.core.local_moments import population_conditional_covariance
from ridgesearch.core.symmetric_eigen import (
    davis_kahan_bound,
    spectral,
    subspace_distance,
    v_parallel,
    v_perp,
    weyl_bounds,
)
from scipy.stats import multivariate_normal


def _random_symmetric(rng, d):
    a = rng.normal(size=(d, d))
    return 0.5 * (a + a.T)


def _rotation(theta):
    return np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])


def test_diagonal_matrix():
    dec = spectral(np.diag([1.0, 3.0]))
    np.testing.assert_allclose(dec.eigenvalues, [3.0, 1.0])
    np.testing.assert_allclose(np.abs(dec.eigenvectors), np.array([[0.0, 1.0], [1.0, 0.0]]), atol=1e-15)


def test_identity_has_orthonormal_basis():
    dec = spectral(np.eye(3))
    np.testing.assert_allclose(dec.eigenvalues, 1.0)
    np.testing.assert_allclose(dec.eigenvectors.T @ dec.eigenvectors, np.eye(3), atol=1e-14)


@pytest.mark.parametrize("d", [2, 4, 8, 12])
def test_reconstruction_and_orthonormality(rng, d):
    m = _random_symmetric(rng, d)
    dec = spectral(m)
    v, lam = dec.eigenvectors, dec.eigenvalues
    assert np.linalg.norm(v @ np.diag(lam) @ v.T - m) <= 1e-8 * np.linalg.norm(m)
    assert np.max(np.abs(v.T @ v - np.eye(d))) <= 1e-10
    assert np.all(np.diff(lam) <= 0)


def test_zero_matrix():
    dec = spectral(np.zeros((3, 3)))
    np.testing.assert_array_equal(dec.eigenvalues, 0.0)
    np.testing.assert_array_equal(dec.eigenvectors, np.eye(3))


def test_deterministic_signs(rng):
    m = _random_symmetric(rng, 5)
    first = spectral(m).eigenvectors
    np.testing.assert_array_equal(first, spectral(m.copy()).eigenvectors)
    for j in range(5):
        column = first[:, j]
        assert column[np.flatnonzero(np.abs(column) > 1e-14)[0]] > 0


def test_slight_asymmetry_is_symmetrized(rng):
    m = _random_symmetric(rng, 3)
    a = rng.normal(size=(3, 3))
    perturbed = m + 1e-12 * np.linalg.norm(m) * (a - a.T)
    dec = spectral(perturbed)
    np.testing.assert_allclose(dec.eigenvalues, spectral(m).eigenvalues, atol=1e-10)
    np.testing.assert_allclose(
        dec.eigenvectors @ np.diag(dec.eigenvalues) @ dec.eigenvectors.T, 0.5 * (perturbed + perturbed.T), atol=1e-10
    )


def test_rejects_asymmetric_and_non_finite():
    with pytest.raises(DomainError):
        spectral(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        spectral(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        spectral(np.ones((2, 3)))


def test_v_perp_of_diagonal():
    perp = v_perp(spectral(np.diag([3.0, 1.0])), 1)
    np.testing.assert_allclose(np.abs(perp[:, 0]), [0.0, 1.0], atol=1e-15)


def test_v_perp_without_split_is_everything(rng):
    dec = spectral(_random_symmetric(rng, 3))
    np.testing.assert_array_equal(v_perp(dec, 0), dec.eigenvectors)
    assert v_parallel(dec, 0).shape == (3, 0)


@pytest.mark.parametrize("theta", [0.3, 1.1, 2.5])
def test_v_perp_of_rotated_matrix(theta):
    rotation = _rotation(theta)
    m = rotation @ np.diag([2.0, 1.0]) @ rotation.T
    perp = v_perp(spectral(m), 1)[:, 0]
    expected = rotation[:, 1]
    assert abs(abs(perp @ expected) - 1.0) <= 1e-12


def test_v_perp_range():
    with pytest.raises(DomainError):
        v_perp(spectral(np.eye(2)), 2)


def test_subspace_distance_identical(rng):
    dec = spectral(_random_symmetric(rng, 4))
    assert subspace_distance(dec, dec, 2) == pytest.approx(0.0, abs=1e-14)


def test_subspace_distance_perpendicular():
    a = spectral(np.diag([2.0, 1.0]))
    b = spectral(np.diag([1.0, 2.0]))
    assert subspace_distance(a, b, 1) == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_davis_kahan(rng):
    checked = 0
    for _ in range(200):
        a = _random_symmetric(rng, 4)
        b = a + 0.05 * _random_symmetric(rng, 4)
        bound = davis_kahan_bound(a, b, 2)
        if math.isfinite(bound):
            checked += 1
            assert subspace_distance(spectral(a), spectral(b), 2) <= bound + 1e-12
    assert checked > 0


def test_weyl_inequality(rng):
    for _ in range(50):
        a, b = _random_symmetric(rng, 5), _random_symmetric(rng, 5)
        lower, upper = weyl_bounds(a, b)
        values = spectral(a + b).eigenvalues
        assert np.all(lower <= values + 1e-12)
        assert np.all(values <= upper + 1e-12)


def test_eigengap():
    dec = spectral(np.diag([5.0, 2.0, 1.0]))
    assert dec.eigengap_at(1) == pytest.approx(3.0)
    assert dec.eigengap_at(2) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        dec.eigengap_at(3)


def test_permutation_invariance_of_spectrum(rng):
    m = _random_symmetric(rng, 4)
    for perm in itertools.islice(itertools.permutations(range(4)), 6):
        p = np.eye(4)[list(perm)]
        np.testing.assert_allclose(spectral(p @ m @ p.T).eigenvalues, spectral(m).eigenvalues, atol=1e-12)


# smallest eigenvectors of the conditional covariance against those of the log-density Hessian

MIX_WEIGHTS = np.array([0.5, 0.5])
MIX_MEANS = np.array([[0.0, 0.0], [1.5, 0.5]])
MIX_COVS = np.array([[[1.0, 0.6], [0.6, 1.0]], [[0.5, 0.0], [0.0, 0.3]]])


def _mixture_density(points):
    return sum(w * multivariate_normal(mean=m, cov=c).pdf(points) for w, m, c in zip(MIX_WEIGHTS, MIX_MEANS, MIX_COVS, strict=True))


def _mixture_log_density(x):
    logs = jnp.stack([jax_multivariate_normal.logpdf(x, m, c) for m, c in zip(MIX_MEANS, MIX_COVS, strict=True)])
    return logsumexp(logs + jnp.log(MIX_WEIGHTS))


def test_v_perp_on_circle_is_radial_for_every_bandwidth():
    model = CircleModel(r=1.0, sigma=0.3)
    x = _rotation(0.7) @ np.array([true_ridge_radius(model), 0.0])
    hessian = spectral(circle_log_density_hessian(model, x))
    for h in (0.4, 0.2, 0.1):
        sigma = population_conditional_covariance(lambda p: circle_density(model, p), x, h)
        assert subspace_distance(spectral(sigma), hessian, 1) <= 1e-6


def test_v_perp_of_conditional_covariance_converges():
    x = np.array([0.6, 0.1])
    hessian = spectral(np.asarray(jax.hessian(_mixture_log_density)(jnp.asarray(x))))
    distances = [
        subspace_distance(spectral(population_conditional_covariance(_mixture_density, x, h)), hessian, 1)
        for h in (0.4, 0.2, 0.1)
    ]
    assert distances[0] > distances[1] > distances[2]
