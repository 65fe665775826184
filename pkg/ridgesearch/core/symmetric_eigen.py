"""Spectral decomposition of small symmetric matrices and eigen-subspace utilities."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

logger = logging.getLogger(__name__)

JACOBI_MAX_DIMENSION = 8
_MAX_SWEEPS = 100


class SpectralDecomposition(NamedTuple):
    """Eigen-decomposition of a symmetric matrix. Consists of (eigenvalues, eigenvectors), eigenvalues decreasing and column j of eigenvectors paired with eigenvalue j."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        """Matrix dimension d."""
        return int(self.eigenvalues.shape[0])

    def eigengap_at(self, s: int) -> float:
        """Eigengap lambda_s - lambda_{s+1} for 1 <= s < d."""
        if not 1 <= s < self.dimension:
            raise DomainError(f"Invalid eigengap index {s} for dimension {self.dimension}.")
        return float(self.eigenvalues[s - 1] - self.eigenvalues[s])


def _jacobi(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations. Returns the diagonalized matrix and the accumulated rotations."""
    a = matrix.copy()
    d = a.shape[0]
    v = np.eye(d)
    scale = np.linalg.norm(matrix)
    for sweep in range(_MAX_SWEEPS):
        off = math.sqrt(max(np.sum(a**2) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= 1e-15 * scale:
            logger.debug(f"Jacobi converged after {sweep} sweeps.")
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                if abs(a[p, q]) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rotation = np.eye(d)
                rotation[p, p] = rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s
                a = rotation.T @ a @ rotation
                a[p, q] = a[q, p] = 0.0
                v = v @ rotation
    return a, v


def _canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flips every column so that its first non-negligible component is positive."""
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        column = vectors[:, j]
        nonzero = np.flatnonzero(np.abs(column) > 1e-14)
        if len(nonzero) and column[nonzero[0]] < 0:
            vectors[:, j] = -column
    return vectors


def spectral(matrix: np.ndarray) -> SpectralDecomposition:
    """Full spectral decomposition of a symmetric matrix.

    Uses cyclic Jacobi rotations up to dimension 8 and LAPACK beyond. Eigenvalues are
    sorted decreasingly. Eigenvectors have their first non-negligible component positive;
    columns belonging to numerically tied eigenvalues are ordered lexicographically.

    Args:
        matrix (np.ndarray): Symmetric d x d matrix.

    Returns:
        SpectralDecomposition: Decomposition.
    """
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise DomainError(f"Expected a square matrix, got shape {matrix.shape}.")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("Matrix has non-finite entries.")
    norm = float(np.linalg.norm(matrix))
    if np.linalg.norm(matrix - matrix.T) > 1e-10 * norm:
        raise DomainError("Matrix is not symmetric.")
    matrix = 0.5 * (matrix + matrix.T)
    d = matrix.shape[0]

    if norm == 0.0:
        return SpectralDecomposition(eigenvalues=np.zeros(d), eigenvectors=np.eye(d))

    if d <= JACOBI_MAX_DIMENSION:
        diagonal, vectors = _jacobi(matrix)
        values = np.diag(diagonal).copy()
    else:
        values, vectors = np.linalg.eigh(matrix)

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = _canonical_signs(vectors[:, order])

    # order columns inside tied blocks lexicographically (largest first)
    tie = 1e-12 * norm
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and abs(values[stop] - values[start]) <= tie:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            keys = [tuple(-block[:, j]) for j in range(block.shape[1])]
            vectors[:, start:stop] = block[:, sorted(range(len(keys)), key=keys.__getitem__)]
        start = stop
    return SpectralDecomposition(eigenvalues=values, eigenvectors=vectors)


def v_perp(dec: SpectralDecomposition, s: int) -> np.ndarray:
    """Eigenvectors s+1, ..., d, i.e. those of the d - s smallest eigenvalues.

    Args:
        dec (SpectralDecomposition): Decomposition.
        s (int): Ridge dimension, 0 <= s < d.

    Returns:
        np.ndarray: d x (d - s) matrix with orthonormal columns.
    """
    if not 0 <= s < dec.dimension:
        raise DomainError(f"Invalid ridge dimension {s} for d={dec.dimension}.")
    return dec.eigenvectors[:, s:]


def v_parallel(dec: SpectralDecomposition, s: int) -> np.ndarray:
    """Eigenvectors 1, ..., s of the s largest eigenvalues."""
    if not 0 <= s < dec.dimension:
        raise DomainError(f"Invalid ridge dimension {s} for d={dec.dimension}.")
    return dec.eigenvectors[:, :s]


def subspace_distance(a_dec: SpectralDecomposition, b_dec: SpectralDecomposition, s: int) -> float:
    """Frobenius distance between the orthogonal projectors onto the two V_perp spans.

    Args:
        a_dec (SpectralDecomposition): First decomposition.
        b_dec (SpectralDecomposition): Second decomposition.
        s (int): Ridge dimension.

    Returns:
        float: Distance in [0, sqrt(2 (d - s))].
    """
    if a_dec.dimension != b_dec.dimension:
        raise DomainError(f"Dimension mismatch: {a_dec.dimension} vs {b_dec.dimension}.")
    a = v_perp(a_dec, s)
    b = v_perp(b_dec, s)
    return float(np.linalg.norm(a @ a.T - b @ b.T))


def weyl_bounds(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weyl's bounds lambda_j(A) + lambda_d(B) <= lambda_j(A + B) <= lambda_j(A) + lambda_1(B).

    Args:
        a (np.ndarray): Symmetric matrix A.
        b (np.ndarray): Symmetric matrix B.

    Returns:
        tuple[np.ndarray, np.ndarray]: Lower and upper bounds for the eigenvalues of A + B.
    """
    la = spectral(a).eigenvalues
    lb = spectral(b).eigenvalues
    return la + lb[-1], la + lb[0]


def davis_kahan_bound(a: np.ndarray, b: np.ndarray, s: int) -> float:
    """Davis-Kahan bound sqrt(2) ||A - B||_F / delta on the V_perp subspace distance.

    delta = lambda_s(A) - lambda_{s+1}(B); the bound is infinite unless delta > 0.

    Args:
        a (np.ndarray): Symmetric matrix A.
        b (np.ndarray): Symmetric matrix B.
        s (int): Ridge dimension, 1 <= s < d.

    Returns:
        float: Upper bound on subspace_distance(spectral(A), spectral(B), s).
    """
    la = spectral(a).eigenvalues
    lb = spectral(b).eigenvalues
    delta = la[s - 1] - lb[s]
    if delta <= 0:
        return math.inf
    return float(math.sqrt(2.0) * np.linalg.norm(np.asarray(a) - np.asarray(b)) / delta)
