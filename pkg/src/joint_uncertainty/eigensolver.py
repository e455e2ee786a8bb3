"""Lowest eigenpairs of sparse symmetric operators.

Small problems go to a dense ``scipy.linalg.eigh``. Larger ones use a
thick-restart Lanczos iteration with full (twice-applied) reorthogonalization:
the Krylov basis is grown to ``krylov_dim`` columns, Rayleigh-Ritz is solved on
it, the lowest Ritz vectors are kept, and the basis is re-grown from the
residual of the first wanted pair that has not converged.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from joint_uncertainty.errors import EigensolverError
from joint_uncertainty.operators import TwoPhotonOperator

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DENSE_THRESHOLD = 2000
KRYLOV_DIM = 60
MAX_RESTARTS = 200

MatrixLike = Union[TwoPhotonOperator, sp.spmatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Ground eigenpair plus solver bookkeeping.

    ``second_eigenvalue``/``second_eigenvector`` hold the next pair when the
    solver computed one; the minimizer needs them to break degeneracies.
    """

    eigenvalue: float
    eigenvector: np.ndarray
    residual_norm: float
    iterations: int
    method: str = "dense"
    second_eigenvalue: Optional[float] = None
    second_eigenvector: Optional[np.ndarray] = None

    def is_degenerate(self, relative_gap: float = 1e-10) -> bool:
        if self.second_eigenvalue is None:
            return False
        scale = max(1.0, abs(self.eigenvalue))
        return abs(self.second_eigenvalue - self.eigenvalue) < relative_gap * scale


def _as_matrix(op: MatrixLike) -> Union[sp.csr_matrix, np.ndarray]:
    if isinstance(op, TwoPhotonOperator):
        return op.matrix
    if sp.issparse(op):
        return op.tocsr()
    matrix = np.asarray(op, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {matrix.shape}")
    return matrix


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry of each column positive."""
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _residuals(matrix, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.norm(matrix @ vectors - vectors * values, axis=0)


# =============================================================================
# Solvers
# =============================================================================


def _dense_lowest(matrix, count: int) -> Tuple[np.ndarray, np.ndarray]:
    dense = matrix.toarray() if sp.issparse(matrix) else matrix
    dense = 0.5 * (dense + dense.T)
    values, vectors = scipy.linalg.eigh(dense, subset_by_index=[0, count - 1])
    return values, vectors


def _orthogonalize(vector: np.ndarray, basis: np.ndarray) -> np.ndarray:
    for _ in range(2):
        vector = vector - basis @ (basis.T @ vector)
    return vector


def _lanczos_lowest(
    matrix,
    count: int,
    tolerance: float,
    rng: np.random.Generator,
    krylov_dim: int,
    max_restarts: int,
    initial_vector: Optional[np.ndarray],
) -> Tuple[np.ndarray, np.ndarray, int]:
    dim = matrix.shape[0]
    size_cap = min(max(krylov_dim, 2 * count + 2), dim)

    V = np.zeros((dim, size_cap))
    AV = np.zeros((dim, size_cap))
    start = rng.standard_normal(dim) if initial_vector is None else np.array(initial_vector, float)
    norm = np.linalg.norm(start)
    if norm == 0.0:
        raise ValueError("initial_vector must be nonzero")
    V[:, 0] = start / norm

    kept = 0
    matvecs = 0
    worst = np.inf
    for restart in range(max_restarts):
        j = kept
        while True:
            AV[:, j] = matrix @ V[:, j]
            matvecs += 1
            if j + 1 == size_cap:
                break
            w = _orthogonalize(AV[:, j], V[:, : j + 1])
            beta = np.linalg.norm(w)
            if beta <= 1e-12 * max(1.0, np.linalg.norm(AV[:, j])):
                # invariant subspace reached; continue from a fresh direction
                w = _orthogonalize(rng.standard_normal(dim), V[:, : j + 1])
                beta = np.linalg.norm(w)
            V[:, j + 1] = w / beta
            j += 1

        projected = V.T @ AV
        projected = 0.5 * (projected + projected.T)
        theta, S = scipy.linalg.eigh(projected)
        ritz = V @ S[:, :count]
        residual_vectors = AV @ S[:, :count] - ritz * theta[:count]
        residuals = np.linalg.norm(residual_vectors, axis=0)
        limits = tolerance * np.maximum(1.0, np.abs(theta[:count]))
        worst = float(np.max(residuals))
        logger.debug(
            f"lanczos restart {restart}: theta0={theta[0]:.12g}, residuals={residuals}"
        )
        if np.all(residuals <= limits) or size_cap == dim:
            return theta[:count], ritz, matvecs

        keep = min(max(2 * count, size_cap // 3), size_cap - 1)
        first_open = int(np.argmax(residuals > limits))
        direction = residual_vectors[:, first_open]

        V[:, :keep] = V @ S[:, :keep]
        AV[:, :keep] = AV @ S[:, :keep]
        direction = _orthogonalize(direction, V[:, :keep])
        beta = np.linalg.norm(direction)
        if beta == 0.0:
            direction = _orthogonalize(rng.standard_normal(dim), V[:, :keep])
            beta = np.linalg.norm(direction)
        V[:, keep] = direction / beta
        V[:, keep + 1 :] = 0.0
        AV[:, keep:] = 0.0
        kept = keep

    raise EigensolverError(
        f"Lanczos did not converge after {max_restarts} restarts",
        residual_norm=worst,
        iterations=matvecs,
    )


def lowest_eigenpairs(
    op: MatrixLike,
    count: int = 2,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = 0,
    *,
    method: str = "auto",
    dense_threshold: int = DENSE_THRESHOLD,
    krylov_dim: int = KRYLOV_DIM,
    max_restarts: int = MAX_RESTARTS,
    initial_vector: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int, str]:
    """The ``count`` smallest eigenpairs of a symmetric operator.

    Returns (values, vectors, residual_norms, iterations, method).
    """
    matrix = _as_matrix(op)
    dim = matrix.shape[0]
    if dim == 0:
        raise ValueError("cannot solve an empty operator")
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    if method not in ("auto", "dense", "lanczos"):
        raise ValueError(f"unknown eigensolver method {method!r}")
    count = min(count, dim)

    chosen = method
    if method == "auto":
        chosen = "dense" if dim <= dense_threshold else "lanczos"

    if chosen == "dense":
        values, vectors = _dense_lowest(matrix, count)
        iterations = 1
    else:
        rng = np.random.default_rng(seed)
        values, vectors, iterations = _lanczos_lowest(
            matrix, count, tolerance, rng, krylov_dim, max_restarts, initial_vector
        )

    vectors = _fix_sign(vectors / np.linalg.norm(vectors, axis=0))
    residuals = _residuals(matrix, values, vectors)
    limits = tolerance * np.maximum(1.0, np.abs(values))
    if chosen == "dense" and residuals[0] > max(limits[0], 1e-9 * max(1.0, abs(values[0]))):
        raise EigensolverError(
            f"dense solve residual {residuals[0]:.3e} above tolerance",
            residual_norm=float(residuals[0]),
            iterations=iterations,
        )
    return values, vectors, residuals, iterations, chosen


def ground_state(
    op: MatrixLike,
    tolerance: float = DEFAULT_TOLERANCE,
    seed: int = 0,
    **options,
) -> EigenResult:
    """Smallest eigenpair of ``op``; the second pair rides along when available.

    Deterministic for a fixed ``seed``. Keyword ``options`` go to
    ``lowest_eigenpairs`` (method, dense_threshold, krylov_dim, max_restarts,
    initial_vector).
    """
    values, vectors, residuals, iterations, method = lowest_eigenpairs(
        op, count=2, tolerance=tolerance, seed=seed, **options
    )
    result = EigenResult(
        eigenvalue=float(values[0]),
        eigenvector=vectors[:, 0].copy(),
        residual_norm=float(residuals[0]),
        iterations=iterations,
        method=method,
        second_eigenvalue=float(values[1]) if values.size > 1 else None,
        second_eigenvector=vectors[:, 1].copy() if values.size > 1 else None,
    )
    logger.debug(
        f"ground state ({method}, dim={vectors.shape[0]}): "
        f"lambda={result.eigenvalue:.12g}, residual={result.residual_norm:.2e}, "
        f"iterations={iterations}"
    )
    return result


def rayleigh_floor_violations(
    op: MatrixLike, eigenvalue: float, samples: int = 1000, seed: int = 0
) -> int:
    """Count random unit vectors whose Rayleigh quotient falls below ``eigenvalue``."""
    matrix = _as_matrix(op)
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((matrix.shape[0], samples))
    vectors /= np.linalg.norm(vectors, axis=0)
    quotients = np.einsum("ij,ij->j", vectors, matrix @ vectors)
    slack = 1e-10 * max(1.0, abs(eigenvalue))
    return int(np.sum(quotients < eigenvalue - slack))
