"""Exchange-symmetric multivariate Gaussian n-photon states.

The joint temporal density is

    |phi(t)|^2 = A_n exp(-(gamma^2/n)(sum t_i)^2 - (delta^2/n) sum_{i<j} (t_i - t_j)^2)
               = A_n exp(-t^T Q t),   Q = delta^2 I + ((gamma^2 - delta^2)/n) 1 1^T

Q has eigenvalue gamma^2 along (1, ..., 1) and delta^2 on its complement, so
everything has a closed form. The quadrature oracle below evaluates the same
pair moments on a tensor Gauss-Hermite grid without using those forms.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np
import scipy.linalg
from numpy.polynomial.hermite import hermgauss

from joint_uncertainty.errors import QuadratureError

logger = logging.getLogger(__name__)

ORACLE_NODES = 64
ORACLE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class GaussianStateParams:
    """Width parameters of the exchange-symmetric Gaussian family."""

    n: int
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    @property
    def ratio(self) -> float:
        return self.gamma / self.delta

    @property
    def precision(self) -> np.ndarray:
        """Q, with |phi|^2 proportional to exp(-t^T Q t)."""
        return self.delta**2 * np.eye(self.n) + (
            (self.gamma**2 - self.delta**2) / self.n
        ) * np.ones((self.n, self.n))

    @property
    def normalization(self) -> float:
        """A_n = pi^(-n/2) sqrt(det Q); undefined for gamma = 0."""
        if self.gamma == 0:
            raise ValueError("gamma = 0 density is not normalizable")
        determinant = self.gamma**2 * self.delta ** (2 * (self.n - 1))
        return float(np.pi ** (-self.n / 2.0) * np.sqrt(determinant))


@dataclass(frozen=True)
class GaussianVariances:
    """Pair and one-photon variances of a Gaussian family state."""

    delta_tau2: float
    delta_omega2: float
    delta_t2: float
    delta_omega_single2: float

    @property
    def product(self) -> float:
        return self.delta_tau2 * self.delta_omega2


def closed_form_product(params: GaussianStateParams) -> float:
    """1 - (2/n)(1 - gamma^2/delta^2); gamma = 0 gives the limit 1 - 2/n."""
    return 1.0 - (2.0 / params.n) * (1.0 - params.ratio**2)


def closed_form_variances(params: GaussianStateParams) -> GaussianVariances:
    """Closed-form variances; for gamma = delta, dtau^2 = 2 dt^2 and dOmega^2 = 2 domega^2."""
    if params.gamma == 0:
        raise ValueError("one-photon time variance diverges at gamma = 0")
    n, g2, d2 = params.n, params.gamma**2, params.delta**2
    return GaussianVariances(
        delta_tau2=1.0 / d2,
        delta_omega2=d2 + 2.0 * (g2 - d2) / n,
        delta_t2=0.5 * ((n - 1) / (n * d2) + 1.0 / (n * g2)),
        delta_omega_single2=0.5 * (d2 + (g2 - d2) / n),
    )


# =============================================================================
# Quadrature oracle
# =============================================================================


@lru_cache(maxsize=8)
def _tensor_grid(n: int, nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = hermgauss(nodes)
    points = np.array(list(itertools.product(x, repeat=n)))
    weights = np.prod(np.array(list(itertools.product(w, repeat=n))), axis=1)
    return points, weights


def _density_average(
    params: GaussianStateParams, integrand: Callable[[np.ndarray], np.ndarray], nodes: int
) -> float:
    """E[g(t)] under |phi|^2 by the substitution t = Q^(-1/2) x."""
    values, vectors = scipy.linalg.eigh(params.precision)
    inverse_root = vectors @ np.diag(values**-0.5) @ vectors.T
    points, weights = _tensor_grid(params.n, nodes)
    samples = points @ inverse_root.T
    return float(weights @ integrand(samples) / weights.sum())


def _pairs(n: int):
    return list(itertools.combinations(range(n), 2))


def _check_oracle_inputs(params: GaussianStateParams, nodes: int) -> None:
    if params.n not in (2, 3):
        raise ValueError(f"tensor-grid oracle supports n in {{2, 3}}, got {params.n}")
    if params.gamma == 0:
        raise ValueError("quadrature oracle needs gamma > 0")
    if nodes < 8:
        raise ValueError(f"need at least 8 nodes per axis, got {nodes}")


def _converged(params: GaussianStateParams, integrand, nodes: int, label: str) -> float:
    fine = _density_average(params, integrand, nodes)
    coarse = _density_average(params, integrand, nodes // 2)
    if abs(fine - coarse) > ORACLE_TOLERANCE * max(1.0, abs(fine)):
        raise QuadratureError(
            f"{label}: {nodes} vs {nodes // 2} nodes differ by {abs(fine - coarse):.3e}"
        )
    return fine


def numeric_product_oracle(
    params: GaussianStateParams, nodes: int = ORACLE_NODES
) -> Tuple[float, float]:
    """(dtau^2, dOmega^2) by tensor Gauss-Hermite quadrature, averaged over all pairs.

    phi is the positive square root of the density, so (d_i + d_j) phi =
    -((Qt)_i + (Qt)_j) phi.
    """
    _check_oracle_inputs(params, nodes)
    Q = params.precision
    pairs = _pairs(params.n)

    def delay(t: np.ndarray) -> np.ndarray:
        return np.mean([(t[:, i] - t[:, j]) ** 2 for i, j in pairs], axis=0)

    def frequency(t: np.ndarray) -> np.ndarray:
        gradient = t @ Q
        return np.mean([(gradient[:, i] + gradient[:, j]) ** 2 for i, j in pairs], axis=0)

    delta_tau2 = _converged(params, delay, nodes, "delay moment")
    delta_omega2 = _converged(params, frequency, nodes, "sum-frequency moment")
    logger.debug(
        f"oracle n={params.n}, gamma={params.gamma:g}, delta={params.delta:g}: "
        f"dtau2={delta_tau2:.12g}, dOmega2={delta_omega2:.12g}"
    )
    return delta_tau2, delta_omega2


def cauchy_schwarz_overlap(params: GaussianStateParams, nodes: int = ORACLE_NODES) -> float:
    """|<(t_i - t_j) phi, (d_i + d_j) phi>|^2, worst pair; vanishes by exchange symmetry."""
    _check_oracle_inputs(params, nodes)
    Q = params.precision
    worst = 0.0
    for i, j in _pairs(params.n):

        def overlap(t: np.ndarray, i: int = i, j: int = j) -> np.ndarray:
            gradient = t @ Q
            return -(t[:, i] - t[:, j]) * (gradient[:, i] + gradient[:, j])

        worst = max(worst, _density_average(params, overlap, nodes) ** 2)
    return worst


# =============================================================================
# Minimum-state condition
# =============================================================================


def check_minimum_condition(
    params: GaussianStateParams, sample_points: Sequence[Sequence[float]]
) -> float:
    """Worst relative deviation from d_i phi = c sum_{k != i} (t_k - t_i) phi.

    One constant c is fitted by least squares over all points and components.
    For gamma = 0 it equals delta^2 / n.
    """
    t = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if t.size == 0 or t.shape[1] != params.n:
        raise ValueError(f"sample points must be t-vectors of length {params.n}")
    if not np.all(np.isfinite(t)):
        raise ValueError("sample points must be finite")

    Q = params.precision
    phi = np.exp(-0.5 * np.einsum("pi,ij,pj->p", t, Q, t))[:, None]
    lhs = -(t @ Q) * phi
    rhs = (t.sum(axis=1, keepdims=True) - params.n * t) * phi

    scale = float(np.sum(rhs**2))
    if scale == 0.0 or float(np.max(np.abs(lhs))) == 0.0:
        raise ValueError("degenerate sample set: both sides vanish at every point")
    constant = float(np.sum(lhs * rhs) / scale)
    deviation = float(np.max(np.abs(lhs - constant * rhs)) / np.max(np.abs(lhs)))
    logger.debug(f"minimum condition: c={constant:.12g}, deviation={deviation:.3e}")
    return deviation
