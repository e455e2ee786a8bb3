"""Hermite-Gauss temporal modes and their one-body matrix elements.

Modes are psi_k(t/s)/sqrt(s), with psi_k the normalized Hermite functions and
s the time scale. At s = 1 the ladder algebra t = (a + a^dag)/sqrt(2),
d/dt = (a - a^dag)/sqrt(2) gives every matrix element in closed form; the
elements of t, t^2, d/dt and d^2/dt^2 scale as s, s^2, 1/s and 1/s^2.

The t^2 and d^2/dt^2 matrices are exact projections of the operators onto the
first m modes, not truncated products T @ T or D @ D. The two conventions only
differ in the last two rows and columns.

A Gauss-Hermite quadrature path evaluates the same integrals numerically and
serves as an independent oracle for the closed forms.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial.hermite import hermgauss

logger = logging.getLogger(__name__)

QUADRATURE_NODES = 160


class Observable(Enum):
    """One-body observables with known HG matrix elements."""

    TIME = "t"
    TIME_SQUARED = "t2"
    DERIVATIVE = "dt"
    SECOND_DERIVATIVE = "dt2"


@dataclass(frozen=True)
class ModeBasisSpec:
    """Hermite-Gauss basis of ``mode_count`` modes at dilation ``time_scale``."""

    mode_count: int
    time_scale: float = 1.0

    def __post_init__(self) -> None:
        if int(self.mode_count) != self.mode_count or self.mode_count < 2:
            raise ValueError(f"mode_count must be an integer >= 2, got {self.mode_count}")
        if not np.isfinite(self.time_scale) or self.time_scale <= 0:
            raise ValueError(f"time_scale must be positive, got {self.time_scale}")


@dataclass(frozen=True, eq=False)
class OneBodyMatrices:
    """Matrices of t, t^2, d/dt and d^2/dt^2 in the HG mode basis."""

    spec: ModeBasisSpec
    T: np.ndarray
    T2: np.ndarray
    D: np.ndarray
    D2: np.ndarray

    @property
    def mode_count(self) -> int:
        return self.spec.mode_count

    def matrix(self, observable: Observable) -> np.ndarray:
        """Return the matrix belonging to ``observable``."""
        return {
            Observable.TIME: self.T,
            Observable.TIME_SQUARED: self.T2,
            Observable.DERIVATIVE: self.D,
            Observable.SECOND_DERIVATIVE: self.D2,
        }[observable]


def build_one_body_matrices(spec: ModeBasisSpec) -> OneBodyMatrices:
    """Exact analytic matrix elements of t, t^2, d/dt, d^2/dt^2."""
    m = spec.mode_count
    s = spec.time_scale

    upper = np.sqrt(np.arange(1, m) / 2.0)  # sqrt(k/2) at [k-1, k]
    T = np.zeros((m, m))
    T[np.arange(m - 1), np.arange(1, m)] = upper
    T = T + T.T

    D = np.zeros((m, m))
    D[np.arange(m - 1), np.arange(1, m)] = upper
    D = D - D.T

    k = np.arange(m - 2)
    second = np.sqrt((k + 1.0) * (k + 2.0)) / 2.0
    diagonal = np.arange(m) + 0.5

    T2 = np.diag(diagonal)
    T2[k, k + 2] = second
    T2[k + 2, k] = second

    D2 = np.diag(-diagonal)
    D2[k, k + 2] = second
    D2[k + 2, k] = second

    return OneBodyMatrices(spec=spec, T=s * T, T2=s**2 * T2, D=D / s, D2=D2 / s**2)


# =============================================================================
# Quadrature oracle
# =============================================================================


@lru_cache(maxsize=8)
def _gauss_hermite(nodes: int) -> Tuple[np.ndarray, np.ndarray]:
    return hermgauss(nodes)


def hermite_functions(max_index: int, x: np.ndarray) -> np.ndarray:
    """Values h_k(x), k = 0..max_index, with psi_k(x) = h_k(x) exp(-x^2/2).

    Uses the normalized three-term recurrence, which stays finite where the
    physicists' Hermite polynomials would overflow.
    """
    x = np.asarray(x, dtype=float)
    values = np.zeros((max_index + 1,) + x.shape)
    values[0] = np.pi**-0.25
    if max_index >= 1:
        values[1] = np.sqrt(2.0) * x * values[0]
    for k in range(1, max_index):
        values[k + 1] = (
            np.sqrt(2.0 / (k + 1)) * x * values[k] - np.sqrt(k / (k + 1.0)) * values[k - 1]
        )
    return values


def evaluate_modes(spec: ModeBasisSpec, t: np.ndarray) -> np.ndarray:
    """Mode functions psi_k(t/s)/sqrt(s) on the grid ``t``, shape (m, len(t))."""
    x = np.asarray(t, dtype=float) / spec.time_scale
    h = hermite_functions(spec.mode_count - 1, x)
    return h * np.exp(-(x**2) / 2.0) / np.sqrt(spec.time_scale)


def _differentiate(values: np.ndarray) -> np.ndarray:
    """Apply d/dx through psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}.

    ``values`` holds rows 0..K; the result holds rows 0..K-1.
    """
    count = values.shape[0] - 1
    result = np.zeros((count,) + values.shape[1:])
    for k in range(count):
        result[k] = -np.sqrt((k + 1) / 2.0) * values[k + 1]
        if k > 0:
            result[k] += np.sqrt(k / 2.0) * values[k - 1]
    return result


def quadrature_matrix(
    spec: ModeBasisSpec, observable: Observable, nodes: int = QUADRATURE_NODES
) -> np.ndarray:
    """All m x m overlap integrals of ``observable`` by Gauss-Hermite quadrature.

    Derivatives act on the mode functions pointwise through the HG recurrence,
    so only the integral itself is numerical.
    """
    if nodes < 128:
        raise ValueError(f"quadrature needs at least 128 nodes, got {nodes}")
    m = spec.mode_count
    s = spec.time_scale
    x, w = _gauss_hermite(nodes)
    h = hermite_functions(m + 1, x)

    if observable is Observable.TIME:
        right = s * x * h[:m]
    elif observable is Observable.TIME_SQUARED:
        right = s**2 * x**2 * h[:m]
    elif observable is Observable.DERIVATIVE:
        right = _differentiate(h[: m + 1]) / s
    else:
        right = _differentiate(_differentiate(h[: m + 2])) / s**2

    return np.einsum("jx,x,kx->jk", h[:m], w, right[:m])


def quadrature_element(
    spec: ModeBasisSpec, j: int, observable: Observable, k: int
) -> float:
    """Single overlap integral <psi_j| observable |psi_k> by quadrature."""
    for index in (j, k):
        if not 0 <= index < spec.mode_count:
            raise ValueError(f"mode index {index} outside [0, {spec.mode_count})")
    return float(quadrature_matrix(spec, observable)[j, k])


def gram_matrix(spec: ModeBasisSpec, nodes: int = QUADRATURE_NODES) -> np.ndarray:
    """Overlaps <psi_j|psi_k> of the first m modes by quadrature."""
    x, w = _gauss_hermite(nodes)
    h = hermite_functions(spec.mode_count - 1, x)
    return np.einsum("jx,x,kx->jk", h, w, h)


def max_oracle_deviation(onebody: OneBodyMatrices) -> float:
    """Largest |analytic - quadrature| over all four observables."""
    worst = 0.0
    for observable in Observable:
        oracle = quadrature_matrix(onebody.spec, observable)
        deviation = float(np.max(np.abs(onebody.matrix(observable) - oracle)))
        logger.debug(f"{observable.value}: max oracle deviation {deviation:.3e}")
        worst = max(worst, deviation)
    return worst
