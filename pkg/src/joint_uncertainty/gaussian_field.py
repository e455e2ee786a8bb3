"""Multimode squeezed vacuum through Gaussian moment factorization.

The field is a product of single-mode squeezers acting on Hermite-Gauss
Schmidt modes k = 0..K-1 with geometric coefficients

    lambda_k = sqrt(1 - mu^2) mu^k,    r_k = g lambda_k.

Its second moments N = <a^dag_j a_k> and M = <a_j a_k> are diagonal in that
basis, and every fourth moment factorizes as

    <a^dag_m a^dag_n a_p a_q> = N[m,q] N[n,p] + N[m,p] N[n,q] + M[m,n] M[p,q]

so the pair observables reduce to traces of products of m x m matrices.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from joint_uncertainty.errors import RootFindingError, TruncationError
from joint_uncertainty.fock_enr import EnrBasis, enumerate_enr
from joint_uncertainty.hg_modes import ModeBasisSpec, OneBodyMatrices, build_one_body_matrices

logger = logging.getLogger(__name__)

DEFAULT_MODE_CAP = 512
TAIL_FRACTION = 1e-12
MU_GRID = tuple(round(0.05 * i, 2) for i in range(20))
MU_XATOL = 1e-4
SCALING_MIN_MEAN = 10.0
SCALING_MIN_POINTS = 4

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI_SQUARE = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True, eq=False)
class SchmidtEnsemble:
    """Squeezing parameters of the retained Schmidt modes."""

    mode_indices: np.ndarray
    squeeze_params: np.ndarray
    schmidt_ratio: float
    gain: float

    @property
    def mode_count(self) -> int:
        return int(self.mode_indices.size)

    @property
    def coefficients(self) -> np.ndarray:
        """lambda_k, normalized over the retained modes."""
        if self.gain == 0:
            return np.zeros_like(self.squeeze_params)
        return self.squeeze_params / self.gain

    @property
    def occupations(self) -> np.ndarray:
        return np.sinh(self.squeeze_params) ** 2

    @property
    def mean_photon_number(self) -> float:
        return float(self.occupations.sum())


@dataclass(frozen=True, eq=False)
class FieldCorrelators:
    """N = <a^dag_j a_k> and M = <a_j a_k> in the Hermite-Gauss basis."""

    N: np.ndarray
    M: np.ndarray

    @property
    def mode_count(self) -> int:
        return int(self.N.shape[0])

    def purity_defect(self) -> float:
        """Largest violation of M^2 = N(N + 1) in the eigenbasis of N.

        Also includes any off-diagonal part of M in that basis, so a pair that
        is not simultaneously diagonal shows up as a defect.
        """
        occupations, vectors = np.linalg.eigh(self.N)
        anomalous = vectors.T @ self.M @ vectors
        diagonal = np.diag(anomalous)
        off_diagonal = anomalous - np.diag(diagonal)
        pure = np.max(np.abs(diagonal**2 - occupations * (occupations + 1.0)), initial=0.0)
        return float(max(pure, np.max(np.abs(off_diagonal), initial=0.0)))


@dataclass(frozen=True)
class FieldObservables:
    """One-photon and pair moments of a Gaussian field state."""

    delta_t2: float
    delta_omega2: float
    delta_tau2: float
    delta_omega_pair2: float
    mean_n: float
    pair_mean: float
    mean_t: float = 0.0
    mean_omega: float = 0.0

    @property
    def product(self) -> float:
        return self.delta_tau2 * self.delta_omega_pair2


@dataclass(frozen=True)
class BsvMinimum:
    """Best squeezing parameters found for one target mean photon number."""

    target_mean_n: float
    mu: float
    gain: float
    product: float
    mode_count: int
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "mean_n": self.target_mean_n,
            "mu": self.mu,
            "gain": self.gain,
            "product": self.product,
            "mode_count": self.mode_count,
            "evaluations": self.evaluations,
        }


@dataclass(frozen=True)
class ScalingFit:
    """log(1 - R) = log c - k log <n>."""

    k: float
    c: float
    rms: float
    point_count: int

    def to_dict(self) -> dict:
        return {"k": self.k, "c": self.c, "rms": self.rms, "point_count": self.point_count}


# =============================================================================
# Ensembles and correlators
# =============================================================================


def _check_mu(mu: float) -> None:
    if not 0.0 <= mu < 1.0:
        raise ValueError(f"schmidt ratio mu must lie in [0, 1), got {mu}")


def schmidt_coefficients(mu: float, count: int) -> np.ndarray:
    """Untruncated geometric coefficients sqrt(1 - mu^2) mu^k for k < count."""
    _check_mu(mu)
    k = np.arange(count)
    return math.sqrt(1.0 - mu * mu) * mu**k


def build_ensemble(mu: float, g: float, mode_cap: int = DEFAULT_MODE_CAP) -> SchmidtEnsemble:
    """Retain Schmidt modes until the next one carries < 1e-12 of <n>.

    Raises TruncationError when mode_cap modes are not enough. g = 0 gives
    the vacuum on a single mode.
    """
    _check_mu(mu)
    if not np.isfinite(g) or g < 0:
        raise ValueError(f"gain must be >= 0, got {g}")
    if mode_cap < 1:
        raise ValueError(f"mode_cap must be >= 1, got {mode_cap}")

    lam = schmidt_coefficients(mu, mode_cap)
    occupations = np.sinh(g * lam) ** 2
    if g == 0:
        count = 1
    else:
        below = np.flatnonzero(occupations < TAIL_FRACTION * occupations.sum())
        if below.size == 0:
            raise TruncationError(
                f"mu={mu}, g={g}: {mode_cap} Schmidt modes do not reach the "
                f"{TAIL_FRACTION:g} tail criterion"
            )
        count = max(int(below[0]), 1)

    kept = lam[:count] / np.linalg.norm(lam[:count])
    logger.debug(f"mu={mu:.4f}, g={g:.6g}: {count} Schmidt modes retained")
    return SchmidtEnsemble(
        mode_indices=np.arange(count),
        squeeze_params=g * kept,
        schmidt_ratio=float(mu),
        gain=float(g),
    )


def correlators(ensemble: SchmidtEnsemble, mode_count: Optional[int] = None) -> FieldCorrelators:
    """N and M embedded in the first ``mode_count`` HG modes (default: at least two)."""
    size = mode_count if mode_count is not None else max(ensemble.mode_count, 2)
    if size < ensemble.mode_count:
        raise ValueError(
            f"mode_count {size} is smaller than the {ensemble.mode_count} Schmidt modes"
        )
    r = ensemble.squeeze_params
    N = np.zeros((size, size))
    M = np.zeros((size, size))
    idx = ensemble.mode_indices
    N[idx, idx] = np.sinh(r) ** 2
    M[idx, idx] = np.sinh(r) * np.cosh(r)
    return FieldCorrelators(N=N, M=M)


def _trace(a: np.ndarray, b: np.ndarray) -> float:
    """tr(a b) for symmetric or antisymmetric operands."""
    return float(np.einsum("ij,ji->", a, b))


def observables_from_correlators(
    corr: FieldCorrelators, onebody: OneBodyMatrices
) -> FieldObservables:
    """Wick contraction of the tau^2 and Omega^2 coefficient tensors."""
    if corr.mode_count != onebody.mode_count:
        raise ValueError(
            f"correlators have {corr.mode_count} modes, one-body matrices {onebody.mode_count}"
        )
    N, M = corr.N, corr.M
    T, T2, D, D2 = onebody.T, onebody.T2, onebody.D, onebody.D2

    mean_n = float(np.trace(N))
    pair_mean = mean_n**2 + _trace(N, N) + float(np.sum(M * M))
    if pair_mean <= 0:
        raise ValueError(f"<n(n-1)> = {pair_mean:.3e}: state has no photon pairs")

    N2, M2 = N @ N, M @ M
    TN, TM, DN, DM = T @ N, T @ M, D @ N, D @ M
    tau2 = 2.0 * (mean_n * _trace(T2, N) + _trace(T2, N2) + _trace(T2, M2)) - 2.0 * (
        np.trace(TN) ** 2 + _trace(TN, TN) + _trace(TM, TM)
    )
    omega2 = -2.0 * (mean_n * _trace(D2, N) + _trace(D2, N2) + _trace(D2, M2)) - 2.0 * (
        np.trace(DN) ** 2 + _trace(DN, DN) - _trace(DM, DM)
    )

    mean_t = float(np.trace(TN)) / mean_n
    mean_omega = float(np.trace(DN)) / mean_n
    return FieldObservables(
        delta_t2=_trace(T2, N) / mean_n - mean_t**2,
        delta_omega2=-_trace(D2, N) / mean_n,
        delta_tau2=float(tau2) / pair_mean,
        delta_omega_pair2=float(omega2) / pair_mean,
        mean_n=mean_n,
        pair_mean=pair_mean,
        mean_t=mean_t,
        mean_omega=mean_omega,
    )


def ensemble_observables(ensemble: SchmidtEnsemble, time_scale: float = 1.0) -> FieldObservables:
    corr = correlators(ensemble)
    onebody = build_one_body_matrices(ModeBasisSpec(corr.mode_count, time_scale))
    return observables_from_correlators(corr, onebody)


def biphoton_limit_product(mu: float) -> float:
    """Low-gain product ((1 - mu)/(1 + mu))^2 of the double-Gaussian biphoton."""
    _check_mu(mu)
    return ((1.0 - mu) / (1.0 + mu)) ** 2


def two_photon_state(ensemble: SchmidtEnsemble) -> Tuple[EnrBasis, np.ndarray]:
    """Normalized n = 2 sector of the field: amplitudes proportional to tanh(r_k) on |2_k>."""
    m = max(ensemble.mode_count, 2)
    basis = enumerate_enr(2, m)
    vector = np.zeros(basis.dimension)
    for k, r in zip(ensemble.mode_indices, ensemble.squeeze_params):
        occupation = [0] * m
        occupation[int(k)] = 2
        vector[basis.index_of(tuple(occupation))] = math.tanh(r)
    norm = np.linalg.norm(vector)
    if norm == 0:
        raise ValueError("vacuum ensemble has no two-photon component")
    return basis, vector / norm


# =============================================================================
# Minimum search
# =============================================================================


def solve_gain(target_mean_n: float, mu: float, mode_cap: int = DEFAULT_MODE_CAP) -> float:
    """g with sum_k sinh^2(g lambda_k) = target over the untruncated spectrum."""
    if not target_mean_n > 0:
        raise ValueError(f"target mean photon number must be positive, got {target_mean_n}")
    lam = schmidt_coefficients(mu, mode_cap)

    def excess(g: float) -> float:
        return float(np.sum(np.sinh(g * lam) ** 2) - target_mean_n)

    # the leading mode alone reaches the target at asinh(sqrt(<n>)) / lam_0; at mu = 0 that is
    # the root itself, so pad it to keep the endpoint signs apart under rounding
    upper = math.asinh(math.sqrt(target_mean_n)) / lam[0]
    bracket = (0.0, upper * (1.0 + 1e-6) + 1e-12)
    try:
        gain, info = brentq(excess, *bracket, xtol=1e-14, rtol=1e-14, full_output=True)
    except (ValueError, RuntimeError) as e:
        raise RootFindingError(f"gain root for <n>={target_mean_n}, mu={mu}: {e}", bracket) from e
    if not info.converged:
        raise RootFindingError(f"gain root for <n>={target_mean_n}, mu={mu}: {info.flag}", bracket)
    return float(gain)


def _golden_section(f, a: float, b: float, tol: float) -> Tuple[float, float, int]:
    """Minimize f on [a, b]; returns (x, f(x), evaluations)."""
    h = b - a
    if h <= tol:
        return a, f(a), 1
    steps = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c, d = a + INV_PHI_SQUARE * h, a + INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(steps - 1):
        h *= INV_PHI
        if yc < yd:
            b, d, yd = d, c, yc
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            d = a + INV_PHI * h
            yd = f(d)
    x, y = (c, yc) if yc < yd else (d, yd)
    return x, y, steps + 1


def scan_minimum(
    target_mean_n: float,
    mu_grid: Optional[Sequence[float]] = None,
    mode_cap: int = DEFAULT_MODE_CAP,
    xatol: float = MU_XATOL,
) -> BsvMinimum:
    """Grid over mu at fixed <n>, then golden-section refinement next to the best point."""
    if not target_mean_n > 0:
        raise ValueError(f"target mean photon number must be positive, got {target_mean_n}")
    grid = np.asarray(sorted(mu_grid if mu_grid is not None else MU_GRID), dtype=float)
    if grid.size == 0:
        raise ValueError("mu grid is empty")

    cache = {}

    def product(mu: float) -> float:
        if mu not in cache:
            gain = solve_gain(target_mean_n, mu, mode_cap)
            ensemble = build_ensemble(mu, gain, mode_cap)
            cache[mu] = (ensemble_observables(ensemble).product, gain, ensemble.mode_count)
        return cache[mu][0]

    values = [product(float(mu)) for mu in grid]
    best = int(np.argmin(values))
    low = grid[max(best - 1, 0)]
    high = grid[min(best + 1, grid.size - 1)]
    if high > low:
        _golden_section(product, float(low), float(high), xatol)

    mu_star = min(cache, key=lambda mu: cache[mu][0])
    r_min, gain, count = cache[mu_star]
    logger.info(f"<n>={target_mean_n:g}: R_min={r_min:.12g} at mu={mu_star:.5f}, g={gain:.6g}")
    return BsvMinimum(
        target_mean_n=float(target_mean_n),
        mu=float(mu_star),
        gain=gain,
        product=r_min,
        mode_count=count,
        evaluations=len(cache),
    )


def fit_scaling(points: Sequence[Tuple[float, float]]) -> ScalingFit:
    """Least squares of log(1 - R) against log <n> over points with <n> >= 10."""
    used: List[Tuple[float, float]] = [(n, r) for n, r in points if n >= SCALING_MIN_MEAN]
    if len(used) < SCALING_MIN_POINTS:
        raise ValueError(
            f"need at least {SCALING_MIN_POINTS} points with <n> >= {SCALING_MIN_MEAN:g}, "
            f"got {len(used)}"
        )
    for n, r in used:
        if r >= 1.0:
            raise ValueError(f"R = {r} at <n> = {n} has no nonclassical deficit to fit")

    x = np.log([n for n, _ in used])
    y = np.log([1.0 - r for _, r in used])
    line = np.polynomial.Polynomial.fit(x, y, 1).convert()
    intercept, slope = line.coef
    rms = float(np.sqrt(np.mean((line(x) - y) ** 2)))
    fit = ScalingFit(k=float(-slope), c=float(math.exp(intercept)), rms=rms, point_count=len(used))
    logger.info(f"scaling fit: k={fit.k:.4f}, c={fit.c:.4f}, rms={fit.rms:.2e}")
    return fit
