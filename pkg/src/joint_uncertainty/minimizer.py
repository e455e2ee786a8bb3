"""Minimum joint uncertainty product in a fixed (n, m) truncation.

For each mixing parameter xi the ground state of H(xi) = xi tau^2 +
(1 - xi) Omega^2 is a candidate minimum-uncertainty state. The product
R(xi) = <tau^2><Omega^2> / (n(n-1))^2 is evaluated on that state and
minimized over xi: a coarse grid scan locates the basin, a bounded Brent
search refines it.

The ground energy gives a second, independent estimate. On the ground state
of H(xi), E(xi) = xi <tau^2> + (1 - xi) <Omega^2> >= 2 sqrt(xi (1 - xi) <tau^2><Omega^2>),
so E(xi)^2 / (4 xi (1 - xi)) never falls below that state's product and
meets it where the two terms balance. The smallest of these values over the
evaluated xi is reported as the eigenvalue criterion.
"""

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar

from joint_uncertainty.config import SolverConfig, XiSearchConfig
from joint_uncertainty.eigensolver import EigenResult, ground_state
from joint_uncertainty.fock_enr import EnrBasis, enumerate_enr
from joint_uncertainty.hg_modes import ModeBasisSpec, OneBodyMatrices, build_one_body_matrices
from joint_uncertainty.operators import (
    TwoPhotonOperator,
    assemble_omega2,
    assemble_one_body,
    assemble_tau2,
    assemble_uncertainty_hamiltonian,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroundStateResult:
    """Expectations of one candidate minimum-uncertainty state."""

    n: int
    m: int
    xi: float
    ground_energy: float
    delta_tau2: float
    delta_omega2: float
    product: float
    mean_t: float
    mean_omega: float
    time_scale: float = 1.0
    residual_norm: float = 0.0
    eigenvalue_xi: Optional[float] = None
    eigenvalue_product: Optional[float] = None
    evaluations: int = 1
    eigenvector: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def lower_bound(self) -> float:
        """1 - 2/n, the infinite-basis limit for this photon number."""
        return 1.0 - 2.0 / self.n

    @property
    def balance(self) -> Tuple[float, float]:
        """(xi dtau^2, (1 - xi) dOmega^2); equal at a stationary minimum."""
        return self.xi * self.delta_tau2, (1.0 - self.xi) * self.delta_omega2

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "n": self.n,
            "m": self.m,
            "xi": self.xi,
            "ground_energy": self.ground_energy,
            "delta_tau2": self.delta_tau2,
            "delta_omega2": self.delta_omega2,
            "product": self.product,
            "mean_t": self.mean_t,
            "mean_omega": self.mean_omega,
            "time_scale": self.time_scale,
            "residual_norm": self.residual_norm,
            "evaluations": self.evaluations,
        }
        if self.eigenvalue_xi is not None:
            data["eigenvalue_xi"] = self.eigenvalue_xi
            data["eigenvalue_product"] = self.eigenvalue_product
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GroundStateResult":
        names = {f for f in cls.__dataclass_fields__ if f != "eigenvector"}
        return cls(**{k: v for k, v in data.items() if k in names})


@dataclass(frozen=True)
class VarianceFractions:
    """Pair variances relative to twice the one-photon variances."""

    delta_t2: float
    delta_omega_single2: float
    tau_fraction: float
    omega_fraction: float


# =============================================================================
# Problem setup
# =============================================================================


@dataclass(frozen=True, eq=False)
class _Operators:
    basis: EnrBasis
    onebody: OneBodyMatrices
    tau2: TwoPhotonOperator
    omega2: TwoPhotonOperator


@lru_cache(maxsize=16)
def _operators(n: int, m: int, time_scale: float) -> _Operators:
    basis = enumerate_enr(n, m)
    onebody = build_one_body_matrices(ModeBasisSpec(m, time_scale))
    logger.debug(f"assembling tau2/omega2 for n={n}, m={m}, s={time_scale:g}")
    return _Operators(
        basis=basis,
        onebody=onebody,
        tau2=assemble_tau2(basis, onebody),
        omega2=assemble_omega2(basis, onebody),
    )


@lru_cache(maxsize=16)
def _one_body_operators(
    n: int, m: int, time_scale: float
) -> Tuple[sp.csr_matrix, sp.csr_matrix, sp.csr_matrix, sp.csr_matrix]:
    ops = _operators(n, m, time_scale)
    onebody = ops.onebody
    return tuple(  # type: ignore[return-value]
        assemble_one_body(ops.basis, matrix)
        for matrix in (onebody.T, onebody.D, onebody.T2, onebody.D2)
    )


class UncertaintyProblem:
    """Operators and solver settings for one (n, m, time_scale) cell.

    Counts eigensolves so callers can check that cached runs do none.
    """

    def __init__(
        self,
        n: int,
        m: int,
        time_scale: float = 1.0,
        solver: Optional[SolverConfig] = None,
        seed: int = 0,
    ):
        if int(n) != n or n < 2:
            raise ValueError(f"photon number must be an integer >= 2, got {n}")
        if int(m) != m or m < 2:
            raise ValueError(f"mode count must be an integer >= 2, got {m}")
        self.n = int(n)
        self.m = int(m)
        self.time_scale = float(time_scale)
        self.solver = solver or SolverConfig()
        self.seed = seed
        self.eigensolves = 0
        self._ops = _operators(self.n, self.m, self.time_scale)
        self._warm_start: Optional[np.ndarray] = None

    @property
    def pair_count(self) -> float:
        return float(self.n * (self.n - 1))

    @property
    def basis(self) -> EnrBasis:
        return self._ops.basis

    @property
    def tau2(self) -> TwoPhotonOperator:
        return self._ops.tau2

    @property
    def omega2(self) -> TwoPhotonOperator:
        return self._ops.omega2

    def solve(self, xi: float) -> EigenResult:
        hamiltonian = assemble_uncertainty_hamiltonian(self.tau2, self.omega2, xi)
        start = None
        if self._warm_start is not None and self.basis.dimension > self.solver.dense_threshold:
            # a symmetric start vector would keep Lanczos inside one parity sector
            noise = np.random.default_rng(self.seed + self.eigensolves).standard_normal(
                self.basis.dimension
            )
            start = self._warm_start + 0.1 * noise / np.linalg.norm(noise)
        result = ground_state(
            hamiltonian,
            tolerance=self.solver.tolerance,
            seed=self.seed,
            dense_threshold=self.solver.dense_threshold,
            krylov_dim=self.solver.krylov_dim,
            max_restarts=self.solver.max_restarts,
            initial_vector=start,
        )
        self.eigensolves += 1
        self._warm_start = result.eigenvector
        return result

    def evaluate(
        self,
        vector: np.ndarray,
        xi: float = 0.5,
        ground_energy: float = float("nan"),
        residual_norm: float = 0.0,
    ) -> GroundStateResult:
        """Normalized expectations of an arbitrary state vector on this basis."""
        vector = np.asarray(vector)
        if vector.shape != (self.basis.dimension,):
            raise ValueError(
                f"state vector has shape {vector.shape}, basis dimension is {self.basis.dimension}"
            )
        norm = np.linalg.norm(vector)
        if norm == 0.0:
            raise ValueError("state vector must be nonzero")
        vector = vector / norm

        delta_tau2 = self.tau2.expectation(vector) / self.pair_count
        delta_omega2 = self.omega2.expectation(vector) / self.pair_count
        time_op, derivative_op, _, _ = _one_body_operators(self.n, self.m, self.time_scale)
        mean_t = float(np.real(np.vdot(vector, time_op @ vector))) / self.n
        mean_omega = float(np.real(-1j * np.vdot(vector, derivative_op @ vector))) / self.n

        return GroundStateResult(
            n=self.n,
            m=self.m,
            xi=float(xi),
            ground_energy=float(ground_energy),
            delta_tau2=delta_tau2,
            delta_omega2=delta_omega2,
            product=delta_tau2 * delta_omega2,
            mean_t=mean_t,
            mean_omega=mean_omega,
            time_scale=self.time_scale,
            residual_norm=residual_norm,
            eigenvector=vector,
        )

    def product_at_xi(self, xi: float) -> GroundStateResult:
        """Ground state of H(xi) and its product; degenerate pairs keep the smaller product."""
        if not 0.0 < xi < 1.0:
            raise ValueError(f"xi must lie strictly inside (0, 1), got {xi}")
        eigen = self.solve(xi)
        result = self.evaluate(eigen.eigenvector, xi, eigen.eigenvalue, eigen.residual_norm)
        if eigen.is_degenerate() and eigen.second_eigenvector is not None:
            other = self.evaluate(
                eigen.second_eigenvector, xi, eigen.second_eigenvalue, eigen.residual_norm
            )
            logger.debug(
                f"n={self.n}, m={self.m}, xi={xi:.6f}: degenerate ground state, "
                f"products {result.product:.12g} / {other.product:.12g}"
            )
            if other.product < result.product:
                result = other
        logger.debug(f"n={self.n}, m={self.m}, xi={xi:.8f}: R={result.product:.12g}")
        return result

    def relative_fractions(self, result: GroundStateResult) -> VarianceFractions:
        """Pair variances over twice the one-photon variances of the same state."""
        if result.eigenvector is None:
            raise ValueError("result carries no state vector")
        vector = result.eigenvector
        _, _, t2_op, d2_op = _one_body_operators(self.n, self.m, self.time_scale)
        delta_t2 = float(vector @ (t2_op @ vector)) / self.n - result.mean_t**2
        delta_w2 = -float(vector @ (d2_op @ vector)) / self.n - result.mean_omega**2
        return VarianceFractions(
            delta_t2=delta_t2,
            delta_omega_single2=delta_w2,
            tau_fraction=result.delta_tau2 / (2.0 * delta_t2),
            omega_fraction=result.delta_omega2 / (2.0 * delta_w2),
        )


# =============================================================================
# Public operations
# =============================================================================


def product_at_xi(
    n: int,
    m: int,
    xi: float,
    time_scale: float = 1.0,
    solver: Optional[SolverConfig] = None,
    seed: int = 0,
) -> GroundStateResult:
    """Product R on the ground state of H(xi) in the (n, m) truncation."""
    return UncertaintyProblem(n, m, time_scale, solver, seed).product_at_xi(xi)


def separable_state(n: int, m: int) -> np.ndarray:
    """All n photons in the HG0 mode."""
    basis = enumerate_enr(n, m)
    vector = np.zeros(basis.dimension)
    vector[basis.index_of((n,) + (0,) * (m - 1))] = 1.0
    return vector


def evaluate_product(
    n: int, m: int, vector: np.ndarray, time_scale: float = 1.0
) -> GroundStateResult:
    """Expectations of an arbitrary state vector (no eigensolve)."""
    return UncertaintyProblem(n, m, time_scale).evaluate(vector)


def _eigenvalue_bound(result: GroundStateResult) -> float:
    pairs = result.n * (result.n - 1)
    return result.ground_energy**2 / (4.0 * result.xi * (1.0 - result.xi) * pairs**2)


def _bracket(grid: np.ndarray, best: int) -> Tuple[float, float]:
    low = grid[best - 1] if best > 0 else grid[0] / 2.0
    high = grid[best + 1] if best < grid.size - 1 else grid[-1] + (1.0 - grid[-1]) / 2.0
    return float(low), float(high)


def minimize_over_xi(
    n: int,
    m: int,
    time_scale: float = 1.0,
    search: Optional[XiSearchConfig] = None,
    solver: Optional[SolverConfig] = None,
    seed: int = 0,
    problem: Optional[UncertaintyProblem] = None,
) -> GroundStateResult:
    """Minimum product over xi: grid scan, then bounded Brent refinement."""
    search = search or XiSearchConfig()
    search.validate()
    problem = problem or UncertaintyProblem(n, m, time_scale, solver, seed)

    evaluated: Dict[float, GroundStateResult] = {}

    def evaluate(xi: float) -> float:
        xi = float(xi)
        if xi not in evaluated:
            evaluated[xi] = problem.product_at_xi(xi)
        return evaluated[xi].product

    grid = np.linspace(search.lower, search.upper, search.grid_points)
    products = [evaluate(xi) for xi in grid]
    best = int(np.argmin(products))
    low, high = _bracket(grid, best)
    logger.debug(f"n={n}, m={m}: grid minimum R={products[best]:.12g} at xi={grid[best]:.4f}")

    minimize_scalar(
        evaluate, bounds=(low, high), method="bounded", options={"xatol": search.xatol}
    )

    results: List[GroundStateResult] = list(evaluated.values())
    optimum = min(results, key=lambda r: r.product)
    bounds = [(r.xi, _eigenvalue_bound(r)) for r in results]
    eigenvalue_xi, eigenvalue_product = min(bounds, key=lambda item: item[1])

    optimum = replace(
        optimum,
        eigenvalue_xi=eigenvalue_xi,
        eigenvalue_product=eigenvalue_product,
        evaluations=len(results),
    )
    tau_part, omega_part = optimum.balance
    logger.info(
        f"n={n}, m={m}: R={optimum.product:.12g} at xi={optimum.xi:.6f} "
        f"({len(results)} evaluations)"
    )
    if abs(tau_part - omega_part) > 0.01 * max(tau_part, omega_part):
        logger.debug(f"n={n}, m={m}: balance {tau_part:.6g} vs {omega_part:.6g}")
    return optimum
