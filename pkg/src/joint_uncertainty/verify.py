"""Invariant suite behind the ``verify`` command.

Each check returns a measured value and the threshold it must respect. A
check that raises is recorded as failed with the exception text.
"""

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Tuple

import numpy as np

from joint_uncertainty.eigensolver import lowest_eigenpairs
from joint_uncertainty.fock_enr import enumerate_enr
from joint_uncertainty.gaussian_family import (
    GaussianStateParams,
    check_minimum_condition,
    closed_form_product,
    numeric_product_oracle,
)
from joint_uncertainty.gaussian_field import (
    build_ensemble,
    ensemble_observables,
    two_photon_state,
)
from joint_uncertainty.hg_modes import ModeBasisSpec, build_one_body_matrices, max_oracle_deviation
from joint_uncertainty.minimizer import evaluate_product, minimize_over_xi, separable_state
from joint_uncertainty.number_mixtures import (
    PhotonNumberDistribution,
    general_bound,
    random_distribution,
    random_subspace_values,
    verify_chain,
)
from joint_uncertainty.operators import (
    assemble_omega2,
    assemble_pair_count,
    assemble_tau2,
    assemble_uncertainty_hamiltonian,
    dense_brute_force,
    omega2_coefficients,
    tau2_coefficients,
)

logger = logging.getLogger(__name__)

ORACLE_MODES = 21
CHAIN_SAMPLES = 1000


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
            "seconds": self.seconds,
        }


@dataclass
class VerifyReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "check_count": len(self.checks),
            "failures": [check.name for check in self.failures()],
            "checks": [check.to_dict() for check in self.checks],
        }


Check = Callable[["VerifyOptions"], Tuple[float, float, str]]


@dataclass(frozen=True)
class VerifyOptions:
    seed: int = 0
    perturb_t2: float = 0.0


# =============================================================================
# Checks: each returns (value, threshold, detail) with value <= threshold passing
# =============================================================================


def _hg_quadrature(options: VerifyOptions) -> Tuple[float, float, str]:
    onebody = build_one_body_matrices(ModeBasisSpec(ORACLE_MODES))
    if options.perturb_t2:
        T2 = onebody.T2.copy()
        T2[2, 2] += options.perturb_t2
        onebody = replace(onebody, T2=T2)
    return max_oracle_deviation(onebody), 1e-10, f"m={ORACLE_MODES}, all four observables"


def _sparse_vs_dense(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n, m in ((2, 5), (3, 5)):
        basis = enumerate_enr(n, m)
        onebody = build_one_body_matrices(ModeBasisSpec(m))
        for assemble, coefficients in (
            (assemble_tau2, tau2_coefficients(onebody)),
            (assemble_omega2, omega2_coefficients(onebody)),
        ):
            sparse = assemble(basis, onebody).to_dense()
            dense = dense_brute_force(basis, coefficients)
            worst = max(worst, float(np.max(np.abs(sparse - dense))))
    return worst, 1e-12, "n in {2, 3}, m = 5, entrywise"


def _positive_semidefinite(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n, m in ((2, 6), (3, 6)):
        basis = enumerate_enr(n, m)
        onebody = build_one_body_matrices(ModeBasisSpec(m))
        for op in (assemble_tau2(basis, onebody), assemble_omega2(basis, onebody)):
            dense = op.to_dense()
            eigenvalues = np.linalg.eigvalsh(dense)
            worst = max(worst, -float(eigenvalues[0]) / np.linalg.norm(dense, 2))
    return worst, 1e-9, "relative negative eigenvalue of tau2, omega2"


def _number_conservation(options: VerifyOptions) -> Tuple[float, float, str]:
    basis = enumerate_enr(3, 5)
    onebody = build_one_body_matrices(ModeBasisSpec(5))
    pairs = assemble_pair_count(basis).matrix
    worst = 0.0
    for op in (assemble_tau2(basis, onebody), assemble_omega2(basis, onebody)):
        commutator = op.matrix @ pairs - pairs @ op.matrix
        worst = max(worst, float(abs(commutator).max()) if commutator.nnz else 0.0)
    return worst, 1e-12, "[O, n(n-1)] for tau2, omega2"


def _lanczos_vs_dense(options: VerifyOptions) -> Tuple[float, float, str]:
    basis = enumerate_enr(3, 8)
    onebody = build_one_body_matrices(ModeBasisSpec(8))
    hamiltonian = assemble_uncertainty_hamiltonian(
        assemble_tau2(basis, onebody), assemble_omega2(basis, onebody), 0.4
    )
    dense, *_ = lowest_eigenpairs(hamiltonian, count=2, method="dense")
    lanczos, *_ = lowest_eigenpairs(
        hamiltonian, count=2, method="lanczos", krylov_dim=20, seed=options.seed
    )
    return float(np.max(np.abs(dense - lanczos))), 1e-8, f"n=3, m=8, dim={basis.dimension}"


def _classical_relation(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n in (2, 3, 4):
        result = evaluate_product(n, 5, separable_state(n, 5))
        worst = max(worst, abs(result.delta_tau2 - 1.0), abs(result.delta_omega2 - 1.0))
    return worst, 1e-12, "all photons in HG0"


def _nested_basis(options: VerifyOptions) -> Tuple[float, float, str]:
    products = [minimize_over_xi(2, m, seed=options.seed).product for m in range(2, 7)]
    increase = max(b - a for a, b in zip(products, products[1:]))
    return max(increase, 0.0), 1e-9, "n=2, m=2..6"


def _subspace_bound(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n, m in ((3, 4), (4, 3)):
        product = minimize_over_xi(n, m, seed=options.seed).product
        worst = max(worst, (1.0 - 2.0 / n) - product)
    return max(worst, 0.0), 1e-6, "R >= 1 - 2/n"


def _scale_invariance(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n, m in ((2, 8), (3, 6)):
        products = [
            minimize_over_xi(n, m, time_scale=s, seed=options.seed).product
            for s in (0.5, 1.0, 2.0)
        ]
        worst = max(worst, max(products) - min(products))
    return worst, 1e-6, "(n, m) in {(2, 8), (3, 6)}, s in {0.5, 1, 2}"


def _gaussian_closed_form(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = 0.0
    for n in (2, 3):
        for ratio in (0.1, 0.3, 1.0, 2.0):
            params = GaussianStateParams(n, ratio, 1.0)
            delta_tau2, delta_omega2 = numeric_product_oracle(params)
            worst = max(worst, abs(delta_tau2 * delta_omega2 - closed_form_product(params)))
    return worst, 1e-6, "n in {2, 3}, gamma/delta in {0.1, 0.3, 1, 2}"


def _minimum_condition(options: VerifyOptions) -> Tuple[float, float, str]:
    rng = np.random.default_rng(options.seed)
    worst = 0.0
    for n in (2, 3, 4):
        points = rng.normal(size=(100, n))
        worst = max(worst, check_minimum_condition(GaussianStateParams(n, 0.0, 1.0), points))
    separable = check_minimum_condition(
        GaussianStateParams(3, 1.0, 1.0), rng.normal(size=(100, 3))
    )
    if separable <= 0.1:
        return separable, 0.1, "separable state should violate the condition"
    return worst, 1e-10, f"gamma = 0, n in {{2, 3, 4}}; separable violation {separable:.3g}"


def _mixture_chain(options: VerifyOptions) -> Tuple[float, float, str]:
    rng = np.random.default_rng(options.seed)
    failures = 0
    for _ in range(CHAIN_SAMPLES):
        dist = random_distribution(rng)
        tau, omega = random_subspace_values(dist, rng)
        failures += not verify_chain(dist, tau, omega).passed
    return float(failures), 0.0, f"{CHAIN_SAMPLES} random distributions"


def _biphoton_bound(options: VerifyOptions) -> Tuple[float, float, str]:
    bound = general_bound(PhotonNumberDistribution(np.array([0.0, 0.0, 1.0])))
    return abs(bound.value), 0.0, "{p_2 = 1}"


def _wick_single_mode(options: VerifyOptions) -> Tuple[float, float, str]:
    worst = max(
        abs(ensemble_observables(build_ensemble(0.0, g)).product - 1.0) for g in (0.5, 2.0)
    )
    return worst, 1e-10, "one Schmidt mode"


def _wick_low_gain(options: VerifyOptions) -> Tuple[float, float, str]:
    ensemble = build_ensemble(0.5, 1e-4)
    basis, vector = two_photon_state(ensemble)
    direct = evaluate_product(2, basis.mode_count, vector).product
    return abs(ensemble_observables(ensemble).product - direct), 1e-6, "mu=0.5, g=1e-4"


CHECKS: Dict[str, Check] = {
    "hg_quadrature_oracle": _hg_quadrature,
    "sparse_vs_dense_assembly": _sparse_vs_dense,
    "operators_positive_semidefinite": _positive_semidefinite,
    "operators_conserve_photon_number": _number_conservation,
    "lanczos_vs_dense": _lanczos_vs_dense,
    "separable_classical_relation": _classical_relation,
    "nested_basis_monotonicity": _nested_basis,
    "subspace_lower_bound": _subspace_bound,
    "scale_invariance": _scale_invariance,
    "gaussian_closed_form": _gaussian_closed_form,
    "gaussian_minimum_condition": _minimum_condition,
    "mixture_bound_chain": _mixture_chain,
    "biphoton_general_bound": _biphoton_bound,
    "wick_single_mode": _wick_single_mode,
    "wick_vs_two_photon_sector": _wick_low_gain,
}


def run_check(name: str, options: VerifyOptions) -> CheckResult:
    start = time.perf_counter()
    try:
        value, threshold, detail = CHECKS[name](options)
        passed = bool(value <= threshold)
    except Exception as e:
        logger.error(f"check {name} raised {type(e).__name__}: {e}")
        value, threshold, detail, passed = float("nan"), 0.0, f"{type(e).__name__}: {e}", False
    seconds = time.perf_counter() - start
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"{name}: {'pass' if passed else 'FAIL'} ({value:.3e} vs {threshold:.1e})")
    return CheckResult(name, passed, float(value), float(threshold), detail, seconds)


def run_verify(seed: int = 0, perturb_t2: float = 0.0) -> VerifyReport:
    """Run every check; ``perturb_t2`` shifts T2[2, 2] to exercise the oracle check."""
    options = VerifyOptions(seed=seed, perturb_t2=perturb_t2)
    return VerifyReport([run_check(name, options) for name in CHECKS])
