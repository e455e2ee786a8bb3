"""Sparse two-photon observables on an ENR basis.

tau^2 and Omega^2 are normal-ordered quartic operators

    sum_{mnpq} C_{mnpq} a^dag_m a^dag_n a_p a_q

whose coefficients come from expanding (t - t')^2 and -(d_t + d_t')^2 in the
Hermite-Gauss basis. Creators commute with each other, as do annihilators, so
terms are folded onto unordered pairs m <= n, p <= q before they touch the
basis. This halves the loop at least and absorbs the C_{mnpq} = C_{nmqp}
symmetry.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from joint_uncertainty.fock_enr import (
    EnrBasis,
    apply_quadratic_term_all,
    apply_quartic_term,
    apply_quartic_term_all,
)
from joint_uncertainty.hg_modes import OneBodyMatrices

logger = logging.getLogger(__name__)

COEFFICIENT_CUTOFF = 1e-15
SYMMETRY_TOLERANCE = 1e-10


class OperatorKind(Enum):
    """Label of an assembled two-photon observable."""

    TAU2 = "tau2"
    OMEGA2 = "omega2"
    PAIR_COUNT = "pair_count"
    UNCERTAINTY = "uncertainty"


@dataclass(frozen=True, eq=False)
class TwoPhotonOperator:
    """Sparse symmetric matrix of a quartic observable on ``basis``."""

    basis: EnrBasis
    matrix: sp.csr_matrix
    kind: OperatorKind
    xi: Optional[float] = None

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @property
    def label(self) -> str:
        if self.kind is OperatorKind.UNCERTAINTY:
            return f"uncertainty({self.xi:g})"
        return self.kind.value

    def expectation(self, vector: np.ndarray) -> float:
        """<v|O|v> for a real or complex state vector (not renormalized)."""
        return float(np.real(np.vdot(vector, self.matrix @ vector)))

    def symmetry_defect(self) -> float:
        """max |O - O^T| relative to max |O|."""
        return relative_asymmetry(self.matrix)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()


def relative_asymmetry(matrix: sp.spmatrix) -> float:
    """max |A - A^T| relative to max |A|; 0 for an empty matrix."""
    scale = abs(matrix).max() if matrix.nnz else 0.0
    if scale == 0.0:
        return 0.0
    diff = (matrix - matrix.T).tocsr()
    diff.eliminate_zeros()
    return float(abs(diff).max() / scale) if diff.nnz else 0.0


# =============================================================================
# Coefficient tensors
# =============================================================================


def tau2_coefficients(onebody: OneBodyMatrices) -> np.ndarray:
    """C^tau_{mnpq} = T2[m,q] d_np + T2[n,p] d_mq - 2 T[m,q] T[n,p]."""
    eye = np.eye(onebody.mode_count)
    T, T2 = onebody.T, onebody.T2
    return (
        np.einsum("mq,np->mnpq", T2, eye)
        + np.einsum("np,mq->mnpq", T2, eye)
        - 2.0 * np.einsum("mq,np->mnpq", T, T)
    )


def omega2_coefficients(onebody: OneBodyMatrices) -> np.ndarray:
    """C^Omega_{mnpq} = -(D2[m,q] d_np + D2[n,p] d_mq + 2 D[m,q] D[n,p])."""
    eye = np.eye(onebody.mode_count)
    D, D2 = onebody.D, onebody.D2
    return -(
        np.einsum("mq,np->mnpq", D2, eye)
        + np.einsum("np,mq->mnpq", D2, eye)
        + 2.0 * np.einsum("mq,np->mnpq", D, D)
    )


def canonical_terms(
    coefficients: np.ndarray,
) -> List[Tuple[Tuple[int, int], Tuple[int, int], float]]:
    """Fold a full coefficient tensor onto unordered creator/annihilator pairs.

    Returns ``[((m, n), (p, q), coefficient)]`` with m <= n, p <= q and the
    coefficient summed over all orderings that give the same operator.
    """
    count = coefficients.shape[0]
    folded = coefficients + coefficients.transpose(1, 0, 2, 3)
    diag = np.arange(count)
    folded[diag, diag] /= 2.0
    folded = folded + folded.transpose(0, 1, 3, 2)
    folded[:, :, diag, diag] /= 2.0

    cutoff = COEFFICIENT_CUTOFF * max(float(np.max(np.abs(coefficients))), 1.0)
    terms = []
    for m, n, p, q in zip(*np.nonzero(np.abs(folded) > cutoff)):
        if m <= n and p <= q:
            terms.append(((int(m), int(n)), (int(p), int(q)), float(folded[m, n, p, q])))
    return terms


# =============================================================================
# Assembly
# =============================================================================


def _check_modes(basis: EnrBasis, onebody: OneBodyMatrices) -> None:
    if onebody.mode_count != basis.mode_count:
        raise ValueError(
            f"one-body matrices have {onebody.mode_count} modes, "
            f"basis has {basis.mode_count}"
        )


def assemble_quartic(basis: EnrBasis, coefficients: np.ndarray) -> sp.csr_matrix:
    """Sparse matrix of sum C_{mnpq} a^dag_m a^dag_n a_p a_q on ``basis``."""
    terms = canonical_terms(coefficients)
    rows, cols, values = [], [], []
    for creators, annihilators, coefficient in terms:
        sources, targets, amplitudes = apply_quartic_term_all(basis, creators, annihilators)
        if sources.size == 0:
            continue
        rows.append(targets)
        cols.append(sources)
        values.append(coefficient * amplitudes)

    dim = basis.dimension
    if rows:
        matrix = sp.coo_matrix(
            (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
            shape=(dim, dim),
        ).tocsr()
    else:
        matrix = sp.csr_matrix((dim, dim))
    matrix.sum_duplicates()
    asymmetry = relative_asymmetry(matrix)
    if asymmetry > SYMMETRY_TOLERANCE:
        raise ValueError(
            f"quartic coefficients are not Hermitian: relative asymmetry {asymmetry:.3e} "
            f"on n={basis.photon_number}, m={basis.mode_count}"
        )
    # remaining asymmetry is rounding
    matrix = ((matrix + matrix.T) * 0.5).tocsr()
    matrix.eliminate_zeros()
    logger.debug(
        f"quartic assembly n={basis.photon_number}, m={basis.mode_count}: "
        f"{len(terms)} terms, nnz={matrix.nnz}"
    )
    return matrix


def assemble_tau2(basis: EnrBasis, onebody: OneBodyMatrices) -> TwoPhotonOperator:
    """Time-delay operator tau^2 on ``basis``."""
    _check_modes(basis, onebody)
    matrix = assemble_quartic(basis, tau2_coefficients(onebody))
    return TwoPhotonOperator(basis=basis, matrix=matrix, kind=OperatorKind.TAU2)


def assemble_omega2(basis: EnrBasis, onebody: OneBodyMatrices) -> TwoPhotonOperator:
    """Sum-frequency operator Omega^2 on ``basis``."""
    _check_modes(basis, onebody)
    matrix = assemble_quartic(basis, omega2_coefficients(onebody))
    return TwoPhotonOperator(basis=basis, matrix=matrix, kind=OperatorKind.OMEGA2)


def assemble_pair_count(basis: EnrBasis) -> TwoPhotonOperator:
    """n(n-1) on ``basis``; constant because the photon number is fixed."""
    n = basis.photon_number
    matrix = sp.identity(basis.dimension, format="csr") * float(n * (n - 1))
    return TwoPhotonOperator(basis=basis, matrix=matrix.tocsr(), kind=OperatorKind.PAIR_COUNT)


def assemble_uncertainty_hamiltonian(
    tau2: TwoPhotonOperator, omega2: TwoPhotonOperator, xi: float
) -> TwoPhotonOperator:
    """H(xi) = xi tau^2 + (1 - xi) Omega^2."""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    if tau2.kind is not OperatorKind.TAU2 or omega2.kind is not OperatorKind.OMEGA2:
        raise ValueError(f"expected (tau2, omega2), got ({tau2.label}, {omega2.label})")
    if tau2.basis is not omega2.basis and (
        tau2.basis.photon_number != omega2.basis.photon_number
        or tau2.basis.mode_count != omega2.basis.mode_count
    ):
        raise ValueError("tau2 and omega2 live on different bases")

    if xi == 0.0:
        matrix = omega2.matrix.copy()
    elif xi == 1.0:
        matrix = tau2.matrix.copy()
    else:
        matrix = (xi * tau2.matrix + (1.0 - xi) * omega2.matrix).tocsr()
    return TwoPhotonOperator(
        basis=tau2.basis, matrix=matrix, kind=OperatorKind.UNCERTAINTY, xi=float(xi)
    )


def assemble_one_body(basis: EnrBasis, matrix: np.ndarray) -> sp.csr_matrix:
    """Sparse matrix of sum_jk X[j,k] a^dag_j a_k on ``basis``.

    Not symmetrized: an antisymmetric X (the derivative) stays antisymmetric.
    """
    if matrix.shape != (basis.mode_count, basis.mode_count):
        raise ValueError(
            f"one-body matrix shape {matrix.shape} does not match {basis.mode_count} modes"
        )
    rows, cols, values = [], [], []
    for j, k in zip(*np.nonzero(matrix)):
        sources, targets, amplitudes = apply_quadratic_term_all(basis, int(j), int(k))
        rows.append(targets)
        cols.append(sources)
        values.append(matrix[j, k] * amplitudes)

    dim = basis.dimension
    if not rows:
        return sp.csr_matrix((dim, dim))
    return sp.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()


def dense_brute_force(basis: EnrBasis, coefficients: np.ndarray) -> np.ndarray:
    """Reference dense assembly: every (m, n, p, q) term on every state, no folding."""
    dim = basis.dimension
    count = basis.mode_count
    dense = np.zeros((dim, dim))
    for m in range(count):
        for n in range(count):
            for p in range(count):
                for q in range(count):
                    coefficient = coefficients[m, n, p, q]
                    if coefficient == 0.0:
                        continue
                    for source in range(dim):
                        for target, amplitude in apply_quartic_term(
                            basis, (m, n), (p, q), source
                        ):
                            dense[target, source] += coefficient * amplitude
    return dense
