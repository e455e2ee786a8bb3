"""Tests for sparse two-photon operator assembly."""

import numpy as np
import pytest
import scipy.sparse as sp

from joint_uncertainty.fock_enr import enumerate_enr
from joint_uncertainty.hg_modes import ModeBasisSpec, build_one_body_matrices
from joint_uncertainty.operators import (
    OperatorKind,
    assemble_omega2,
    assemble_one_body,
    assemble_pair_count,
    assemble_quartic,
    assemble_tau2,
    assemble_uncertainty_hamiltonian,
    canonical_terms,
    dense_brute_force,
    omega2_coefficients,
    relative_asymmetry,
    tau2_coefficients,
)


def _operators(n, m, scale=1.0):
    basis = enumerate_enr(n, m)
    onebody = build_one_body_matrices(ModeBasisSpec(m, scale))
    return basis, onebody, assemble_tau2(basis, onebody), assemble_omega2(basis, onebody)


def _basis_vector(basis, occupation):
    vector = np.zeros(basis.dimension)
    vector[basis.index_of(occupation)] = 1.0
    return vector


class TestCoefficients:
    """Tests for the quartic coefficient tensors."""

    def test_tau2_ground_coefficient(self):
        onebody = build_one_body_matrices(ModeBasisSpec(3))
        assert tau2_coefficients(onebody)[0, 0, 0, 0] == pytest.approx(1.0)

    def test_exchange_symmetry(self):
        onebody = build_one_body_matrices(ModeBasisSpec(4))
        for coefficients in (tau2_coefficients(onebody), omega2_coefficients(onebody)):
            np.testing.assert_allclose(coefficients, coefficients.transpose(1, 0, 3, 2))

    def test_canonical_terms_are_ordered(self):
        onebody = build_one_body_matrices(ModeBasisSpec(4))
        for (m, n), (p, q), _ in canonical_terms(tau2_coefficients(onebody)):
            assert m <= n and p <= q


class TestAssembleTau2:
    """Tests for the time-delay operator."""

    def test_two_photon_expectations(self):
        basis, _, tau2, _ = _operators(2, 2)
        assert tau2.expectation(_basis_vector(basis, (1, 1))) == pytest.approx(2.0)
        assert tau2.expectation(_basis_vector(basis, (2, 0))) == pytest.approx(2.0)

    def test_commutes_with_pair_count(self):
        basis, _, tau2, _ = _operators(3, 4)
        pairs = assemble_pair_count(basis).matrix
        commutator = tau2.matrix @ pairs - pairs @ tau2.matrix
        assert abs(commutator).max() == pytest.approx(0.0, abs=1e-12)

    def test_classical_relation_for_ground_mode(self):
        """All photons in HG0: tau^2 / n(n-1) = 2 Var(t) = 1."""
        for n in (2, 3, 5):
            basis, _, tau2, _ = _operators(n, 4)
            vector = _basis_vector(basis, (n, 0, 0, 0))
            assert tau2.expectation(vector) / (n * (n - 1)) == pytest.approx(1.0)

    def test_rejects_mode_mismatch(self):
        basis = enumerate_enr(2, 3)
        with pytest.raises(ValueError, match="modes"):
            assemble_tau2(basis, build_one_body_matrices(ModeBasisSpec(4)))


class TestAssembleOmega2:
    """Tests for the sum-frequency operator."""

    def test_two_photon_expectations(self):
        basis, _, _, omega2 = _operators(2, 2)
        assert omega2.expectation(_basis_vector(basis, (1, 1))) == pytest.approx(6.0)
        assert omega2.expectation(_basis_vector(basis, (2, 0))) == pytest.approx(2.0)

    @pytest.mark.parametrize("n, m", [(2, 2), (2, 6), (3, 4), (3, 6)])
    def test_positive_semidefinite(self, n, m):
        _, _, tau2, omega2 = _operators(n, m)
        for op in (tau2, omega2):
            spectrum = np.linalg.eigvalsh(op.to_dense())
            assert spectrum.min() >= -1e-9 * np.abs(spectrum).max()

    def test_symmetric(self):
        _, _, tau2, omega2 = _operators(3, 5)
        assert tau2.symmetry_defect() <= 1e-12
        assert omega2.symmetry_defect() <= 1e-12

    def test_rejects_non_hermitian_coefficients(self):
        coefficients = np.zeros((2, 2, 2, 2))
        coefficients[0, 0, 1, 1] = 1.0
        with pytest.raises(ValueError, match="not Hermitian"):
            assemble_quartic(enumerate_enr(2, 2), coefficients)

    def test_accepts_hermitian_pair(self):
        basis = enumerate_enr(2, 2)
        coefficients = np.zeros((2, 2, 2, 2))
        coefficients[0, 0, 1, 1] = coefficients[1, 1, 0, 0] = 1.0
        matrix = assemble_quartic(basis, coefficients).toarray()
        assert matrix[basis.index_of((2, 0)), basis.index_of((0, 2))] == pytest.approx(2.0)
        np.testing.assert_array_equal(matrix, matrix.T)

    def test_relative_asymmetry(self):
        assert relative_asymmetry(sp.csr_matrix(np.array([[1.0, 2.0], [2.0, 0.0]]))) == 0.0
        skewed = sp.csr_matrix(np.array([[0.0, 4.0], [2.0, 0.0]]))
        assert relative_asymmetry(skewed) == pytest.approx(0.5)
        assert relative_asymmetry(sp.csr_matrix((3, 3))) == 0.0


class TestDenseOracle:
    """Sparse assembly against the unfolded quadruple loop."""

    @pytest.mark.parametrize("n, m", [(2, 2), (2, 5), (3, 3), (3, 5)])
    def test_matches_brute_force(self, n, m):
        basis, onebody, tau2, omega2 = _operators(n, m)
        np.testing.assert_allclose(
            tau2.to_dense(), dense_brute_force(basis, tau2_coefficients(onebody)), atol=1e-12
        )
        np.testing.assert_allclose(
            omega2.to_dense(), dense_brute_force(basis, omega2_coefficients(onebody)), atol=1e-12
        )


class TestPairCount:
    """Tests for the pair counter."""

    @pytest.mark.parametrize("n, value", [(2, 2.0), (3, 6.0), (5, 20.0)])
    def test_constant_diagonal(self, n, value):
        op = assemble_pair_count(enumerate_enr(n, 3))
        np.testing.assert_array_equal(op.to_dense(), value * np.eye(op.dimension))
        assert op.kind is OperatorKind.PAIR_COUNT


class TestUncertaintyHamiltonian:
    """Tests for H(xi)."""

    def test_endpoints(self):
        _, _, tau2, omega2 = _operators(2, 3)
        np.testing.assert_array_equal(
            assemble_uncertainty_hamiltonian(tau2, omega2, 0.0).to_dense(), omega2.to_dense()
        )
        np.testing.assert_array_equal(
            assemble_uncertainty_hamiltonian(tau2, omega2, 1.0).to_dense(), tau2.to_dense()
        )

    def test_midpoint_spectrum(self):
        _, _, tau2, omega2 = _operators(2, 2)
        hamiltonian = assemble_uncertainty_hamiltonian(tau2, omega2, 0.5)
        expected = np.linalg.eigvalsh((tau2.to_dense() + omega2.to_dense()) / 2.0).min()
        assert np.linalg.eigvalsh(hamiltonian.to_dense()).min() == pytest.approx(expected)
        assert hamiltonian.label == "uncertainty(0.5)"

    @pytest.mark.parametrize("xi", [-0.1, 1.5])
    def test_rejects_xi_outside_unit_interval(self, xi):
        _, _, tau2, omega2 = _operators(2, 2)
        with pytest.raises(ValueError, match="xi"):
            assemble_uncertainty_hamiltonian(tau2, omega2, xi)

    def test_rejects_basis_mismatch(self):
        _, _, tau2, _ = _operators(2, 3)
        _, _, _, omega2 = _operators(3, 3)
        with pytest.raises(ValueError, match="bases"):
            assemble_uncertainty_hamiltonian(tau2, omega2, 0.5)

    def test_rejects_swapped_operators(self):
        _, _, tau2, omega2 = _operators(2, 3)
        with pytest.raises(ValueError, match="expected"):
            assemble_uncertainty_hamiltonian(omega2, tau2, 0.5)


class TestAssembleOneBody:
    """Tests for quadratic observables."""

    def test_number_operator_sums_to_n(self):
        basis = enumerate_enr(3, 4)
        total = assemble_one_body(basis, np.eye(4))
        np.testing.assert_allclose(total.toarray(), 3.0 * np.eye(basis.dimension))

    def test_derivative_stays_antisymmetric(self):
        basis = enumerate_enr(2, 4)
        onebody = build_one_body_matrices(ModeBasisSpec(4))
        derivative = assemble_one_body(basis, onebody.D).toarray()
        np.testing.assert_allclose(derivative, -derivative.T, atol=1e-14)
