"""Tests for the ENR Fock basis and ladder action."""

import math

import numpy as np
import pytest

from joint_uncertainty.fock_enr import (
    apply_quadratic_term_all,
    apply_quartic_term,
    apply_quartic_term_all,
    enumerate_enr,
)


def _term_matrix(basis, creators, annihilators):
    dense = np.zeros((basis.dimension, basis.dimension))
    sources, targets, amplitudes = apply_quartic_term_all(basis, creators, annihilators)
    dense[targets, sources] = amplitudes
    return dense


class TestEnumerateEnr:
    """Tests for basis enumeration."""

    def test_two_photons_two_modes(self):
        basis = enumerate_enr(2, 2)
        assert basis.dimension == 3
        assert [tuple(row) for row in basis.states] == [(2, 0), (1, 1), (0, 2)]

    @pytest.mark.parametrize(
        "n, m, dimension", [(3, 3, 10), (5, 15, 11628), (2, 15, 120), (4, 6, 126)]
    )
    def test_dimension_is_binomial(self, n, m, dimension):
        basis = enumerate_enr(n, m)
        assert basis.dimension == dimension == math.comb(n + m - 1, m - 1)

    def test_every_state_has_n_photons(self):
        basis = enumerate_enr(4, 5)
        assert np.all(basis.states.sum(axis=1) == 4)
        assert np.all(basis.states >= 0)

    def test_descending_lexicographic_order(self):
        rows = [tuple(row) for row in enumerate_enr(3, 4).states]
        assert rows == sorted(rows, reverse=True)
        assert len(set(rows)) == len(rows)

    def test_index_round_trip(self):
        basis = enumerate_enr(3, 5)
        for i, row in enumerate(basis.states):
            assert basis.index_of(row) == i
        np.testing.assert_array_equal(basis.lookup(basis.states), np.arange(basis.dimension))

    def test_lookup_without_packed_keys(self):
        """Large mode counts fall back to dict lookup."""
        basis = enumerate_enr(2, 40)
        assert basis.keys is None
        np.testing.assert_array_equal(basis.lookup(basis.states[:50]), np.arange(50))

    def test_unknown_occupation(self):
        basis = enumerate_enr(2, 3)
        with pytest.raises(ValueError, match="not in"):
            basis.index_of((1, 1, 1))

    @pytest.mark.parametrize("n, m", [(1, 3), (0, 3), (2, 1)])
    def test_rejects_small_inputs(self, n, m):
        with pytest.raises(ValueError):
            enumerate_enr(n, m)

    def test_label(self):
        assert enumerate_enr(2, 2).label(1) == "|1,1>"


class TestApplyQuarticTerm:
    """Tests for the scalar ladder action."""

    @pytest.fixture
    def basis(self):
        return enumerate_enr(2, 2)

    def test_moves_pair_between_modes(self, basis):
        result = apply_quartic_term(basis, (0, 0), (1, 1), basis.index_of((0, 2)))
        assert len(result) == 1
        target, amplitude = result[0]
        assert target == basis.index_of((2, 0))
        assert amplitude == pytest.approx(2.0)

    def test_number_operator_product(self, basis):
        state = basis.index_of((1, 1))
        assert apply_quartic_term(basis, (0, 1), (1, 0), state) == [(state, pytest.approx(1.0))]

    def test_empty_mode_annihilates(self, basis):
        assert apply_quartic_term(basis, (0, 1), (0, 0), basis.index_of((1, 1))) == []

    def test_rejects_mode_out_of_range(self, basis):
        with pytest.raises(ValueError, match="mode index"):
            apply_quartic_term(basis, (0, 2), (0, 0), 0)


class TestVectorizedAction:
    """Tests for the vectorized ladder action."""

    def test_matches_scalar_action(self):
        basis = enumerate_enr(3, 4)
        for creators, annihilators in [((0, 2), (1, 3)), ((1, 1), (0, 0)), ((3, 0), (2, 2))]:
            sources, targets, amplitudes = apply_quartic_term_all(basis, creators, annihilators)
            expected = {}
            for state in range(basis.dimension):
                for target, amplitude in apply_quartic_term(basis, creators, annihilators, state):
                    expected[state] = (target, amplitude)
            assert set(sources.tolist()) == set(expected)
            for source, target, amplitude in zip(sources, targets, amplitudes):
                assert expected[source][0] == target
                assert expected[source][1] == pytest.approx(amplitude)

    def test_adjoint_term_is_transpose(self):
        basis = enumerate_enr(3, 4)
        forward = _term_matrix(basis, (0, 2), (1, 3))
        backward = _term_matrix(basis, (3, 1), (2, 0))
        np.testing.assert_allclose(forward, backward.T)

    def test_photon_number_conserved(self):
        basis = enumerate_enr(3, 5)
        _, targets, _ = apply_quartic_term_all(basis, (4, 4), (0, 1))
        assert np.all(basis.states[targets].sum(axis=1) == 3)

    def test_number_operator_is_diagonal(self):
        basis = enumerate_enr(3, 3)
        sources, targets, amplitudes = apply_quadratic_term_all(basis, 1, 1)
        np.testing.assert_array_equal(sources, targets)
        np.testing.assert_allclose(amplitudes, basis.states[sources, 1])
