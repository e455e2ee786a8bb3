"""Tests for Hermite-Gauss one-body matrices."""

import numpy as np
import pytest
from scipy.integrate import trapezoid

from joint_uncertainty.hg_modes import (
    ModeBasisSpec,
    Observable,
    build_one_body_matrices,
    evaluate_modes,
    gram_matrix,
    max_oracle_deviation,
    quadrature_element,
    quadrature_matrix,
)


class TestModeBasisSpec:
    """Tests for ModeBasisSpec validation."""

    def test_rejects_single_mode(self):
        with pytest.raises(ValueError, match="mode_count"):
            ModeBasisSpec(mode_count=1)

    @pytest.mark.parametrize("scale", [0.0, -1.0, float("nan")])
    def test_rejects_bad_time_scale(self, scale):
        with pytest.raises(ValueError, match="time_scale"):
            ModeBasisSpec(mode_count=3, time_scale=scale)


class TestBuildOneBodyMatrices:
    """Tests for the analytic matrix elements."""

    def test_two_mode_time_matrix(self):
        onebody = build_one_body_matrices(ModeBasisSpec(2))
        expected = np.array([[0.0, 1.0], [1.0, 0.0]]) / np.sqrt(2.0)
        np.testing.assert_allclose(onebody.T, expected, atol=1e-15)

    def test_three_mode_second_derivative(self):
        onebody = build_one_body_matrices(ModeBasisSpec(3))
        assert onebody.D2[0, 0] == pytest.approx(-0.5)
        assert onebody.D2[0, 2] == pytest.approx(np.sqrt(2.0) / 2.0)
        assert onebody.D2[2, 0] == pytest.approx(np.sqrt(2.0) / 2.0)

    def test_dilation_scaling(self):
        base = build_one_body_matrices(ModeBasisSpec(6, 1.0))
        wide = build_one_body_matrices(ModeBasisSpec(6, 2.0))
        np.testing.assert_allclose(wide.T, 2.0 * base.T)
        np.testing.assert_allclose(wide.T2, 4.0 * base.T2)
        np.testing.assert_allclose(wide.D, base.D / 2.0)
        np.testing.assert_allclose(wide.D2, base.D2 / 4.0)

    def test_symmetries_and_definiteness(self):
        onebody = build_one_body_matrices(ModeBasisSpec(12))
        np.testing.assert_array_equal(onebody.T, onebody.T.T)
        np.testing.assert_array_equal(onebody.T2, onebody.T2.T)
        np.testing.assert_array_equal(onebody.D, -onebody.D.T)
        np.testing.assert_array_equal(onebody.D2, onebody.D2.T)
        assert np.linalg.eigvalsh(onebody.T2).min() >= -1e-12
        assert np.linalg.eigvalsh(-onebody.D2).min() >= -1e-12

    def test_band_structure(self):
        onebody = build_one_body_matrices(ModeBasisSpec(9))
        j, k = np.indices((9, 9))
        assert np.all(onebody.T[np.abs(j - k) != 1] == 0.0)
        assert np.all(onebody.T2[~np.isin(np.abs(j - k), [0, 2])] == 0.0)
        assert np.all(onebody.D2[~np.isin(np.abs(j - k), [0, 2])] == 0.0)

    def test_projection_differs_from_truncated_product(self):
        """t^2 is the exact projection; T @ T only differs in the corner."""
        m = 7
        onebody = build_one_body_matrices(ModeBasisSpec(m))
        difference = onebody.T2 - onebody.T @ onebody.T
        nonzero = np.argwhere(np.abs(difference) > 1e-14)

        assert len(nonzero) > 0
        assert np.all(nonzero >= m - 2)
        assert difference[m - 1, m - 1] == pytest.approx(m / 2.0)


class TestQuadratureOracle:
    """Tests for the Gauss-Hermite oracle."""

    @pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
    def test_matches_analytic_up_to_index_20(self, scale):
        onebody = build_one_body_matrices(ModeBasisSpec(21, scale))
        assert max_oracle_deviation(onebody) <= 1e-10

    def test_gram_matrix_is_identity(self):
        gram = gram_matrix(ModeBasisSpec(21))
        np.testing.assert_allclose(gram, np.eye(21), atol=1e-10)

    def test_single_elements(self):
        spec = ModeBasisSpec(3)
        assert quadrature_element(spec, 0, Observable.TIME_SQUARED, 0) == pytest.approx(0.5)
        assert quadrature_element(spec, 0, Observable.TIME, 0) == pytest.approx(0.0, abs=1e-14)
        assert quadrature_element(
            spec, 1, Observable.SECOND_DERIVATIVE, 1
        ) == pytest.approx(-1.5)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError, match="mode index"):
            quadrature_element(ModeBasisSpec(3), 3, Observable.TIME, 0)

    def test_rejects_coarse_rule(self):
        with pytest.raises(ValueError, match="128"):
            quadrature_matrix(ModeBasisSpec(3), Observable.TIME, nodes=64)

    def test_detects_perturbed_matrix(self):
        """A 1e-3 change in T2 is visible to the oracle."""
        onebody = build_one_body_matrices(ModeBasisSpec(5))
        onebody.T2[2, 2] += 1e-3
        assert max_oracle_deviation(onebody) == pytest.approx(1e-3, rel=1e-6)


class TestEvaluateModes:
    """Tests for pointwise mode functions."""

    def test_ground_mode_is_gaussian(self):
        t = np.linspace(-3.0, 3.0, 13)
        values = evaluate_modes(ModeBasisSpec(2), t)
        np.testing.assert_allclose(values[0], np.pi**-0.25 * np.exp(-(t**2) / 2.0))

    def test_scaled_modes_stay_normalized(self):
        t = np.linspace(-30.0, 30.0, 6001)
        values = evaluate_modes(ModeBasisSpec(4, 3.0), t)
        norms = trapezoid(values**2, t, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-8)
