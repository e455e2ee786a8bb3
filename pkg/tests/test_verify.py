"""Tests for the invariant suite."""

from unittest.mock import patch

import pytest

from joint_uncertainty.verify import (
    CHECKS,
    CheckResult,
    VerifyOptions,
    VerifyReport,
    run_check,
    run_verify,
)

FAST_CHECKS = [
    "hg_quadrature_oracle",
    "sparse_vs_dense_assembly",
    "operators_positive_semidefinite",
    "operators_conserve_photon_number",
    "separable_classical_relation",
    "gaussian_minimum_condition",
    "biphoton_general_bound",
    "wick_single_mode",
    "wick_vs_two_photon_sector",
]


class TestChecks:
    """Individual checks on the unperturbed build."""

    @pytest.mark.parametrize("name", FAST_CHECKS)
    def test_check_passes(self, name):
        result = run_check(name, VerifyOptions())
        assert result.passed, result.detail
        assert result.value <= result.threshold
        assert result.seconds >= 0.0

    def test_perturbed_oracle_fails(self):
        result = run_check("hg_quadrature_oracle", VerifyOptions(perturb_t2=1e-3))
        assert not result.passed
        assert result.value > 1e-4

    def test_raising_check_is_recorded(self):
        def broken(options):
            raise RuntimeError("boom")

        with patch.dict(CHECKS, {"hg_quadrature_oracle": broken}):
            result = run_check("hg_quadrature_oracle", VerifyOptions())
        assert not result.passed
        assert "RuntimeError: boom" in result.detail


class TestReport:
    """Tests for VerifyReport."""

    def test_failures_and_dict(self):
        report = VerifyReport(
            [
                CheckResult("a", True, 0.0, 1.0),
                CheckResult("b", False, 2.0, 1.0, "too large"),
            ]
        )
        assert not report.passed
        assert [c.name for c in report.failures()] == ["b"]
        data = report.to_dict()
        assert data["check_count"] == 2
        assert data["failures"] == ["b"]
        assert data["checks"][1]["detail"] == "too large"

    def test_empty_report_passes(self):
        assert VerifyReport().passed

    def test_run_verify_runs_every_check(self):
        fake = {name: (lambda options: (0.0, 1.0, "")) for name in CHECKS}
        with patch.dict(CHECKS, fake):
            report = run_verify()
        assert report.passed
        assert [c.name for c in report.checks] == list(CHECKS)


@pytest.mark.slow
class TestFullSuite:
    """The complete suite on the real build."""

    def test_all_checks_pass(self):
        report = run_verify(seed=0)
        assert report.passed, [c.to_dict() for c in report.failures()]
        assert len(report.checks) == len(CHECKS)
