"""
Tests for the worked-example reproductions

Covers:
- the Jordan-type weights and the alternating identity in exact arithmetic
- reproduce_jordan_example verdicts, measured norm ratios and the
  regularity threshold
- reproduce_shift_example verdicts, including a horizon too short for
  the root check
"""

from dataclasses import replace
from fractions import Fraction

import pytest

from noerlund.config import load_settings
from noerlund.errors import InsufficientHorizonError
from noerlund.services.ergodic_engine import convergence_report
from noerlund.services.reproduction import (
    alternating_moment,
    jordan_operator,
    jordan_weight_increments,
    reproduce_jordan_example,
    reproduce_shift_example,
)
from noerlund.services.seq_calculus import RealSeq, shape_check, sigma

JORDAN_CHECKS = [
    "alternating_identity",
    "linear_power_norms",
    "means_converge_to_zero",
    "norm_ratio_lower_bound",
    "weights_concave_summable",
]
SHIFT_CHECKS = [
    "exponential_lower_bound",
    "root_tends_to_one",
    "growth_index_undetermined",
    "first_norm_is_e",
    "outgrows_powers",
]


class TestJordanWeights:
    """Test suite for the Jordan-type weights"""

    def test_first_increments(self):
        a = jordan_weight_increments(4)

        assert a.exact
        assert a.to_list()[:3] == [1, Fraction(5, 2), Fraction(7, 3)]

    def test_float_path_matches(self):
        exact = jordan_weight_increments(30).as_float()
        approx = jordan_weight_increments(30, exact=False).as_float()

        assert approx == pytest.approx(exact, rel=1e-14)

    def test_alternating_moment(self):
        """Should give -1/n for every n >= 1"""
        a = jordan_weight_increments(40)

        assert alternating_moment(a, 1) == -1
        assert all(alternating_moment(a, n) == Fraction(-1, n) for n in range(1, 41))

    def test_weights_are_concave(self):
        assert shape_check(sigma(jordan_weight_increments(200))).concave

    def test_operator(self):
        assert jordan_operator().induced_norm() == 2


class TestReproduceJordan:
    """Test suite for reproduce_jordan_example"""

    def test_all_checks_pass(self):
        """Should pass all five checks at N = 64"""
        result = reproduce_jordan_example(64)

        assert [v.name for v in result.verdicts] == JORDAN_CHECKS
        assert result.passed, result.failures
        assert result.norms.to_list()[-1] == 65
        assert result.report.norm_ratio_tail > 3

    def test_separate_convergence_horizon(self):
        result = reproduce_jordan_example(16, convergence_horizon=64)

        assert result.horizon == 16
        assert result.report.horizon == 64
        assert result.passed

    def test_regularity_uses_its_own_threshold(self):
        """Should judge the N = 64 weights against the reproduction threshold, not the verifier's"""
        checks = {v.name: v for v in reproduce_jordan_example(64).verdicts}
        strict = {
            v.name: v
            for v in reproduce_jordan_example(64, config=load_settings(reproduction_l1_tail_fraction=1e-3)).verdicts
        }

        assert checks["weights_concave_summable"].passed
        assert 1e-3 < checks["weights_concave_summable"].witness < 1e-2
        assert "threshold 0.01" in checks["weights_concave_summable"].detail
        assert not strict["weights_concave_summable"].passed

    def test_norm_ratio_is_measured(self):
        """Should read ||T^n||/s(n) from the computed powers"""
        result = reproduce_jordan_example(64)
        check = {v.name: v for v in result.verdicts}["norm_ratio_lower_bound"]

        assert check.detail.startswith("measured")
        assert check.witness == result.report.norm_ratios.as_float()[64]
        assert check.witness == pytest.approx(65 / sigma(jordan_weight_increments(64, exact=False)).as_float()[64])

    def test_norm_ratio_follows_the_report(self, monkeypatch):
        """Should fail when the measured ratios fall below the bound"""
        from noerlund.services import reproduction

        def shrunk(*args, **kwargs):
            report = convergence_report(*args, **kwargs)
            return replace(report, norm_ratios=RealSeq.from_values(report.norm_ratios.as_float() / 100.0, exact=False))

        monkeypatch.setattr(reproduction, "convergence_report", shrunk)
        check = {v.name: v for v in reproduce_jordan_example(64).verdicts}["norm_ratio_lower_bound"]

        assert not check.passed
        assert check.failing_index == 3

    def test_rejects_short_horizon(self):
        with pytest.raises(InsufficientHorizonError):
            reproduce_jordan_example(4)


class TestReproduceShift:
    """Test suite for reproduce_shift_example"""

    def test_all_checks_pass(self):
        """Should pass every check at N = 4096"""
        result = reproduce_shift_example(4096)

        assert [v.name for v in result.verdicts] == SHIFT_CHECKS
        assert result.passed, result.failures

    def test_short_horizon_fails_root_check(self):
        """Should record the root check as failing at N = 256"""
        result = reproduce_shift_example(256)
        failing = {v.name: v for v in result.failures}

        assert "root_tends_to_one" in failing
        assert failing["root_tends_to_one"].failing_index == 256
        assert failing["root_tends_to_one"].witness > 1.05

    def test_rejects_bad_input(self):
        with pytest.raises(InsufficientHorizonError):
            reproduce_shift_example(32)
        with pytest.raises(ValueError):
            reproduce_shift_example(4096, alphas=[])
