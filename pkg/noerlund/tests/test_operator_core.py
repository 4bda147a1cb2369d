"""
Tests for operators, power norms, resolvents and the classification at 1

Covers:
- Operator validation and matrix_norm
- power_norms, running_max, power_root_bound, spectral_radius_estimate
- shift_norms_closed_form
- resolvent and abel_mean
- classify_one verdicts, projections and rank indeterminacy
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from noerlund.errors import IndeterminateRankError, OperatorError, SpectrumProximityError
from noerlund.models import NormKind, SpectralVerdict, Stratum
from noerlund.services.ensemble import generate_member
from noerlund.services.operator_core import (
    Operator,
    abel_mean,
    classify_one,
    matrix_norm,
    power_norms,
    power_root_bound,
    resolvent,
    running_max,
    shift_norms_closed_form,
    spectral_radius_estimate,
)
from noerlund.services.seq_calculus import RealSeq

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestOperator:
    """Test suite for Operator construction"""

    def test_rejects_bad_shapes(self):
        """Should refuse non-square, empty and non-finite matrices"""
        with pytest.raises(OperatorError):
            Operator(np.zeros((2, 3)))
        with pytest.raises(OperatorError):
            Operator(np.zeros((0, 0)))
        with pytest.raises(OperatorError, match="finite"):
            Operator(np.array([[np.nan]]))

    def test_entries_are_read_only(self):
        T = Operator.identity(2)

        with pytest.raises(ValueError):
            T.entries[0, 0] = 5

    def test_norm_kinds(self):
        """Should use the induced sup, l1 and spectral norms"""
        entries = np.array([[1.0, -2.0], [3.0, 4.0]])

        assert matrix_norm(entries, NormKind.INDUCED_SUP) == 7.0
        assert matrix_norm(entries, NormKind.INDUCED_L1) == 6.0
        assert matrix_norm(entries, NormKind.SPECTRAL_L2) == pytest.approx(np.linalg.svd(entries)[1][0])
        assert matrix_norm(np.array([[np.inf]])) == math.inf

    def test_composition_keeps_norm_kind(self):
        T = Operator(np.array([[0.0, 1.0], [1.0, 0.0]]), NormKind.INDUCED_L1)

        product = T @ T
        assert product.norm_kind is NormKind.INDUCED_L1
        assert product.distance(Operator.identity(2)) == 0.0


class TestPowerNorms:
    """Test suite for power_norms and related helpers"""

    def test_identity(self):
        assert power_norms(Operator.identity(3), 10).to_list() == [1.0] * 11

    def test_jordan_type_matrix(self, jordan_T):
        """Should grow like n + 1 in the sup norm"""
        assert power_norms(jordan_T, 50).to_list() == [float(n + 1) for n in range(51)]

    def test_diagonal_spectral(self):
        T = Operator(np.diag([0.5, 0.25]), NormKind.SPECTRAL_L2)

        assert power_norms(T, 20).as_float() == pytest.approx(0.5 ** np.arange(21), rel=1e-12)

    def test_overflow_saturates(self, caplog):
        """Should saturate at inf and warn"""
        with caplog.at_level("WARNING"):
            norms = power_norms(Operator(np.array([[1e200]])), 3)

        assert norms.overflowed
        assert norms[2] == math.inf
        assert norms[3] == math.inf
        assert "overflow" in caplog.text

    @pytest.mark.property
    @given(seeds, st.sampled_from(list(NormKind)), st.integers(1, 6), st.integers(1, 6))
    @hyp_settings(max_examples=40, deadline=None)
    def test_submultiplicative(self, seed, kind, m, n):
        """Should satisfy ||T^(m+n)|| <= ||T^m|| ||T^n||"""
        rng = np.random.default_rng(seed)
        T = Operator(rng.uniform(-1, 1, (3, 3)) + 1j * rng.uniform(-1, 1, (3, 3)), kind)
        norms = power_norms(T, m + n)

        assert norms[m + n] <= norms[m] * norms[n] * (1 + 1e-12)

    def test_running_max(self):
        """Should keep prefix maxima"""
        assert running_max(RealSeq.from_values([1, 3, 2, 5])).to_list() == [1, 3, 3, 5]
        assert running_max(RealSeq.from_values([4, 3, 2])).to_list() == [4, 4, 4]

    def test_running_max_of_jordan_norms(self, jordan_T):
        norms = power_norms(jordan_T, 20)

        assert running_max(norms).to_list() == norms.to_list()

    def test_root_bound(self, jordan_T):
        """Should bound the N-th root by (M N^alpha)^(1/N)"""
        bound = power_root_bound(power_norms(jordan_T, 100), 1.0)

        assert bound.holds
        assert bound.root == pytest.approx(101 ** (1 / 100))
        assert bound.bound == pytest.approx(200 ** (1 / 100))

    def test_spectral_radius(self, jordan_T):
        """Should approach the spectral radius by normalized squaring"""
        assert spectral_radius_estimate(Operator(np.diag([0.5, 0.25]))) == pytest.approx(0.5, rel=1e-9)
        assert spectral_radius_estimate(jordan_T) == pytest.approx(1.0, abs=1e-9)
        assert spectral_radius_estimate(Operator.zeros(2)) == 0.0


class TestShiftNorms:
    """Test suite for shift_norms_closed_form"""

    def test_first_values(self):
        norms = shift_norms_closed_form(100)

        assert norms[0] == 1.0
        assert norms[1] == pytest.approx(math.e, rel=1e-15)
        assert norms[100] >= math.exp(2 * math.sqrt(101) - 2)

    def test_generator_extends(self):
        """Should continue the closed form beyond the horizon"""
        assert shift_norms_closed_form(10)[20] == pytest.approx(shift_norms_closed_form(20)[20], rel=1e-12)

    @pytest.mark.parametrize("alpha", [1, 2, 4, 6])
    def test_outgrows_powers(self, alpha):
        """Should make ||T^k|| / k^alpha still increase at k = 4096"""
        norms = shift_norms_closed_form(4096).as_float()

        assert norms[4096] / 4096 ** alpha > norms[2048] / 2048 ** alpha


class TestResolvent:
    """Test suite for resolvent and abel_mean"""

    def test_zero_operator(self):
        assert np.allclose(resolvent(Operator.zeros(2), 2.0).entries, 0.5 * np.eye(2))

    def test_jordan_type_matrix_at_one(self, jordan_T):
        """Should invert I - T since 1 is not in the spectrum"""
        R = resolvent(jordan_T, 1.0)

        assert np.allclose(R.entries @ (np.eye(2) - jordan_T.entries), np.eye(2))

    def test_eigenvalue_is_refused(self):
        with pytest.raises(SpectrumProximityError) as excinfo:
            resolvent(Operator(np.array([[1.0]])), 1.0)

        assert excinfo.value.condition == math.inf

    def test_abel_mean_of_identity(self):
        assert np.allclose(abel_mean(Operator.identity(2), 1.5).entries, np.eye(2))

    def test_abel_mean_tends_to_projection(self):
        """Should approach diag(1, 0) as lambda decreases to 1"""
        T = Operator(np.diag([1.0, 0.5]))
        errors = [abel_mean(T, 1.0 + h).distance(Operator(np.diag([1.0, 0.0]))) for h in (1e-1, 1e-2, 1e-3, 1e-4)]

        assert all(later < earlier for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 1e-3

    def test_abel_mean_of_jordan_block_diverges(self, jordan_block):
        """Should blow up like 1/h in the off-diagonal entry"""
        for h in (1e-1, 1e-2, 1e-3):
            assert abs(abel_mean(jordan_block, 1.0 + h).entries[0, 1]) == pytest.approx(1.0 / h, rel=1e-6)

    def test_abel_mean_preconditions(self):
        """Should refuse lambda <= 1 and spectral radius above 1"""
        with pytest.raises(OperatorError):
            abel_mean(Operator.identity(2), 1.0)
        with pytest.raises(OperatorError, match="spectral radius"):
            abel_mean(Operator(np.array([[2.0]])), 3.0)


class TestClassifyOne:
    """Test suite for classify_one"""

    def test_identity(self):
        """Should call 1 a simple pole of I with projection I"""
        result = classify_one(Operator.identity(2))

        assert result.verdict is SpectralVerdict.SIMPLE_POLE
        assert np.allclose(result.projection.entries, np.eye(2))
        assert result.kernel_dim == 2

    def test_jordan_type_matrix(self, jordan_T):
        """Should find 1 in the resolvent set with projection 0"""
        result = classify_one(jordan_T)

        assert result.verdict is SpectralVerdict.RESOLVENT_POINT
        assert result.projection.norm() == 0.0

    def test_jordan_block(self, jordan_block):
        """Should call 1 non-simple for a Jordan block"""
        result = classify_one(jordan_block)

        assert result.verdict is SpectralVerdict.NON_SIMPLE
        assert result.projection is None
        assert result.rank == 1

    def test_diagonal(self):
        result = classify_one(Operator(np.diag([1.0, 0.5])))

        assert result.verdict is SpectralVerdict.SIMPLE_POLE
        assert np.allclose(result.projection.entries, np.diag([1.0, 0.0]), atol=1e-12)

    def test_roundoff_identity(self, rng):
        """Should still see the identity after a similarity in floating point"""
        Q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        S = Q @ np.diag([1.0, 1.5, 2.0, 2.5])
        T = Operator(S @ np.linalg.inv(S))

        assert classify_one(T).verdict is SpectralVerdict.SIMPLE_POLE

    def test_indeterminate_rank(self):
        """Should raise when a singular value sits at the cut"""
        with pytest.raises(IndeterminateRankError) as excinfo:
            classify_one(Operator(np.diag([1.0 - 1e-10, 0.0])))

        assert excinfo.value.cut == pytest.approx(1e-10)

    def test_rejects_nonpositive_tolerance(self):
        with pytest.raises(OperatorError):
            classify_one(Operator.identity(2), tol=0.0)

    @pytest.mark.property
    @given(seeds)
    @hyp_settings(max_examples=40, deadline=None)
    def test_projection_is_spectral(self, seed):
        """Should give an idempotent commuting with T and killing I - T"""
        member = generate_member(np.random.default_rng(seed), 0, Stratum.SEMISIMPLE, 5, NormKind.INDUCED_SUP)
        T = member.operator
        result = classify_one(T)
        P = result.projection.entries
        K = np.eye(T.dim) - T.entries
        scale = matrix_norm(K)

        assert result.verdict is SpectralVerdict.SIMPLE_POLE
        assert matrix_norm(P @ P - P) <= 1e-8
        assert matrix_norm(K @ P) <= 1e-8 * max(scale, 1.0)
        assert matrix_norm(P @ K) <= 1e-8 * max(scale, 1.0)

    @pytest.mark.property
    @given(seeds)
    @hyp_settings(max_examples=20, deadline=None)
    def test_abel_limit_matches_projection(self, seed):
        """Should see the Abel means approach the projection"""
        member = generate_member(np.random.default_rng(seed), 0, Stratum.SEMISIMPLE, 4, NormKind.INDUCED_SUP)
        P = classify_one(member.operator).projection
        errors = [abel_mean(member.operator, 1.0 + h).distance(P) for h in (1e-1, 1e-2, 1e-3, 1e-4)]

        assert all(later <= earlier * 1.1 + 1e-12 for earlier, later in zip(errors, errors[1:]))
        assert errors[-1] < 1e-3
