"""
Tests for least concave majorants

Covers:
- lcm_recursive with and without a tail slope
- lcm_hull_oracle and its agreement with the recursion
- contact_structure (ν recursion, eventual affinity)
- float-path contact matching
- limsup_ratio, its growth precondition, and chord monotonicity
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from noerlund.errors import MajorantError
from noerlund.services.concave_majorant import (
    chord_monotonicity_violations,
    contact_structure,
    lcm_hull_oracle,
    lcm_recursive,
    limsup_ratio,
)
from noerlund.services.seq_calculus import RealSeq, cesaro_numbers


sequences = st.lists(st.integers(min_value=-40, max_value=40), min_size=2, max_size=30).map(RealSeq.from_values)


class TestLcmRecursive:
    """Test suite for lcm_recursive"""

    def test_spike_with_flat_tail(self):
        """Should level off after the spike when the tail slope is 0"""
        b = RealSeq.from_values([0, 1, 0, 0, 0, 0])
        result = lcm_recursive(b, tail_slope=0)

        assert result.c.to_list() == [0, 1, 1, 1, 1, 1]
        assert result.contact_indices == (0, 1)
        assert result.n_sup == 1
        assert not result.beyond_horizon

    def test_spike_on_finite_prefix(self):
        """Should descend to the last point without a tail slope"""
        b = RealSeq.from_values([0, 1, 0, 0, 0, 0])
        result = lcm_recursive(b)

        assert result.c.to_list() == [0, 1, Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), 0]
        assert result.contact_indices == (0, 1, 5)
        assert result.beyond_horizon

    def test_concave_input_is_fixed(self):
        """Should return a concave sequence unchanged"""
        b = RealSeq.from_values([0, 3, 5, 6, 6])
        result = lcm_recursive(b)

        assert result.c.to_list() == b.to_list()
        assert result.contact_indices == (0, 1, 2, 3, 4)

    def test_concave_float_input_is_fixed(self):
        """Should touch every index of A_0.5 up to the contact tolerance"""
        b = cesaro_numbers(0.5, 50).values
        result = lcm_recursive(b)

        assert result.contact_indices == tuple(range(51))
        assert np.allclose(result.c.as_float(), b.as_float(), rtol=1e-12)

    def test_convex_input_gives_chord(self):
        """Should replace n^2 by the chord 8n on 0..8"""
        b = RealSeq.from_values([n * n for n in range(9)])
        result = lcm_recursive(b)

        assert result.c.to_list() == [8 * n for n in range(9)]
        assert result.contact_indices == (0, 8)

    def test_minus_infinity_tail_slope_is_no_slope(self):
        """Should treat -inf like an omitted tail slope"""
        b = RealSeq.from_values([0, 1, 0, 0])

        assert lcm_recursive(b, float("-inf")).c.to_list() == lcm_recursive(b).c.to_list()

    def test_rejects_bad_input(self):
        """Should refuse horizon 0 and non-finite tail slopes"""
        with pytest.raises(MajorantError):
            lcm_recursive(RealSeq.from_values([1]))
        with pytest.raises(MajorantError):
            lcm_recursive(RealSeq.from_values([1, 2]), float("inf"))
        with pytest.raises(MajorantError):
            lcm_recursive(RealSeq.from_values([1, 2]), float("nan"))


class TestHullOracle:
    """Test suite for lcm_hull_oracle"""

    def test_descending_chord(self):
        """Should join (0,5) and (4,0) by a straight line"""
        result = lcm_hull_oracle(RealSeq.from_values([5, 0, 0, 0, 0]))

        assert result.c.to_list() == [5, 3.75, 2.5, 1.25, 0]
        assert result.contact_indices == (0, 4)

    def test_constant(self):
        b = RealSeq.from_values([2, 2, 2, 2])

        assert lcm_hull_oracle(b).c.to_list() == b.to_list()

    @pytest.mark.property
    @given(sequences)
    @hyp_settings(max_examples=80, deadline=None)
    def test_agrees_with_recursion(self, b):
        """Should produce the same majorant and contacts as the recursion"""
        recursive = lcm_recursive(b)
        oracle = lcm_hull_oracle(b)

        assert recursive.c.to_list() == oracle.c.to_list()
        assert recursive.contact_indices == oracle.contact_indices
        assert all(c >= v for c, v in zip(recursive.c.to_list(), b.to_list()))


class TestContactStructure:
    """Test suite for contact_structure"""

    def test_spike_with_flat_tail(self):
        """Should stop at ν = (0, 1) and report the flat tail"""
        b = RealSeq.from_values([0, 1, 0, 0, 0, 0])
        structure = contact_structure(b, lcm_recursive(b, tail_slope=0))

        assert structure.nu == (0, 1)
        assert structure.eventually_affine
        assert structure.slope_tail == 0

    def test_concave_input(self):
        """Should visit every index"""
        b = RealSeq.from_values([0, 3, 5, 6, 6])
        structure = contact_structure(b, lcm_recursive(b))

        assert structure.nu == (0, 1, 2, 3, 4)
        assert not structure.eventually_affine
        assert structure.slope_tail is None

    def test_skips_a_dip(self):
        """Should skip the index where b dips below the line"""
        values = list(range(9))
        values[3] = 0
        b = RealSeq.from_values(values)
        result = lcm_recursive(b)
        structure = contact_structure(b, result)

        assert structure.nu == (0, 1, 2, 4, 5, 6, 7, 8)
        assert result.c[3] == 3

    @pytest.mark.property
    @given(sequences)
    @hyp_settings(max_examples=80, deadline=None)
    def test_recursion_matches_contacts(self, b):
        """Should rebuild the equality contacts from the ν recursion"""
        result = lcm_recursive(b)

        assert contact_structure(b, result).nu == result.contact_indices


class TestFloatContacts:
    """Test suite for contact matching on the float path"""

    def test_small_gap_beside_large_values(self):
        """Should not match a point a millionth below the hull when the scale is 1e4"""
        exact = RealSeq.from_values([10_000, 5_000, Fraction(-1, 10**6), -5_000])
        floats = RealSeq.from_values([1e4, 5e3, -1e-6, -5e3])

        result = lcm_recursive(floats)

        assert lcm_recursive(exact).contact_indices == (0, 1, 3)
        assert result.contact_indices == (0, 1, 3)
        assert contact_structure(floats, result).nu == (0, 1, 3)
        assert lcm_hull_oracle(floats).contact_indices == (0, 1, 3)

    def test_roundoff_along_long_chords(self):
        """Should still match contacts of a float Cesàro sequence"""
        b = cesaro_numbers(0.5, 2000, exact=False).values
        result = lcm_recursive(b)

        assert result.contact_indices == tuple(range(2001))
        assert contact_structure(b, result).nu == tuple(range(2001))


class TestLimsupRatio:
    """Test suite for limsup_ratio"""

    def test_concave_positive(self):
        """Should be 1 when b is its own majorant"""
        b = cesaro_numbers(0.5, 100).values

        assert limsup_ratio(b, lcm_recursive(b).c) == pytest.approx(1.0, rel=1e-12)

    def test_zero_on_odd_indices(self):
        """Should stay near 1 for n on even indices and 0 on odd ones"""
        N = 10_000
        b = RealSeq.from_values([float(n) if n % 2 == 0 else 0.0 for n in range(N + 1)])

        assert limsup_ratio(b, lcm_recursive(b).c) >= 0.999

    def test_rejects_mismatch_and_nonpositive(self):
        """Should refuse different horizons and nonpositive majorants"""
        b = RealSeq.from_values([1, 2, 3, 4])

        with pytest.raises(MajorantError, match="horizon mismatch"):
            limsup_ratio(b, RealSeq.from_values([1, 2, 3]))
        with pytest.raises(MajorantError, match="positive"):
            limsup_ratio(b, RealSeq.from_values([1, 2, 0, 4]))

    @pytest.mark.parametrize(
        "values",
        [[3, 3, 3, 3, 3, 3], [0, 5, 2, 1, 1, 1, 1], [1.0, 4.0, 2.0, 3.0, 4.0]],
    )
    def test_rejects_sequences_that_stop_growing(self, values):
        """Should refuse b whose tail window never exceeds its first half"""
        b = RealSeq.from_values(values)

        with pytest.raises(MajorantError, match="does not grow"):
            limsup_ratio(b, lcm_recursive(b).c)


class TestChordMonotonicity:
    """Test suite for chord_monotonicity_violations"""

    @pytest.mark.property
    @given(sequences, st.one_of(st.none(), st.integers(min_value=-5, max_value=5)))
    @hyp_settings(max_examples=60, deadline=None)
    def test_no_violations(self, b, tail_slope):
        """Should find chords from n+1 no steeper than from n"""
        assert chord_monotonicity_violations(b, lcm_recursive(b, tail_slope)) == []
