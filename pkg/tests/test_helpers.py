"""
Tests for utils.helpers
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpspec.errors import ResolutionError
from utils.helpers import SplitMix64, format_float, parse_grid, refine_on


class TestSplitMix64:
    def test_first_output_seed_zero(self):
        assert SplitMix64(0).next_u64() == 0xE220A8397B1DCDAF

    @given(st.integers(min_value=0, max_value=(1 << 64) - 1))
    def test_same_seed_same_stream(self, seed):
        a, b = SplitMix64(seed), SplitMix64(seed)
        assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]

    @given(st.integers(min_value=0, max_value=(1 << 64) - 1))
    def test_uniform_in_range(self, seed):
        rng = SplitMix64(seed)
        for _ in range(10):
            u = rng.uniform(-2.0, 3.0)
            assert -2.0 <= u < 3.0

    def test_integer_inclusive(self):
        rng = SplitMix64(11)
        seen = {rng.integer(1, 3) for _ in range(200)}
        assert seen == {1, 2, 3}


class TestParseGrid:
    def test_plain_list(self):
        assert parse_grid("1,1.5,2") == [1.0, 1.5, 2.0]

    def test_geometric_expansion(self):
        assert parse_grid("8,16,...,512", int) == [8, 16, 32, 64, 128, 256, 512]

    def test_arithmetic_expansion(self):
        assert parse_grid("1,1.5,...,3") == [1.0, 1.5, 2.0, 2.5, 3.0]

    def test_integer_step_arithmetic(self):
        # 3/1 is an integer ratio but 10 is not a power of 3
        assert parse_grid("1,3,...,9", int) == [1, 3, 9]
        assert parse_grid("1,4,...,10", int) == [1, 4, 7, 10]

    def test_ellipsis_must_be_second_to_last(self):
        with pytest.raises(ValueError):
            parse_grid("1,...,4")
        with pytest.raises(ValueError):
            parse_grid("1,2,...,5,6")

    def test_decreasing_rejected(self):
        with pytest.raises(ValueError):
            parse_grid("4,2,...,1")


class TestFormatFloat:
    def test_seventeen_digits(self):
        assert format_float(0.1) == "0.10000000000000001"

    def test_non_floats(self):
        assert format_float(None) == ""
        assert format_float(True) == "true"
        assert format_float(False) == "false"
        assert format_float(42) == "42"
        assert format_float("x") == "x"

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_round_trips(self, x):
        assert float(format_float(x)) == x


class TestRefineOn:
    def test_retries_with_larger_parameter(self):
        calls = []

        @refine_on(ResolutionError, "N", factor=4, max_attempts=3)
        def solve(N=None):
            calls.append(N)
            if N < 64:
                raise ResolutionError("too coarse", suggested_n=4 * N)
            return N

        assert solve(N=4) == 64
        assert calls == [4, 16, 64]

    def test_gives_up_after_max_attempts(self):
        @refine_on(ResolutionError, "N", factor=2, max_attempts=2)
        def solve(N=None):
            raise ResolutionError("never enough")

        with pytest.raises(ResolutionError):
            solve(N=8)

    def test_no_retry_without_parameter(self):
        calls = []

        @refine_on(ResolutionError, "N")
        def solve(N=None):
            calls.append(N)
            raise ResolutionError("no N given")

        with pytest.raises(ResolutionError):
            solve()
        assert calls == [None]

    def test_default_parameter_refines(self):
        calls = []

        @refine_on(ResolutionError, "N", factor=2, max_attempts=4)
        def solve(scale, N=8):
            calls.append(N)
            if N < 32:
                raise ResolutionError("too coarse")
            return scale * N

        assert solve(2) == 64
        assert calls == [8, 16, 32]

    def test_suggested_n_beats_factor(self):
        calls = []

        @refine_on(ResolutionError, "N", factor=2, max_attempts=3)
        def solve(N):
            calls.append(N)
            if N < 100:
                raise ResolutionError("far too coarse", suggested_n=100)
            return N

        assert solve(10) == 100
        assert calls == [10, 100]
