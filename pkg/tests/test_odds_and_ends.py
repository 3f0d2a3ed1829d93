import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from tsblind.utils.odds_and_ends import (
    check_generator,
    replication_rng,
)


class TestReplicationRng:
    class TestPassingCases:
        @given(
            st.integers(min_value=0, max_value=2**64 - 1),
            st.integers(min_value=0, max_value=10**6),
            st.integers(min_value=0, max_value=10**4),
        )
        def test_same_key_same_stream(self, seed, n, i):
            a = replication_rng(seed, n, i).standard_normal(4)
            b = replication_rng(seed, n, i).standard_normal(4)
            np.testing.assert_array_equal(a, b)

        def test_documented_mapping(self):
            expected = np.random.default_rng(
                np.random.SeedSequence(7, spawn_key=(1024, 3))
            ).standard_normal(5)
            np.testing.assert_array_equal(
                replication_rng(7, 1024, 3).standard_normal(5), expected
            )

        def test_distinct_replications_differ(self):
            a = replication_rng(0, 100, 0).standard_normal(8)
            b = replication_rng(0, 100, 1).standard_normal(8)
            assert not np.array_equal(a, b)

        def test_distinct_grid_points_differ(self):
            a = replication_rng(0, 100, 0).standard_normal(8)
            b = replication_rng(0, 200, 0).standard_normal(8)
            assert not np.array_equal(a, b)

    class TestFailingCases:
        def test_negative_seed(self):
            with pytest.raises(ValueError):
                replication_rng(-1, 0, 0)

        def test_negative_key(self):
            with pytest.raises(ValueError):
                replication_rng(0, -1)


class TestCheckGenerator:
    class TestPassingCases:
        def test_seed_is_reproducible(self):
            a = check_generator(123).random(3)
            b = check_generator(123).random(3)
            np.testing.assert_array_equal(a, b)

        def test_largest_seed(self):
            check_generator(2**64 - 1)

    class TestFailingCases:
        def test_seed_not_allowed(self):
            with pytest.raises(ValueError):
                check_generator(1, seed_allowed=False)

        def test_string(self):
            with pytest.raises(ValueError):
                check_generator("seed")
