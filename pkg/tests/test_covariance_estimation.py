import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from tsblind.covariance_estimation import (
    EmpiricalCovariance,
    ObservedPath,
    concentration_bound,
    empirical_autocovariance,
    empirical_autocovariances,
    empirical_spectral_density,
    estimate_covariance,
    regularization_shift,
    regularize,
    regularized_covariance_matrix,
    spectral_error_bound,
    spectral_sup_error,
    sup_deviation,
)
from tsblind.exceptions import LagOutOfRange, LagTooLarge, WindowTooLarge
from tsblind.spectral_model import CovarianceSequence, ar1_covariance


class TestObservedPath:
    class TestPassingCases:
        def test_single_column_input(self):
            path = ObservedPath(np.arange(5.0).reshape(-1, 1))
            assert path.n_samples == 5
            np.testing.assert_array_equal(path.last(2), [3.0, 4.0])

        def test_samples_are_read_only(self):
            path = ObservedPath([1.0, 2.0])
            with pytest.raises(ValueError):
                path.samples[0] = 3.0

    class TestFailingCases:
        def test_single_sample(self):
            with pytest.raises(ValueError):
                ObservedPath([1.0])

        def test_non_finite(self):
            with pytest.raises(ValueError):
                ObservedPath([1.0, np.inf])

        def test_two_columns(self):
            with pytest.raises(ValueError):
                ObservedPath(np.zeros((4, 2)))


class TestEmpiricalAutocovariance:
    class TestPassingCases:
        def test_constant_path(self):
            np.testing.assert_array_equal(empirical_autocovariances(np.ones(10), 4), np.ones(5))

        def test_alternating_path(self):
            x = np.tile([1.0, -1.0], 8)
            np.testing.assert_array_equal(
                empirical_autocovariances(x, 4), [1.0, -1.0, 1.0, -1.0, 1.0]
            )

        def test_unbiased_normalisation(self):
            assert empirical_autocovariance([1.0, 2.0, 3.0], 1) == pytest.approx(4.0)
            assert empirical_autocovariance([1.0, 2.0, 3.0], 2) == pytest.approx(3.0)

        def test_single_and_vector_agree(self):
            x = np.random.default_rng(1).standard_normal(50)
            r = empirical_autocovariances(x, 6)
            assert r[4] == empirical_autocovariance(x, 4)

    class TestFailingCases:
        def test_lag_at_path_length(self):
            with pytest.raises(LagTooLarge):
                empirical_autocovariance([1.0, 2.0, 3.0], 3)

        def test_window_too_large(self):
            with pytest.raises(WindowTooLarge):
                estimate_covariance(np.ones(10), 5)


class TestEmpiricalCovariance:
    class TestPassingCases:
        def test_estimate_covers_two_windows(self):
            est = estimate_covariance(np.ones(11), 5)
            assert est.r_hat.size == 11
            assert empirical_spectral_density(est).degree == 5

        def test_sup_deviation(self):
            est = EmpiricalCovariance([1.1, 0.4, 0.0], window=1, n_samples=10)
            truth = CovarianceSequence(values=(1.0, 0.5))
            assert sup_deviation(est, truth) == pytest.approx(0.1)
            assert sup_deviation(est, [1.0, 0.5, 0.0]) == pytest.approx(0.1)

        def test_spectral_error_within_bound(self):
            est = EmpiricalCovariance([1.1, 0.4, 0.0], window=1, n_samples=10)
            truth = CovarianceSequence(values=(1.0, 0.5))
            assert spectral_sup_error(est, truth) == pytest.approx(0.3, abs=1e-10)
            assert spectral_error_bound(est, truth) == pytest.approx(0.3)

    class TestFailingCases:
        def test_lag_beyond_two_windows(self):
            est = EmpiricalCovariance([1.0, 0.0, 0.0], window=1, n_samples=10)
            with pytest.raises(LagTooLarge):
                est.lags(3)

        def test_wrong_number_of_lags(self):
            with pytest.raises(ValueError):
                EmpiricalCovariance([1.0, 0.0], window=1, n_samples=10)

        def test_truth_too_short(self):
            est = EmpiricalCovariance([1.0, 0.0, 0.0, 0.0, 0.0], window=2, n_samples=10)
            with pytest.raises(LagOutOfRange):
                sup_deviation(est, ar1_covariance(0.5, max_lag=2))


class TestRegularization:
    class TestPassingCases:
        @pytest.mark.parametrize(
            "fhat_min, expected",
            [(1.0, 0.0), (0.3, 0.0), (0.25, 0.25), (0.2, 0.25), (0.0, 0.25), (-0.5, 0.75)],
        )
        def test_shift(self, fhat_min, expected):
            assert regularization_shift(fhat_min, 1.0) == pytest.approx(expected)

        def test_zero_path(self):
            est = estimate_covariance(np.zeros(20), 2)
            reg = regularize(est, 1.0)
            assert reg.alpha_hat == pytest.approx(0.25)
            np.testing.assert_allclose(
                regularized_covariance_matrix(reg).dense, 0.25 * np.eye(2)
            )

        def test_estimated_bound_warns(self):
            est = estimate_covariance(np.tile([1.0, -1.0], 10), 2)
            with pytest.warns(UserWarning, match="data-driven"):
                reg = regularize(est, "estimate")
            assert reg.lower_bound_estimated
            assert reg.lower_bound == pytest.approx(1e-3)

        def test_supplied_bound_does_not_warn(self):
            est = estimate_covariance(np.arange(20.0), 2)
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                reg = regularize(est, 0.5)
            assert not reg.lower_bound_estimated

        @settings(deadline=None, max_examples=30)
        @given(
            st.integers(min_value=0, max_value=2**32 - 1),
            st.integers(min_value=1, max_value=6),
            st.floats(min_value=0.01, max_value=4.0),
        )
        def test_eigenvalue_floor(self, seed, window, m):
            x = np.random.default_rng(seed).standard_normal(4 * window + 3)
            reg = regularize(estimate_covariance(x, window), m)
            eigenvalues = regularized_covariance_matrix(reg).eigenvalues()
            assert eigenvalues.min() >= m / 4.0 - 1e-9

    class TestFailingCases:
        def test_non_positive_bound(self):
            est = estimate_covariance(np.ones(10), 2)
            with pytest.raises(ValueError):
                regularize(est, 0.0)

        def test_unknown_string(self):
            est = estimate_covariance(np.ones(10), 2)
            with pytest.raises(TypeError):
                regularize(est, "guess")


class TestConcentrationBound:
    class TestPassingCases:
        def test_value(self):
            x = np.log(2.0)
            expected = 4.0 * 2.0 * (np.sqrt((np.log(3) + x) / 100) + x / 100)
            assert concentration_bound(100, 3, 2.0) == pytest.approx(expected)

        def test_decreases_with_length(self):
            assert concentration_bound(400, 2, 1.0) < concentration_bound(100, 2, 1.0)

    class TestFailingCases:
        def test_non_positive_level(self):
            with pytest.raises(ValueError):
                concentration_bound(100, 2, 1.0, x=0.0)
