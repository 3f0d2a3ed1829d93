import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import toeplitz
from tsblind.exceptions import HorizonTooSmall, NotPositiveDefinite
from tsblind.spectral_model import (
    CovarianceSequence,
    ar1_covariance,
    ma1_covariance,
    white_noise,
)
from tsblind.toeplitz_algebra import (
    IndexBlocks,
    PredictorCoefficients,
    ToeplitzMatrix,
    build_minor,
    default_horizon,
    error_operator_duality,
    levinson_durbin,
    oracle_predictor,
    past_projector_forms,
    prediction_error_operator,
    projector_infinite_past,
    schur_complement,
    schur_complement_inverse,
    spd_inverse,
    spd_solve,
    truncated_precision,
    warped_operator_norm,
)


class TestIndexBlocks:
    class TestPassingCases:
        def test_blocks(self):
            blocks = IndexBlocks(3, horizon=8)
            np.testing.assert_array_equal(blocks.missing, [-8, -7, -6, -5, -4])
            np.testing.assert_array_equal(blocks.observed, [-3, -2, -1])
            np.testing.assert_array_equal(blocks.blind, [0, 1, 2])
            np.testing.assert_array_equal(blocks.future, [3, 4, 5, 6, 7])
            assert blocks.past.size + blocks.blind.size + blocks.future.size == 16

        @pytest.mark.parametrize("window, expected", [(1, 512), (32, 512), (40, 640)])
        def test_default_horizon(self, window, expected):
            assert default_horizon(window) == expected
            assert IndexBlocks(window).horizon == expected

    class TestFailingCases:
        def test_horizon_below_window(self):
            with pytest.raises(ValueError):
                IndexBlocks(4, horizon=3)

        def test_zero_window(self):
            with pytest.raises(ValueError):
                IndexBlocks(0)


class TestBuildMinor:
    class TestPassingCases:
        def test_cross_minor(self):
            cov = ma1_covariance(0.5)
            np.testing.assert_array_equal(
                build_minor(cov, [-2, -1], [0, 1]), [[0.0, 0.0], [0.5, 0.0]]
            )

        def test_diagonal_minor_is_toeplitz(self):
            cov = ar1_covariance(0.6)
            np.testing.assert_array_equal(
                build_minor(cov, np.arange(-4, 0), np.arange(-4, 0)), cov.toeplitz(4)
            )

    class TestFailingCases:
        def test_duplicate_indices(self):
            with pytest.raises(ValueError):
                build_minor(white_noise(), [0, 0], [1])


class TestSpdSolve:
    class TestPassingCases:
        @pytest.mark.parametrize("solver", ["cholesky", "levinson"])
        def test_residual(self, solver):
            T = ToeplitzMatrix.from_covariance(ar1_covariance(0.6), 32)
            rhs = np.random.default_rng(0).standard_normal((32, 3))
            x = spd_solve(T, rhs, solver=solver)
            assert np.max(np.abs(T.dense @ x - rhs)) <= 1e-10

        def test_dense_matrix(self):
            x = spd_solve(np.array([[2.0, 1.0], [1.0, 2.0]]), [3.0, 3.0])
            np.testing.assert_allclose(x, [1.0, 1.0])

        def test_inverse_is_symmetric(self):
            inverse = spd_inverse(np.array([[2.0, 1.0], [1.0, 2.0]]))
            np.testing.assert_allclose(inverse, np.array([[2.0, -1.0], [-1.0, 2.0]]) / 3.0)
            np.testing.assert_array_equal(inverse, inverse.T)

    class TestFailingCases:
        @pytest.mark.parametrize("solver", ["cholesky", "levinson"])
        def test_indefinite(self, solver):
            with pytest.raises(NotPositiveDefinite):
                spd_solve(ToeplitzMatrix([1.0, 2.0]), [1.0, 1.0], solver=solver)

        def test_levinson_needs_toeplitz(self):
            with pytest.raises(TypeError):
                spd_solve(np.eye(2), [1.0, 1.0], solver="levinson")

        def test_unknown_solver(self):
            with pytest.raises(ValueError):
                spd_solve(np.eye(2), [1.0, 1.0], solver="qr")


class TestLevinsonDurbin:
    class TestPassingCases:
        def test_ar1_reflection_coefficients(self):
            reflection, errors = levinson_durbin(ar1_covariance(0.6).first_row(6))
            np.testing.assert_allclose(reflection, [0.6, 0, 0, 0, 0], atol=1e-14)
            np.testing.assert_allclose(errors, [1 / 0.64, 1, 1, 1, 1, 1], rtol=1e-13)

        def test_single_lag(self):
            reflection, errors = levinson_durbin([2.0])
            assert reflection.size == 0
            np.testing.assert_array_equal(errors, [2.0])

        def test_matches_cholesky_pivots(self):
            first_row = ma1_covariance(0.5).first_row(8)
            _, errors = levinson_durbin(first_row)
            # Cholesky pivots of a Toeplitz matrix are the prediction error variances.
            factor = np.linalg.cholesky(toeplitz(first_row))
            np.testing.assert_allclose(errors, np.diag(factor) ** 2, rtol=1e-12)

        def test_indefinite_has_negative_error(self):
            _, errors = levinson_durbin([1.0, 2.0, 0.0])
            assert errors.min() <= 0

        def test_non_positive_variance(self):
            _, errors = levinson_durbin([0.0, 1.0, 0.5])
            assert np.all(errors <= 0)


class TestSchurComplement:
    class TestPassingCases:
        def test_two_by_two(self):
            matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
            assert schur_complement(matrix, [0])[0, 0] == pytest.approx(1.5)
            # Schur complement of the inverse recovers 1 / Gamma_00
            assert schur_complement(spd_inverse(matrix), [0])[0, 0] == pytest.approx(0.5)

        def test_keep_everything(self):
            matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
            np.testing.assert_array_equal(schur_complement(matrix, [0, 1]), matrix)

        @settings(deadline=None, max_examples=20)
        @given(st.integers(min_value=0, max_value=2**32 - 1))
        def test_inverse_identity(self, seed):
            rng = np.random.default_rng(seed)
            a = rng.standard_normal((6, 6))
            gamma = a @ a.T + 6.0 * np.eye(6)
            keep = [1, 4]
            S = schur_complement(spd_inverse(gamma), keep)
            expected = np.linalg.inv(gamma[np.ix_(keep, keep)])
            np.testing.assert_allclose(S, expected, atol=1e-10)

    class TestFailingCases:
        def test_out_of_range(self):
            with pytest.raises(ValueError):
                schur_complement(np.eye(2), [2])


class TestSchurComplementInverse:
    class TestPassingCases:
        def test_finite_precision_is_exact(self):
            cov = ar1_covariance(0.6)
            A = [-2, -1, 0, 1]
            S = schur_complement_inverse(cov, A, horizon=32)
            expected = np.linalg.inv(build_minor(cov, A, A))
            np.testing.assert_allclose(S, expected, atol=1e-9)

        def test_symbol_precision_converges(self):
            cov = ma1_covariance(0.5)
            A = [-1, 0, 1]
            S = schur_complement_inverse(cov, A, horizon=64, precision="symbol", tol=1e-10)
            expected = np.linalg.inv(build_minor(cov, A, A))
            np.testing.assert_allclose(S, expected, atol=1e-8)

        def test_symbol_precision_of_strongly_correlated_ma1(self):
            Lambda = truncated_precision(ma1_covariance(0.99), 8, precision="symbol")
            p = (-0.99) ** np.arange(16) / (1.0 - 0.99**2)
            np.testing.assert_allclose(Lambda, toeplitz(p), rtol=1e-8, atol=1e-8)

    class TestFailingCases:
        def test_index_outside_horizon(self):
            with pytest.raises(HorizonTooSmall):
                schur_complement_inverse(white_noise(), [-5, 4], horizon=4)

        def test_tail_above_tolerance(self):
            with pytest.raises(HorizonTooSmall):
                schur_complement_inverse(
                    ma1_covariance(0.9), [0], horizon=4, precision="symbol", tol=1e-6
                )

        def test_tail_of_strongly_correlated_ma1(self):
            with pytest.raises(HorizonTooSmall):
                schur_complement_inverse(
                    ma1_covariance(0.99), [0], horizon=4, precision="symbol", tol=1e-6
                )


class TestOraclePredictor:
    class TestPassingCases:
        def test_ar1_uses_last_value_only(self):
            coeffs = oracle_predictor(ar1_covariance(0.6), 5)
            np.testing.assert_allclose(coeffs.column(0), [0, 0, 0, 0, 0.6], atol=1e-12)
            np.testing.assert_allclose(coeffs.column(2), [0, 0, 0, 0, 0.216], atol=1e-12)

        @pytest.mark.parametrize("solver", ["cholesky", "levinson"])
        def test_ma1_window_two(self, solver):
            coeffs = oracle_predictor(ma1_covariance(0.5), 2, solver=solver)
            np.testing.assert_allclose(coeffs.column(0), [-4 / 21, 10 / 21], atol=1e-14)

        def test_ar1_one_step_error(self):
            Q = prediction_error_operator(ar1_covariance(0.6), np.arange(-5, 0), [0])
            assert Q[0, 0] == pytest.approx(1.0, abs=1e-12)

        def test_white_noise_predicts_zero(self):
            coeffs = oracle_predictor(white_noise(), 3)
            np.testing.assert_array_equal(coeffs.matrix, np.zeros((3, 3)))

    class TestFailingCases:
        def test_overlapping_sets(self):
            with pytest.raises(ValueError):
                prediction_error_operator(white_noise(), [0, 1], [1, 2])


class TestPredictorCoefficients:
    class TestPassingCases:
        def test_apply(self):
            coeffs = PredictorCoefficients([[1.0, 0.0], [0.5, 2.0]])
            np.testing.assert_allclose(coeffs.apply([2.0, 1.0]), [2.5, 2.0])
            np.testing.assert_allclose(
                coeffs.apply([[2.0, 1.0], [0.0, 1.0]]), [[2.5, 2.0], [0.5, 2.0]]
            )

    class TestFailingCases:
        def test_not_square(self):
            with pytest.raises(ValueError):
                PredictorCoefficients(np.zeros((2, 3)))

        def test_wrong_window(self):
            with pytest.raises(ValueError):
                PredictorCoefficients(np.eye(2)).apply([1.0, 2.0, 3.0])


class TestProjectors:
    class TestPassingCases:
        def test_ar1_infinite_past(self):
            P = projector_infinite_past(ar1_covariance(0.6), [0, 1], horizon=64)
            expected = np.zeros((64, 2))
            expected[-1] = [0.6, 0.36]
            np.testing.assert_allclose(P, expected, atol=1e-12)

        def test_forms_agree(self):
            forms = past_projector_forms(ma1_covariance(0.5), [0, 2], horizon=32)
            assert forms.discrepancy <= 1e-8
            P = projector_infinite_past(ma1_covariance(0.5), [0, 2], horizon=32, tol=1e-8)
            np.testing.assert_array_equal(P, forms.direct)

    class TestFailingCases:
        def test_target_beyond_horizon(self):
            with pytest.raises(HorizonTooSmall):
                projector_infinite_past(white_noise(), [8], horizon=8)


class TestDuality:
    class TestPassingCases:
        @pytest.mark.parametrize(
            "cov",
            [ar1_covariance(0.6), ma1_covariance(0.5), CovarianceSequence(values=(2.0, 0.5, -0.25))],
        )
        def test_error_operator_equals_inverse_precision_block(self, cov):
            check = error_operator_duality(cov, [-3, -2, -1], [0, 1])
            assert check.max_error <= 1e-10


class TestWarpedOperatorNorm:
    class TestPassingCases:
        def test_identity_covariance_gives_spectral_norm(self):
            D = np.random.default_rng(3).standard_normal((4, 3))
            assert warped_operator_norm(D, white_noise()) == pytest.approx(
                np.linalg.norm(D, 2), rel=1e-10
            )

        def test_zero(self):
            assert warped_operator_norm(np.zeros((2, 2)), ma1_covariance(0.5)) == 0.0

        def test_scale_invariance(self):
            D = np.array([[1.0, 0.5], [-0.25, 2.0]])
            base = warped_operator_norm(D, ma1_covariance(0.5))
            scaled = warped_operator_norm(D, ma1_covariance(0.5, sigma2=4.0))
            assert scaled == pytest.approx(base, rel=1e-12)

    class TestFailingCases:
        def test_vector(self):
            with pytest.raises(ValueError):
                warped_operator_norm(np.zeros(3), white_noise())
