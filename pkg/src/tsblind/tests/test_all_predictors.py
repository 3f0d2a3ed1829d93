"""Interface tests for every object with object_type "predictor"."""

import warnings

import numpy as np
from skbase.testing import QuickTester

from tsblind.gaussian_simulator import SimulationSpec
from tsblind.spectral_model import ma1_covariance
from tsblind.tests.test_all_estimators import (
    BaseFixtureGenerator,
    PackageConfig,
)


def _path(n_samples=400, seed=0):
    return SimulationSpec(ma1_covariance(0.5), n_samples=n_samples, seed=seed).simulate()


class TestAllPredictors(PackageConfig, BaseFixtureGenerator, QuickTester):
    """Generic tests for blind predictors."""

    object_type_filter = "predictor"

    def test_fit_predict_contract(self, object_instance):
        """fit returns self, predict returns one value per blind index."""
        path = _path()
        params = object_instance.get_params()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fitted = object_instance.fit(path)
        assert fitted is object_instance
        assert object_instance.get_params() == params

        K = params["window"]
        assert object_instance.coefficients_.matrix.shape == (K, K)
        prediction = object_instance.predict(path)
        assert prediction.shape == (K,)
        assert np.all(np.isfinite(prediction))

    def test_regularized_eigenvalue_floor(self, object_instance):
        """The shifted covariance matrix has eigenvalues >= m / 4."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            object_instance.fit(_path(seed=1))
        gamma = object_instance.regularized_.toeplitz().dense
        floor = object_instance.lower_bound_ / 4.0
        assert np.linalg.eigvalsh(gamma).min() >= floor - 1e-9
        assert object_instance.alpha_hat_ >= 0.0
