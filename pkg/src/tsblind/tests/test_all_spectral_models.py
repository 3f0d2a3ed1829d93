"""Interface tests for every object with object_type "spectral_model"."""

import numpy as np
from skbase.testing import QuickTester

from tsblind.spectral_model import (
    CovarianceSequence,
    SpectralDensity,
    TrigonometricPolynomial,
    covariance_to_spectrum,
    spectrum_to_covariance,
)
from tsblind.tests.test_all_estimators import (
    BaseFixtureGenerator,
    PackageConfig,
)


def _as_polynomial(obj):
    if isinstance(obj, CovarianceSequence):
        return covariance_to_spectrum(obj)
    return obj


class TestAllSpectralModels(PackageConfig, BaseFixtureGenerator, QuickTester):
    """Generic tests for spectral densities, polynomials and covariance sequences."""

    object_type_filter = "spectral_model"

    def test_grid_bounds(self, object_instance):
        """Refined extrema bracket the grid values."""
        f = _as_polynomial(object_instance)
        values = f.grid_values()
        assert f.minimum <= values.min() + 1e-12
        assert f.maximum >= values.max() - 1e-12
        if isinstance(f, SpectralDensity):
            assert 0 < f.lower_bound < f.minimum
            assert f.maximum < f.upper_bound

    def test_covariance_spectrum_round_trip(self, object_instance):
        """Covariances and Fourier coefficients agree lag by lag."""
        f = _as_polynomial(object_instance)
        cov = spectrum_to_covariance(f, f.degree)
        np.testing.assert_allclose(cov.r, f.a, rtol=0, atol=0)
        assert cov.tail_bound == 0.0

    def test_covariances_positive_semidefinite(self, object_instance):
        """Positive symbols give positive semidefinite Toeplitz matrices."""
        if isinstance(object_instance, CovarianceSequence):
            cov = object_instance
        elif isinstance(object_instance, SpectralDensity):
            cov = spectrum_to_covariance(object_instance, object_instance.degree)
        else:
            return
        assert cov.is_positive_semidefinite(cov.max_lag + 1)

    def test_evaluate_matches_grid(self, object_instance):
        """Direct evaluation agrees with the FFT grid."""
        f = _as_polynomial(object_instance)
        assert isinstance(f, TrigonometricPolynomial)
        np.testing.assert_allclose(
            f.evaluate(f.grid()), f.grid_values(), rtol=1e-10, atol=1e-12
        )
