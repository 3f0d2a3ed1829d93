"""Exact sampling of zero-mean stationary Gaussian paths."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from numbers import Integral
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from numpy.random import Generator
from scipy.fft import fft
from scipy.linalg import cholesky
from scipy.stats import skew
from skbase.base import BaseObject

from tsblind.covariance_estimation import ObservedPath
from tsblind.exceptions import NotPositiveDefinite
from tsblind.spectral_model import CovarianceSequence, white_noise
from tsblind.toeplitz_algebra import ToeplitzMatrix
from tsblind.utils.odds_and_ends import replication_rng
from tsblind.utils.types import SimulationMethods
from tsblind.utils.validate import (
    validate_literal_type,
    validate_rng,
    validate_seed,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

# Relative size of negative circulant eigenvalues treated as rounding.
CLIP_TOLERANCE = 1e-10
MIN_GAUSSIANITY_REPLICATIONS = 100


def embedding_size(n_samples: Integral, max_lag: Integral) -> int:
    """Smallest power of two >= 2 (N + P)."""
    target = 2 * (int(n_samples) + int(max_lag))
    return 1 << max(int(np.ceil(np.log2(target))), 1)


def circulant_eigenvalues(cov: CovarianceSequence, n_samples: Integral) -> np.ndarray:
    """
    Eigenvalues of the circulant embedding of the covariance.

    The first column is r_0, ..., r_{M/2}, r_{M/2-1}, ..., r_1 with zeros
    beyond the stored lags.
    """
    M = embedding_size(n_samples, cov.max_lag)
    half = M // 2
    c = np.zeros(M)
    kept = min(cov.max_lag, half)
    c[: kept + 1] = cov.r[: kept + 1]
    c[M - half + 1 :] = c[1:half][::-1]
    return fft(c).real


class _CirculantSampler:
    def __init__(self, sqrt_eigenvalues: np.ndarray, n_samples: int) -> None:
        self.sqrt_eigenvalues = sqrt_eigenvalues
        self.n_samples = n_samples

    def draw(self, rng: Generator) -> np.ndarray:
        M = self.sqrt_eigenvalues.size
        xi = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        return fft(self.sqrt_eigenvalues * xi).real[: self.n_samples]


class _CholeskySampler:
    def __init__(self, factor: np.ndarray) -> None:
        self.factor = factor

    def draw(self, rng: Generator) -> np.ndarray:
        return self.factor @ rng.standard_normal(self.factor.shape[0])


def _cholesky_sampler(cov: CovarianceSequence, n_samples: int) -> _CholeskySampler:
    # LagOutOfRange when a truncated sequence lacks lags below N
    matrix = ToeplitzMatrix(cov.first_row(n_samples)).dense
    try:
        factor = cholesky(matrix, lower=True)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefinite(
            f"Covariance matrix of {n_samples} samples is not positive definite: {err}"
        ) from err
    return _CholeskySampler(factor)


def make_sampler(
    cov: CovarianceSequence, n_samples: Integral, method: SimulationMethods = "auto"
):
    """
    Prepare the sampling step for paths of length N.

    Circulant embedding is used when every embedded eigenvalue is at least
    -1e-10 times the largest (smaller negatives are clipped to 0); otherwise
    ``"auto"`` falls back to a dense Cholesky factor.
    """
    validate_single_integer(n_samples, min_value=1)
    validate_literal_type(method, SimulationMethods)
    n_samples = int(n_samples)
    if method == "dense-cholesky":
        return _cholesky_sampler(cov, n_samples)

    eigenvalues = circulant_eigenvalues(cov, n_samples)
    M = eigenvalues.size
    lowest = eigenvalues.min()
    if lowest < -CLIP_TOLERANCE * eigenvalues.max():
        if method == "circulant-embedding":
            raise NotPositiveDefinite(
                f"Circulant embedding of size {M} has eigenvalue {lowest:.3g}."
            )
        logger.warning(
            f"circulant embedding of size {M} is not nonnegative "
            f"(min eigenvalue {lowest:.3g}); using dense Cholesky"
        )
        return _cholesky_sampler(cov, n_samples)
    if lowest < 0:
        logger.warning(
            f"clipping circulant eigenvalues down to {lowest:.3g} to zero"
        )
        eigenvalues = np.clip(eigenvalues, 0.0, None)
    logger.debug(f"circulant embedding of size {M} for N = {n_samples}")
    return _CirculantSampler(np.sqrt(eigenvalues / M), n_samples)


class SimulationSpec(BaseObject):
    """
    Specification of a zero-mean stationary Gaussian path.

    Parameters
    ----------
    covariance : CovarianceSequence, optional
        Autocovariances of the process. Defaults to unit white noise.
    n_samples : int, default=1
        Path length N.
    seed : int, optional
        64-bit seed; the same seed gives the same path. None draws fresh
        entropy.
    method : {"auto", "circulant-embedding", "dense-cholesky"}, default="auto"
        Sampling method.
    """

    _tags = {"object_type": "simulator"}

    def __init__(
        self,
        covariance: Optional[CovarianceSequence] = None,
        n_samples: Integral = 1,
        seed: Optional[Integral] = None,
        method: SimulationMethods = "auto",
    ) -> None:
        self.covariance = covariance
        self.n_samples = n_samples
        self.seed = seed
        self.method = method

        super().__init__()

        if covariance is not None and not isinstance(covariance, CovarianceSequence):
            raise TypeError("covariance must be a CovarianceSequence.")
        validate_single_integer(n_samples, min_value=1)
        if seed is not None:
            validate_seed(seed)
        validate_literal_type(method, SimulationMethods)

    @property
    def covariance_sequence(self) -> CovarianceSequence:
        return white_noise() if self.covariance is None else self.covariance

    def sampler(self):
        return make_sampler(self.covariance_sequence, self.n_samples, self.method)

    def simulate(self, rng=None) -> ObservedPath:
        """
        Draw one path.

        Parameters
        ----------
        rng : Generator, optional
            Overrides `seed`.

        Returns
        -------
        ObservedPath
            N samples with law N(0, Gamma_N); needs N >= 2, use `draw`
            for single samples.
        """
        return ObservedPath(self.draw(rng))

    def draw(self, rng=None) -> np.ndarray:
        """Draw one path as an array of length N."""
        rng = validate_rng(self.seed if rng is None else rng)
        return self.sampler().draw(rng)

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"n_samples": 16, "seed": 0},
            {
                "covariance": CovarianceSequence(values=(1.25, 0.5)),
                "n_samples": 32,
                "seed": 7,
                "method": "dense-cholesky",
            },
        ]


def simulate_path(spec: SimulationSpec) -> ObservedPath:
    """
    Draw the path described by `spec`, deterministic given its seed.

    Returns
    -------
    ObservedPath
        Samples oldest first.
    """
    return spec.simulate()


def simulate_replications(
    cov: CovarianceSequence,
    n_samples: Integral,
    n_replications: Integral,
    seed: Integral,
    method: SimulationMethods = "auto",
    n_jobs: Optional[int] = 1,
    stream: Integral = 0,
) -> np.ndarray:
    """
    Independent replications drawn from per-replication streams.

    Replication i uses ``replication_rng(seed, stream, i)``, so the ensemble
    does not depend on `n_jobs`.

    Returns
    -------
    np.ndarray of shape (n_replications, n_samples)
    """
    validate_single_integer(n_replications, min_value=1)
    validate_seed(seed)
    sampler = make_sampler(cov, n_samples, method)
    rows = Parallel(n_jobs=n_jobs)(
        delayed(sampler.draw)(replication_rng(seed, stream, i))
        for i in range(int(n_replications))
    )
    return np.vstack(rows)


@dataclass(frozen=True)
class GaussianityReport:
    """Moment diagnostics of X_0 across replications."""

    n_replications: int
    fourth_moment: float
    expected_fourth_moment: float
    skewness: float
    fourth_moment_ok: bool
    skewness_ok: bool

    @property
    def passed(self) -> bool:
        return self.fourth_moment_ok and self.skewness_ok


def gaussianity_check(
    paths, cov: Optional[CovarianceSequence] = None, rel_tol: float = 0.1, skew_tol: float = 0.1
) -> GaussianityReport:
    """
    Check the fourth moment and skewness of the first sample across replications.

    Parameters
    ----------
    paths : array-like of shape (R, N) or sequence of ObservedPath
        At least 100 replications.
    cov : CovarianceSequence, optional
        True covariance; the expected fourth moment is 3 r_0^2. Without it the
        sample variance stands in for r_0.
    rel_tol : float, default=0.1
        Relative tolerance on the fourth moment.
    skew_tol : float, default=0.1
        Absolute tolerance on the skewness.

    Returns
    -------
    GaussianityReport
    """
    if not isinstance(paths, np.ndarray):
        paths = [p.samples if isinstance(p, ObservedPath) else p for p in paths]
    x0 = np.atleast_2d(np.asarray(paths, dtype=np.float64))[:, 0]
    if x0.size < MIN_GAUSSIANITY_REPLICATIONS:
        raise ValueError(
            f"gaussianity_check needs at least {MIN_GAUSSIANITY_REPLICATIONS} "
            f"replications. Got {x0.size}."
        )
    r0 = cov.variance if cov is not None else float(np.mean(x0**2))
    fourth = float(np.mean(x0**4))
    expected = 3.0 * r0**2
    skewness = float(skew(x0))
    return GaussianityReport(
        n_replications=int(x0.size),
        fourth_moment=fourth,
        expected_fourth_moment=expected,
        skewness=skewness,
        fourth_moment_ok=bool(abs(fourth - expected) <= rel_tol * expected),
        skewness_ok=bool(abs(skewness) <= skew_tol),
    )
