"""Plug-in blind linear predictor and its window rule."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from numbers import Integral, Real
from pathlib import Path
from typing import Optional, Union

import numpy as np
from skbase.base import BaseObject
from sklearn.utils.validation import check_is_fitted

from tsblind.covariance_estimation import (
    ObservedPath,
    estimate_covariance,
    regularize,
    regularized_covariance_matrix,
)
from tsblind.exceptions import DomainError, WindowTooLarge
from tsblind.spectral_model import (
    CovarianceSequence,
    covariance_to_spectrum,
    inverse_spectrum,
)
from tsblind.toeplitz_algebra import (
    IndexBlocks,
    PredictorCoefficients,
    spd_solve,
)
from tsblind.utils.serialization import write_matrix_csv
from tsblind.utils.types import LowerBoundTypes, SolverTypes
from tsblind.utils.validate import (
    validate_literal_type,
    validate_positive_float,
    validate_real,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

# Number of inverse-symbol coefficients used for the bias constants.
_INVERSE_SYMBOL_COEFFS = 256


class BlindPredictor(BaseObject):
    """
    Blind linear predictor of the next K values from the last K observations.

    The covariance is estimated from the same path that is then predicted.
    `fit` computes

        p_hat = (Gamma_tilde_{O_K})^{-1} Gamma_hat_{O_K B_K},

    where Gamma_hat holds the unbiased empirical autocovariances and
    Gamma_tilde = Gamma_hat_{O_K} + alpha_hat I is shifted so that its
    smallest eigenvalue is at least m / 4.

    Parameters
    ----------
    window : int, default=2
        Window size K; fitting requires 2K < N.
    lower_bound : float, "estimate" or None, default=None
        Lower spectral bound m of the process. None and "estimate" fall back
        to the data-driven value max(min f_hat, 1e-3) with a warning.
    solver : {"cholesky", "levinson"}, default="cholesky"
        Solver for the K x K system.

    Attributes
    ----------
    coefficients_ : PredictorCoefficients
        Fitted K x K matrix; rows (X_{-K}, ..., X_{-1}), columns X_0..X_{K-1}.
    alpha_hat_ : float
        Diagonal shift used.
    covariance_ : EmpiricalCovariance
        Empirical autocovariances at lags 0..2K.
    regularized_ : RegularizedCovariance
    lower_bound_ : float
        The m used.
    lower_bound_estimated_ : bool
    n_samples_ : int
        Path length N.

    Examples
    --------
    >>> from tsblind import BlindPredictor, ar1_covariance, SimulationSpec
    >>> path = SimulationSpec(ar1_covariance(0.6), n_samples=10_000, seed=0).simulate()
    >>> predictor = BlindPredictor(window=3, lower_bound=0.25).fit(path)
    >>> predictor.predict(path).shape
    (3,)
    """

    _tags = {"object_type": "predictor"}

    def __init__(
        self,
        window: Integral = 2,
        lower_bound: LowerBoundTypes = None,
        solver: SolverTypes = "cholesky",
    ) -> None:
        self.window = window
        self.lower_bound = lower_bound
        self.solver = solver

        super().__init__()

        validate_single_integer(window, min_value=1)
        validate_literal_type(solver, SolverTypes)
        if lower_bound is not None and not isinstance(lower_bound, str):
            validate_positive_float(lower_bound, "lower_bound")
        elif isinstance(lower_bound, str) and lower_bound.lower() != "estimate":
            raise ValueError(
                f"lower_bound must be a positive float, 'estimate' or None. Got '{lower_bound}'."
            )

    def fit(self, path) -> BlindPredictor:
        """
        Estimate the predictor from an observed path.

        Parameters
        ----------
        path : ObservedPath or array-like
            Samples X_{-N}, ..., X_{-1}, oldest first.

        Returns
        -------
        self

        Raises
        ------
        WindowTooLarge
            If 2K >= N.
        """
        path = path if isinstance(path, ObservedPath) else ObservedPath(path)
        K = int(self.window)
        if 2 * K >= path.n_samples:
            raise WindowTooLarge(
                f"Window {K} needs 2K < N; got N = {path.n_samples}."
            )

        blocks = IndexBlocks(K, horizon=K)
        est = estimate_covariance(path, K)
        reg = regularize(est, self.lower_bound)
        gamma_tilde = regularized_covariance_matrix(reg, K)
        gamma_ob = est.lags(blocks.observed[:, None] - blocks.blind[None, :])
        matrix = spd_solve(gamma_tilde, gamma_ob, solver=self.solver)

        self.coefficients_ = PredictorCoefficients(matrix)
        self.alpha_hat_ = reg.alpha_hat
        self.covariance_ = est
        self.regularized_ = reg
        self.lower_bound_ = reg.lower_bound
        self.lower_bound_estimated_ = reg.lower_bound_estimated
        self.n_samples_ = path.n_samples
        return self

    def predict(self, path) -> np.ndarray:
        """
        Predict X_0, ..., X_{K-1} from the last K samples of `path`.

        prediction_j = sum_i coeff[i, j] X_{-K+i}.

        Parameters
        ----------
        path : ObservedPath or array-like
            Supplies at least X_{-K}, ..., X_{-1}.

        Returns
        -------
        np.ndarray of shape (K,)
        """
        check_is_fitted(self, "coefficients_")
        x = np.asarray(path.samples if isinstance(path, ObservedPath) else path, dtype=np.float64)
        if x.ndim != 1 or x.size < self.coefficients_.window:
            raise ValueError(
                f"Prediction needs at least {self.coefficients_.window} samples."
            )
        return self.coefficients_.apply(x[-self.coefficients_.window :])

    def to_csv(self, path: Optional[Union[str, Path]] = None, metadata=None) -> None:
        """
        Write K on one row, then the K x K matrix, after metadata lines.
        """
        check_is_fitted(self, "coefficients_")
        meta = {
            "window": self.coefficients_.window,
            "n_samples": self.n_samples_,
            "alpha_hat": self.alpha_hat_,
            "lower_bound": self.lower_bound_,
            "lower_bound_estimated": self.lower_bound_estimated_,
        }
        meta.update(metadata or {})
        write_matrix_csv(self.coefficients_.matrix, path, metadata=meta)

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"window": 1},
            {"window": 3, "lower_bound": 0.25, "solver": "levinson"},
        ]


def choose_window(n_samples: Integral, sobolev_index: Real) -> int:
    """
    Rate-optimal window K(N) = max(1, floor((N / log N)^{1 / (2 (2s + 3))})).

    Parameters
    ----------
    n_samples : int
        Path length N >= 3.
    sobolev_index : float
        Sobolev index s >= 1.

    Returns
    -------
    int

    Raises
    ------
    DomainError
        If N <= 2 or s < 1.
    """
    if not isinstance(n_samples, Integral) or n_samples <= 2:
        raise DomainError(f"The window rule needs an integer N >= 3. Got {n_samples}.")
    s = validate_real(sobolev_index, "sobolev_index")
    if s < 1:
        raise DomainError(f"The window rule needs s >= 1. Got {s}.")
    N = float(n_samples)
    return max(1, int(np.floor((N / np.log(N)) ** (1.0 / (2.0 * (2.0 * s + 3.0))))))


def theoretical_rate_exponent(sobolev_index: Real) -> float:
    """Exponent -(2s - 1) / (2 (2s + 3)) of the risk rate in N / log N."""
    s = validate_real(sobolev_index, "sobolev_index", min_value=1.0)
    return -(2.0 * s - 1.0) / (2.0 * (2.0 * s + 3.0))


@dataclass(frozen=True)
class TheoryConstants:
    """
    Constants of the risk bound.

    C0 = 4 m' (6 m'/m^2 + 4/m + 2), C1 = C0 r4^{1/4} / sqrt(m),
    C2 = ||1/f||_{W_2s} m' (1 + m'/m), C3 = m'/m,
    C4 = (m'^2 / m)(1 + m'/m), C2_proof = C4 sqrt(||1/f||_{W_s}),
    r4 = 3 r_0^2.
    """

    C0: float
    C1: float
    C2: float
    C3: float
    C4: float
    r4: float
    C2_proof: Optional[float] = None


def theory_constants(
    m: Real,
    m_prime: Real,
    r0: Real,
    f_inv_sobolev: Real,
    f_inv_sobolev_low: Optional[Real] = None,
) -> TheoryConstants:
    """
    Constants of the bias and variance bounds.

    Parameters
    ----------
    m, m_prime : float
        Spectral bounds, 0 < m <= m'.
    r0 : float
        Variance of X_0.
    f_inv_sobolev : float
        ||1/f||_{W_2s}, entering C2.
    f_inv_sobolev_low : float, optional
        ||1/f||_{W_s}; if given, C2_proof = C4 sqrt(||1/f||_{W_s}).

    Returns
    -------
    TheoryConstants

    Raises
    ------
    DomainError
        If m <= 0 or m' < m.
    """
    m = validate_real(m, "m")
    m_prime = validate_real(m_prime, "m_prime")
    if m <= 0:
        raise DomainError(f"m must be positive. Got {m}.")
    if m_prime < m:
        raise DomainError(f"m' must be at least m. Got m = {m}, m' = {m_prime}.")
    r0 = validate_positive_float(r0, "r0")
    f_inv_sobolev = validate_real(f_inv_sobolev, "f_inv_sobolev", min_value=0.0)

    r4 = 3.0 * r0**2
    C0 = 4.0 * m_prime * (6.0 * m_prime / m**2 + 4.0 / m + 2.0)
    C1 = C0 * r4**0.25 / np.sqrt(m)
    C2 = f_inv_sobolev * m_prime * (1.0 + m_prime / m)
    C3 = m_prime / m
    C4 = (m_prime**2 / m) * (1.0 + m_prime / m)
    C2_proof = None
    if f_inv_sobolev_low is not None:
        low = validate_real(f_inv_sobolev_low, "f_inv_sobolev_low", min_value=0.0)
        C2_proof = C4 * np.sqrt(low)
    return TheoryConstants(
        C0=float(C0),
        C1=float(C1),
        C2=float(C2),
        C3=float(C3),
        C4=float(C4),
        r4=float(r4),
        C2_proof=None if C2_proof is None else float(C2_proof),
    )


def model_theory_constants(
    cov: CovarianceSequence, sobolev_index: Real = 1.0
) -> TheoryConstants:
    """
    Theory constants of a known model.

    m and m' are the computed spectral bounds; the Sobolev norms of 1/f
    at orders 2s and s come from its first 256 Fourier coefficients.
    """
    f = covariance_to_spectrum(cov, sobolev_index=sobolev_index)
    f_inv = inverse_spectrum(f, _INVERSE_SYMBOL_COEFFS)
    s = float(sobolev_index)
    return theory_constants(
        f.lower_bound,
        f.upper_bound,
        cov.variance,
        f_inv.sobolev_norm(2.0 * s),
        f_inv.sobolev_norm(s),
    )


def risk_bound(
    n_samples: Integral, window: Integral, consts: TheoryConstants, sobolev_index: Real
) -> float:
    """
    Upper bound C1 K^2 sqrt(log K) / sqrt(N) + C2 / K^{(2s - 1)/2} on the root global risk.

    A reference curve only; the constants are loose.

    Raises
    ------
    DomainError
        If K < 2 or N < 2.
    """
    if not isinstance(window, Integral) or window < 2:
        raise DomainError(f"The risk bound needs K >= 2. Got {window}.")
    if not isinstance(n_samples, Integral) or n_samples < 2:
        raise DomainError(f"The risk bound needs N >= 2. Got {n_samples}.")
    s = validate_real(sobolev_index, "sobolev_index")
    K = float(window)
    variance = consts.C1 * K**2 * np.sqrt(np.log(K)) / np.sqrt(float(n_samples))
    bias = consts.C2 / K ** ((2.0 * s - 1.0) / 2.0)
    return float(variance + bias)
