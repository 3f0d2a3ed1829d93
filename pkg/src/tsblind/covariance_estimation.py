"""
Empirical autocovariances, the empirical spectral density and its
regularisation.
"""

from __future__ import annotations

import logging
import warnings
from numbers import Integral, Real
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np
import pandas as pd
from statsmodels.tsa.stattools import acovf

from tsblind.exceptions import LagTooLarge, WindowTooLarge
from tsblind.spectral_model import CovarianceSequence, TrigonometricPolynomial
from tsblind.toeplitz_algebra import ToeplitzMatrix
from tsblind.utils.serialization import read_column_csv, write_frame
from tsblind.utils.types import LowerBoundTypes
from tsblind.utils.validate import (
    validate_integers,
    validate_path_array,
    validate_positive_float,
    validate_real,
    validate_real_vector,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

# Floor of the data-driven lower bound when m is not supplied.
ESTIMATED_BOUND_FLOOR = 1e-3


class ObservedPath:
    """
    Observed samples X_{-N}, ..., X_{-1}, oldest first.

    Parameters
    ----------
    samples : array-like of float
        At least two finite samples, as a 1D array or a single column.
    """

    def __init__(self, samples) -> None:
        x = validate_path_array(samples, min_length=2).copy()
        x.flags.writeable = False
        self._samples = x

    @property
    def samples(self) -> np.ndarray:
        return self._samples

    @property
    def n_samples(self) -> int:
        return self._samples.size

    def __len__(self) -> int:
        return self._samples.size

    def last(self, k: Integral) -> np.ndarray:
        """The k most recent samples X_{-k}, ..., X_{-1}."""
        validate_single_integer(k, min_value=1, max_value=self.n_samples)
        return self._samples[-int(k) :]

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> ObservedPath:
        """Read a single-column CSV, one sample per line, oldest first."""
        return cls(read_column_csv(path))

    def to_csv(
        self,
        path: Optional[Union[str, Path]] = None,
        metadata: Optional[Mapping[str, object]] = None,
    ) -> None:
        """Write one sample per line with 17 significant digits."""
        write_frame(pd.DataFrame({"x": self._samples}), path, metadata, header=False)

    def __repr__(self) -> str:
        return f"ObservedPath(n_samples={self.n_samples})"


class EmpiricalCovariance:
    """
    Empirical autocovariances r_hat(0), ..., r_hat(2K) of a path of length N.

    Parameters
    ----------
    r_hat : array-like of float
        Estimates at lags 0..2K.
    window : int
        Window size K.
    n_samples : int
        Path length N, with 2K < N.
    """

    def __init__(self, r_hat, window: Integral, n_samples: Integral) -> None:
        validate_single_integer(window, min_value=1)
        validate_single_integer(n_samples, min_value=2)
        r_hat = validate_real_vector(r_hat, "r_hat").copy()
        if r_hat.size != 2 * int(window) + 1:
            raise ValueError(
                f"Expected {2 * int(window) + 1} lags for window {window}, got {r_hat.size}."
            )
        if 2 * int(window) >= int(n_samples):
            raise WindowTooLarge(
                f"Window {window} needs 2K < N; got N = {n_samples}."
            )
        if r_hat[0] < 0:
            raise ValueError(f"r_hat(0) must be non-negative. Got {r_hat[0]}.")
        r_hat.flags.writeable = False
        self._r_hat = r_hat
        self.window = int(window)
        self.n_samples = int(n_samples)

    @property
    def r_hat(self) -> np.ndarray:
        return self._r_hat

    def lags(self, k) -> np.ndarray:
        """Estimates at lags |k| <= 2K."""
        k = np.abs(np.asarray(k, dtype=np.int64))
        if np.any(k > 2 * self.window):
            raise LagTooLarge(
                f"Only lags up to 2K = {2 * self.window} are estimated."
            )
        return self._r_hat[k]

    def to_covariance(self) -> CovarianceSequence:
        """The estimates as a finitely supported CovarianceSequence."""
        return CovarianceSequence(values=self._r_hat.copy())

    def __repr__(self) -> str:
        return (
            f"EmpiricalCovariance(window={self.window}, n_samples={self.n_samples})"
        )


class RegularizedCovariance:
    """
    Empirical covariance with the diagonal shift alpha_hat.

    Parameters
    ----------
    base : EmpiricalCovariance
    alpha_hat : float
        Non-negative shift.
    lower_bound : float
        Lower spectral bound m used for the shift.
    lower_bound_estimated : bool, default=False
        Whether m was estimated from the data.
    fhat_min : float, optional
        Minimum of the empirical spectral density.
    """

    def __init__(
        self,
        base: EmpiricalCovariance,
        alpha_hat: Real,
        lower_bound: Real,
        lower_bound_estimated: bool = False,
        fhat_min: Optional[Real] = None,
    ) -> None:
        self.base = base
        self.alpha_hat = validate_real(alpha_hat, "alpha_hat", min_value=0.0)
        self.lower_bound = validate_positive_float(lower_bound, "lower_bound")
        self.lower_bound_estimated = bool(lower_bound_estimated)
        self.fhat_min = None if fhat_min is None else float(fhat_min)

    @property
    def window(self) -> int:
        return self.base.window

    def toeplitz(self) -> ToeplitzMatrix:
        return regularized_covariance_matrix(self, self.base.window)

    def __repr__(self) -> str:
        return (
            f"RegularizedCovariance(window={self.window}, "
            f"alpha_hat={self.alpha_hat:.6g}, lower_bound={self.lower_bound:.6g})"
        )


def _as_path(path) -> ObservedPath:
    return path if isinstance(path, ObservedPath) else ObservedPath(path)


def empirical_autocovariance(path: ObservedPath, p: Integral) -> float:
    """
    Unbiased empirical autocovariance at lag p.

    r_hat(p) = (1 / (N - p)) sum_{k=-N}^{-p-1} X_k X_{k+p}.

    Parameters
    ----------
    path : ObservedPath or array-like
        The observed samples.
    p : int
        Lag, 0 <= p < N.

    Returns
    -------
    float

    Raises
    ------
    LagTooLarge
        If p >= N.
    """
    return float(empirical_autocovariances(path, p)[-1])


def empirical_autocovariances(path: ObservedPath, max_lag: Integral) -> np.ndarray:
    """r_hat(0), ..., r_hat(max_lag), from statsmodels ``acovf``."""
    path = _as_path(path)
    validate_integers(max_lag, min_value=0)
    N = path.n_samples
    if max_lag >= N:
        raise LagTooLarge(
            f"Lag {max_lag} needs at least {max_lag + 1} samples; got N = {N}."
        )
    # The process is centred: no demeaning, lag p divided by N - p.
    return acovf(
        path.samples, adjusted=True, demean=False, fft=False, nlag=int(max_lag)
    )


def estimate_covariance(path: ObservedPath, window: Integral) -> EmpiricalCovariance:
    """
    Empirical autocovariances at lags 0..2K.

    Raises
    ------
    WindowTooLarge
        If 2K >= N.
    """
    path = _as_path(path)
    validate_single_integer(window, min_value=1)
    if 2 * int(window) >= path.n_samples:
        raise WindowTooLarge(
            f"Window {window} needs 2K < N; got N = {path.n_samples}."
        )
    r_hat = empirical_autocovariances(path, 2 * int(window))
    return EmpiricalCovariance(r_hat, window, path.n_samples)


def empirical_spectral_density(est: EmpiricalCovariance) -> TrigonometricPolynomial:
    """
    f_hat_K(t) = sum_{|p| <= K} r_hat(|p|) e^{ipt}.

    The result may be negative somewhere.
    """
    return TrigonometricPolynomial(coefficients=est.r_hat[: est.window + 1])


def regularization_shift(fhat_min: Real, m: Real) -> float:
    """
    alpha_hat = -min f_hat 1{min f_hat <= 0} + (m / 4) 1{min f_hat <= m / 4}.

    Parameters
    ----------
    fhat_min : float
        Minimum of the empirical spectral density.
    m : float
        Lower spectral bound, m > 0.

    Returns
    -------
    float
        The non-negative shift.
    """
    fhat_min = validate_real(fhat_min, "fhat_min")
    m = validate_positive_float(m, "m")
    alpha = 0.0
    if fhat_min <= 0:
        alpha -= fhat_min
    if fhat_min <= m / 4.0:
        alpha += m / 4.0
    return alpha


def regularize(
    est: EmpiricalCovariance, lower_bound: LowerBoundTypes = None
) -> RegularizedCovariance:
    """
    Shift the empirical covariance so its symbol is at least m / 4.

    Parameters
    ----------
    est : EmpiricalCovariance
    lower_bound : float, "estimate" or None
        The lower spectral bound m. With None or "estimate", m is replaced
        by max(min f_hat, 1e-3) and the result is flagged as estimated.

    Returns
    -------
    RegularizedCovariance
    """
    fhat_min = empirical_spectral_density(est).minimum
    estimated = lower_bound is None or (
        isinstance(lower_bound, str) and lower_bound.lower() == "estimate"
    )
    if estimated:
        m = max(fhat_min, ESTIMATED_BOUND_FLOOR)
        warnings.warn(
            f"No lower spectral bound given; using the data-driven value m = {m:.6g}.",
            stacklevel=2,
        )
    else:
        m = validate_positive_float(lower_bound, "lower_bound")
    alpha = regularization_shift(fhat_min, m)
    if alpha > 0:
        logger.debug(
            f"regularization fired: min f_hat = {fhat_min:.6g}, alpha_hat = {alpha:.6g}"
        )
    return RegularizedCovariance(est, alpha, m, estimated, fhat_min)


def regularized_covariance_matrix(
    reg: RegularizedCovariance, window: Optional[Integral] = None
) -> ToeplitzMatrix:
    """
    K x K Toeplitz matrix with first row (r_hat(0) + alpha_hat, r_hat(1), ..., r_hat(K-1)).

    Its smallest eigenvalue is at least m / 4, so its inverse has operator
    norm at most 4 / m.
    """
    window = reg.window if window is None else window
    validate_single_integer(window, min_value=1, max_value=2 * reg.window + 1)
    row = reg.base.r_hat[: int(window)].copy()
    row[0] += reg.alpha_hat
    return ToeplitzMatrix(row)


def _truth_lags(truth, n_lags: int) -> np.ndarray:
    if isinstance(truth, EmpiricalCovariance):
        return truth.lags(np.arange(n_lags))
    if isinstance(truth, CovarianceSequence):
        return truth.lags(np.arange(n_lags))
    return CovarianceSequence(values=truth).lags(np.arange(n_lags))


def sup_deviation(est: EmpiricalCovariance, truth) -> float:
    """
    max_{p <= 2K} |r_hat(p) - r(p)|.

    Parameters
    ----------
    est : EmpiricalCovariance
    truth : CovarianceSequence, EmpiricalCovariance or array-like
        Covariances covering lags 0..2K.

    Raises
    ------
    LagOutOfRange
        If the truth does not cover lag 2K.
    """
    n_lags = 2 * est.window + 1
    return float(np.max(np.abs(est.r_hat - _truth_lags(truth, n_lags))))


def spectral_sup_error(est: EmpiricalCovariance, truth: CovarianceSequence) -> float:
    """Sup norm of f_hat_K - f on the refined grid."""
    f_true = TrigonometricPolynomial(coefficients=truth.r)
    return empirical_spectral_density(est).difference(f_true).sup_norm()


def spectral_error_bound(est: EmpiricalCovariance, truth: CovarianceSequence) -> float:
    """
    (2K + 1) sup_deviation + 2 sum_{p > K} |r_p|.

    The tail sum runs over the stored lags of `truth`.
    """
    K = est.window
    tail = 2.0 * float(np.sum(np.abs(truth.r[K + 1 :])))
    return (2 * K + 1) * sup_deviation(est, truth) + tail


def concentration_bound(
    n_samples: Integral, window: Integral, upper_bound: Real, x: Real = np.log(2.0)
) -> float:
    """
    Deviation level 4 m' (sqrt((log K + x) / N) + x / N).

    With probability at least 1 - e^{-x}, the sup deviation over lags up to
    2K stays below this level asymptotically.
    """
    validate_single_integer(n_samples, min_value=1)
    validate_single_integer(window, min_value=1)
    upper_bound = validate_positive_float(upper_bound, "upper_bound")
    x = validate_positive_float(x, "x")
    N = float(n_samples)
    return 4.0 * upper_bound * (np.sqrt((np.log(window) + x) / N) + x / N)
