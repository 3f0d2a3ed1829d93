"""
Finite-dimensional linear algebra on Toeplitz minors.

Time indices are integers; the observed window of size K is
O_K = {-K, ..., -1}, the blind block B_K = {0, ..., K-1}, and operators on
the doubly infinite line are realised on the truncated range [-T, T).
"""

from __future__ import annotations

import logging
from functools import cached_property
from numbers import Integral
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import (
    cho_factor,
    cho_solve,
    eigh,
    eigvalsh,
    solve_toeplitz,
    toeplitz,
)
from statsmodels.tsa.stattools import levinson_durbin as sm_levinson_durbin

from tsblind.exceptions import HorizonTooSmall, NotPositiveDefinite
from tsblind.spectral_model import (
    CovarianceSequence,
    covariance_to_spectrum,
    inverse_spectrum,
)
from tsblind.utils.types import IndexSetTypes, PrecisionTypes, SolverTypes
from tsblind.utils.validate import (
    validate_index_set,
    validate_literal_type,
    validate_real_vector,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

DEFAULT_MIN_HORIZON = 512


def default_horizon(window: Integral) -> int:
    """Truncation horizon max(512, 16 K)."""
    validate_single_integer(window, min_value=1)
    return max(DEFAULT_MIN_HORIZON, 16 * int(window))


class ToeplitzMatrix:
    """
    Symmetric Toeplitz matrix with entries r_{|i-j|}.

    Parameters
    ----------
    first_row : array-like of float
        r_0, ..., r_{n-1}.
    """

    def __init__(self, first_row) -> None:
        row = validate_real_vector(first_row, "first_row").copy()
        row.flags.writeable = False
        self._first_row = row

    @classmethod
    def from_covariance(cls, cov: CovarianceSequence, n: Integral) -> ToeplitzMatrix:
        """Covariance matrix of n consecutive samples."""
        return cls(cov.first_row(n))

    @property
    def first_row(self) -> np.ndarray:
        return self._first_row

    @property
    def dimension(self) -> int:
        return self._first_row.size

    @cached_property
    def dense(self) -> np.ndarray:
        matrix = toeplitz(self._first_row)
        matrix.flags.writeable = False
        return matrix

    def to_dense(self) -> np.ndarray:
        """Writable dense copy."""
        return np.array(self.dense)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return eigvalsh(self.dense)

    def solve(self, rhs, solver: SolverTypes = "cholesky") -> np.ndarray:
        """Solve T X = rhs, see `spd_solve`."""
        return spd_solve(self, rhs, solver=solver)

    def __repr__(self) -> str:
        return f"ToeplitzMatrix(dimension={self.dimension})"


class IndexBlocks:
    """
    Split of the truncated index range [-T, T) for a window K.

    M_K = {-T, ..., -K-1} (missing past), O_K = {-K, ..., -1} (observed),
    B_K = {0, ..., K-1} (blind), F_K = {K, ..., T-1} (future).

    Parameters
    ----------
    window : int
        Window size K >= 1.
    horizon : int, optional
        Truncation horizon T >= K. Defaults to max(512, 16 K).
    """

    def __init__(self, window: Integral, horizon: Optional[Integral] = None) -> None:
        validate_single_integer(window, min_value=1)
        if horizon is None:
            horizon = default_horizon(window)
        validate_single_integer(horizon, min_value=int(window))
        self.window = int(window)
        self.horizon = int(horizon)

    @property
    def missing(self) -> np.ndarray:
        return np.arange(-self.horizon, -self.window)

    @property
    def observed(self) -> np.ndarray:
        return np.arange(-self.window, 0)

    @property
    def blind(self) -> np.ndarray:
        return np.arange(0, self.window)

    @property
    def future(self) -> np.ndarray:
        return np.arange(self.window, self.horizon)

    @property
    def past(self) -> np.ndarray:
        """M_K and O_K together: {-T, ..., -1}."""
        return np.arange(-self.horizon, 0)

    @property
    def universe(self) -> np.ndarray:
        return np.arange(-self.horizon, self.horizon)

    def __repr__(self) -> str:
        return f"IndexBlocks(window={self.window}, horizon={self.horizon})"


class PredictorCoefficients:
    """
    K x K linear predictor from the observed window to the blind block.

    Row i multiplies X_{-K+i}, so rows run over (X_{-K}, ..., X_{-1}); column
    j holds the coefficients predicting X_j, j in B_K.

    Parameters
    ----------
    matrix : array-like of shape (K, K)
        Finite coefficients.
    """

    def __init__(self, matrix) -> None:
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(
                f"Predictor coefficients must be a square matrix. Got shape {matrix.shape}."
            )
        if not np.isfinite(matrix).all():
            raise ValueError("Predictor coefficients must be finite.")
        matrix.flags.writeable = False
        self._matrix = matrix

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def window(self) -> int:
        return self._matrix.shape[0]

    def column(self, j: Integral) -> np.ndarray:
        """Coefficients predicting X_j."""
        validate_single_integer(j, min_value=0, max_value=self.window - 1)
        return self._matrix[:, int(j)]

    def apply(self, window_values) -> np.ndarray:
        """
        Predictions of X_0..X_{K-1} from (X_{-K}, ..., X_{-1}).

        Parameters
        ----------
        window_values : array-like of shape (K,) or (R, K)
            Observed window(s), oldest first.

        Returns
        -------
        np.ndarray
            Predictions, shape (K,) or (R, K).
        """
        window_values = np.asarray(window_values, dtype=np.float64)
        if window_values.shape[-1] != self.window:
            raise ValueError(
                f"Expected {self.window} observed values, got {window_values.shape[-1]}."
            )
        return window_values @ self._matrix

    def __repr__(self) -> str:
        return f"PredictorCoefficients(window={self.window})"


def build_minor(cov: CovarianceSequence, rows: IndexSetTypes, cols: IndexSetTypes) -> np.ndarray:
    """
    Covariance minor Gamma_{AB} with entries r_{|i-j|}.

    Parameters
    ----------
    cov : CovarianceSequence
        The autocovariances.
    rows, cols : int, sequence of int or 1D integer array
        Time index sets A and B.

    Returns
    -------
    np.ndarray of shape (len(rows), len(cols))

    Raises
    ------
    LagOutOfRange
        If a needed lag exceeds the support of a truncated sequence.
    """
    rows = validate_index_set(rows, "rows")
    cols = validate_index_set(cols, "cols")
    return cov.lags(rows[:, None] - cols[None, :])


def levinson_durbin(first_row) -> tuple[np.ndarray, np.ndarray]:
    """
    Durbin recursion on the autocovariances r_0..r_{n-1}.

    Wraps statsmodels ``levinson_durbin`` with ``isacov=True``.

    Parameters
    ----------
    first_row : array-like of float
        First row of a symmetric Toeplitz matrix.

    Returns
    -------
    reflection : np.ndarray of shape (n - 1,)
        Reflection (partial autocorrelation) coefficients.
    errors : np.ndarray of shape (n,)
        One-step prediction error variances of orders 0..n-1. The matrix is
        positive definite if and only if all are positive.
    """
    r = validate_real_vector(first_row, "first_row")
    n = r.size
    if n == 1 or r[0] <= 0:
        return np.zeros(n - 1), np.full(n, r[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        _, _, pacf, sigma, _ = sm_levinson_durbin(r, nlags=n - 1, isacov=True)
    reflection = np.asarray(pacf[1:], dtype=np.float64)
    errors = np.concatenate([[r[0]], sigma[1:]])
    # Past the first non-positive error the recursion is meaningless.
    bad = np.flatnonzero(~(errors > 0))
    if bad.size:
        errors[bad[0] :] = errors[bad[0]] if np.isfinite(errors[bad[0]]) else 0.0
        reflection[bad[0] :] = 0.0
    return reflection, errors


def _dense(T) -> np.ndarray:
    if isinstance(T, ToeplitzMatrix):
        return T.dense
    matrix = np.asarray(T, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"Expected a square matrix. Got shape {matrix.shape}.")
    return matrix


def spd_solve(T, rhs, solver: SolverTypes = "cholesky") -> np.ndarray:
    """
    Solve T X = rhs for a symmetric positive definite T.

    Parameters
    ----------
    T : ToeplitzMatrix or array-like of shape (n, n)
        The system matrix. Dense matrices need not be Toeplitz.
    rhs : array-like of shape (n,) or (n, k)
        Right-hand side(s).
    solver : {"cholesky", "levinson"}, default="cholesky"
        Cholesky factorisation, or Levinson recursion (ToeplitzMatrix only).
        Both certify positive definiteness.

    Returns
    -------
    np.ndarray
        X, with the shape of `rhs`.

    Raises
    ------
    NotPositiveDefinite
        If T is not positive definite.
    """
    validate_literal_type(solver, SolverTypes)
    rhs = np.asarray(rhs, dtype=np.float64)
    if solver == "levinson":
        if not isinstance(T, ToeplitzMatrix):
            raise TypeError("The levinson solver requires a ToeplitzMatrix.")
        _, errors = levinson_durbin(T.first_row)
        if errors.min() <= 0:
            raise NotPositiveDefinite(
                f"Toeplitz matrix of dimension {T.dimension} is not positive definite."
            )
        return solve_toeplitz(T.first_row, rhs)

    matrix = _dense(T)
    try:
        factor = cho_factor(matrix, lower=True, check_finite=True)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefinite(
            f"Matrix of dimension {matrix.shape[0]} is not positive definite: {err}"
        ) from err
    return cho_solve(factor, rhs)


def spd_inverse(T, solver: SolverTypes = "cholesky") -> np.ndarray:
    """Inverse of a symmetric positive definite matrix, symmetrised."""
    n = T.dimension if isinstance(T, ToeplitzMatrix) else _dense(T).shape[0]
    inverse = spd_solve(T, np.eye(n), solver=solver)
    return 0.5 * (inverse + inverse.T)


def schur_complement(matrix, keep) -> np.ndarray:
    """
    Schur complement S = M_kk - M_kd M_dd^{-1} M_dk of the positions `keep`.

    Parameters
    ----------
    matrix : array-like of shape (n, n)
        Symmetric positive definite matrix.
    keep : int, sequence of int or 1D integer array
        Positions (0-based) kept; the remaining positions are eliminated.

    Returns
    -------
    np.ndarray of shape (len(keep), len(keep))
    """
    matrix = _dense(matrix)
    keep = validate_index_set(keep, "keep")
    n = matrix.shape[0]
    if keep.min() < 0 or keep.max() >= n:
        raise ValueError(f"Positions must lie in [0, {n}). Got {keep}.")
    drop = np.setdiff1d(np.arange(n), keep)
    m_kk = matrix[np.ix_(keep, keep)]
    if drop.size == 0:
        return m_kk.copy()
    m_kd = matrix[np.ix_(keep, drop)]
    m_dd = matrix[np.ix_(drop, drop)]
    S = m_kk - m_kd @ spd_solve(m_dd, m_kd.T)
    return 0.5 * (S + S.T)


def precision_tail(cov: CovarianceSequence, horizon: Integral) -> float:
    """
    l2 mass sqrt(sum_{|k| >= T} p_k^2) of the coefficients of 1/f beyond T.

    Estimated from 4T coefficients of the inverse symbol.
    """
    validate_single_integer(horizon, min_value=1)
    f = covariance_to_spectrum(cov)
    p = inverse_spectrum(f, 4 * int(horizon)).a
    return float(np.sqrt(2.0 * np.sum(p[int(horizon) :] ** 2)))


def truncated_precision(
    cov: CovarianceSequence,
    horizon: Integral,
    precision: PrecisionTypes = "finite",
) -> np.ndarray:
    """
    Precision operator Lambda on the truncated range [-T, T).

    ``"finite"`` inverts the truncated covariance, ``"symbol"`` truncates the
    Toeplitz operator of 1/f.
    """
    validate_single_integer(horizon, min_value=1)
    validate_literal_type(precision, PrecisionTypes)
    n = 2 * int(horizon)
    if precision == "finite":
        return spd_inverse(ToeplitzMatrix.from_covariance(cov, n))
    f = covariance_to_spectrum(cov)
    return toeplitz(inverse_spectrum(f, n - 1).a)


def _check_inside(indices: np.ndarray, low: int, high: int, name: str) -> None:
    if indices.min() < low or indices.max() >= high:
        raise HorizonTooSmall(
            f"{name} must lie in [{low}, {high}) for this horizon. Got {indices}."
        )


def _check_tail(cov: CovarianceSequence, horizon: int, tol: Optional[float]) -> None:
    if tol is None:
        return
    tail = precision_tail(cov, horizon)
    if tail > tol:
        raise HorizonTooSmall(
            f"The inverse symbol carries mass {tail:.3g} beyond horizon {horizon}; "
            f"the requested tolerance {tol:.3g} needs a larger horizon."
        )


def schur_complement_inverse(
    cov: CovarianceSequence,
    A: IndexSetTypes,
    horizon: Integral,
    precision: PrecisionTypes = "finite",
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Schur complement S = Lambda_A - Lambda_AM Lambda_M^{-1} Lambda_MA on [-T, T).

    S approximates Gamma_A^{-1}. With ``precision="finite"`` the identity is
    exact up to rounding for every horizon; with ``precision="symbol"`` the
    error shrinks as the horizon grows.

    Parameters
    ----------
    cov : CovarianceSequence
        The autocovariances.
    A : index set
        Time indices, inside [-T, T).
    horizon : int
        Truncation horizon T.
    precision : {"finite", "symbol"}, default="finite"
        How Lambda is realised on the truncated range.
    tol : float, optional
        If given, the l2 mass of the inverse symbol beyond T must not exceed
        it.

    Returns
    -------
    np.ndarray of shape (len(A), len(A))

    Raises
    ------
    HorizonTooSmall
        If A is outside [-T, T) or the tail exceeds `tol`.
    NotPositiveDefinite
        If a factorisation fails.
    """
    A = validate_index_set(A, "A")
    validate_single_integer(horizon, min_value=1)
    T = int(horizon)
    _check_inside(A, -T, T, "A")
    _check_tail(cov, T, tol)
    Lambda = truncated_precision(cov, T, precision)
    return schur_complement(Lambda, A + T)


def oracle_predictor(
    cov: CovarianceSequence, window: Integral, solver: SolverTypes = "cholesky"
) -> PredictorCoefficients:
    """
    Known-covariance predictor (Gamma_{O_K})^{-1} Gamma_{O_K B_K}.

    Parameters
    ----------
    cov : CovarianceSequence
        True autocovariances, lags up to 2K - 1.
    window : int
        Window size K.
    solver : {"cholesky", "levinson"}, default="cholesky"

    Returns
    -------
    PredictorCoefficients
    """
    blocks = IndexBlocks(window, horizon=window)
    gamma_o = ToeplitzMatrix.from_covariance(cov, blocks.window)
    gamma_ob = build_minor(cov, blocks.observed, blocks.blind)
    return PredictorCoefficients(spd_solve(gamma_o, gamma_ob, solver=solver))


def prediction_error_operator(
    cov: CovarianceSequence, A: IndexSetTypes, B: IndexSetTypes
) -> np.ndarray:
    """
    Quadratic error operator Q = Gamma_B - Gamma_BA Gamma_A^{-1} Gamma_AB.

    Q is the covariance of the error of the best linear prediction of
    (X_j)_{j in B} from (X_i)_{i in A}.

    Raises
    ------
    ValueError
        If A and B intersect.
    NotPositiveDefinite
        If Gamma_A is not positive definite.
    """
    A = validate_index_set(A, "A")
    B = validate_index_set(B, "B")
    if np.intersect1d(A, B).size:
        raise ValueError("Index sets A and B must be disjoint.")
    gamma_ab = build_minor(cov, A, B)
    Q = build_minor(cov, B, B) - gamma_ab.T @ spd_solve(build_minor(cov, A, A), gamma_ab)
    return 0.5 * (Q + Q.T)


class DualityCheck(NamedTuple):
    """Both sides of Q(B | A) = (Lambda_B)^{-1} with Lambda the precision on A and B."""

    error_operator: np.ndarray
    precision_inverse: np.ndarray
    max_error: float


def error_operator_duality(
    cov: CovarianceSequence, A: IndexSetTypes, B: IndexSetTypes
) -> DualityCheck:
    """
    Compare Q(B | A) with the inverse of the B block of (Gamma_{A u B})^{-1}.
    """
    A = validate_index_set(A, "A")
    B = validate_index_set(B, "B")
    Q = prediction_error_operator(cov, A, B)
    universe = np.concatenate([A, B])
    Lambda = spd_inverse(build_minor(cov, universe, universe))
    lambda_b = Lambda[A.size :, A.size :]
    dual = spd_inverse(lambda_b)
    return DualityCheck(Q, dual, float(np.max(np.abs(Q - dual))))


class PastProjector(NamedTuple):
    """Two forms of the projector of the blind block onto the truncated past."""

    direct: np.ndarray
    precision_form: np.ndarray
    discrepancy: float


def past_projector_forms(
    cov: CovarianceSequence,
    B: IndexSetTypes,
    horizon: Integral,
    precision: PrecisionTypes = "finite",
) -> PastProjector:
    """
    Predictor of (X_j)_{j in B} from X_{-T}, ..., X_{-1}, computed twice.

    ``direct`` is Gamma_past^{-1} Gamma_{past, B}; ``precision_form`` is
    -Lambda_{past, F} Lambda_F^{-1} restricted to B, with F = {0, ..., T-1}
    and Lambda realised on [-T, T). Rows run over X_{-T}, ..., X_{-1}.
    """
    B = validate_index_set(B, "B")
    validate_single_integer(horizon, min_value=1)
    T = int(horizon)
    _check_inside(B, 0, T, "B")

    past = np.arange(-T, 0)
    gamma_past = ToeplitzMatrix.from_covariance(cov, T)
    direct = spd_solve(gamma_past, build_minor(cov, past, B))

    Lambda = truncated_precision(cov, T, precision)
    lambda_pf = Lambda[:T, T:]
    lambda_f = Lambda[T:, T:]
    full = -spd_solve(lambda_f, lambda_pf.T).T
    precision_form = full[:, B]
    discrepancy = float(np.max(np.abs(direct - precision_form)))
    logger.debug(
        f"past projector at horizon {T}: forms differ by {discrepancy:.3g}"
    )
    return PastProjector(direct, precision_form, discrepancy)


def projector_infinite_past(
    cov: CovarianceSequence,
    B: IndexSetTypes,
    horizon: Integral,
    precision: PrecisionTypes = "finite",
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Best linear predictor of (X_j)_{j in B} from the past truncated at T.

    Parameters
    ----------
    cov : CovarianceSequence
        True autocovariances, lags up to 2T - 1.
    B : index set
        Targets, inside [0, T).
    horizon : int
        Past length T.
    precision : {"finite", "symbol"}, default="finite"
        Realisation of Lambda used for the cross-check when `tol` is given.
    tol : float, optional
        If given, the precision-form projector is computed too and must agree
        with the direct one within `tol`.

    Returns
    -------
    np.ndarray of shape (T, len(B))
        Rows run over X_{-T}, ..., X_{-1}.

    Raises
    ------
    HorizonTooSmall
        If B is outside [0, T) or the two forms differ by more than `tol`.
    """
    B = validate_index_set(B, "B")
    validate_single_integer(horizon, min_value=1)
    T = int(horizon)
    _check_inside(B, 0, T, "B")
    if tol is None:
        past = np.arange(-T, 0)
        return spd_solve(
            ToeplitzMatrix.from_covariance(cov, T), build_minor(cov, past, B)
        )
    forms = past_projector_forms(cov, B, T, precision)
    if forms.discrepancy > tol:
        raise HorizonTooSmall(
            f"Projector forms differ by {forms.discrepancy:.3g} at horizon {T}; "
            f"tolerance {tol:.3g} needs a larger horizon."
        )
    return forms.direct


def warped_operator_norm(D, cov: CovarianceSequence) -> float:
    """
    Operator norm of D: B_K -> O_K in the covariance geometry.

    Returns sup { sqrt(v' Gamma_O v) : v = D u, u' Gamma_B u = 1 }, the square
    root of the top generalized eigenvalue of (D' Gamma_O D, Gamma_B).

    Parameters
    ----------
    D : array-like of shape (|O|, |B|)
        Rows over (X_{-|O|}, ..., X_{-1}), columns over X_0, ..., X_{|B|-1},
        e.g. the difference of two predictor matrices.
    cov : CovarianceSequence

    Returns
    -------
    float

    Raises
    ------
    NotPositiveDefinite
        If Gamma_B is not positive definite.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2:
        raise ValueError(f"D must be a matrix. Got shape {D.shape}.")
    n_obs, n_blind = D.shape
    gamma_o = ToeplitzMatrix.from_covariance(cov, n_obs).dense
    gamma_b = ToeplitzMatrix.from_covariance(cov, n_blind).dense
    M = D.T @ gamma_o @ D
    M = 0.5 * (M + M.T)
    try:
        top = eigh(M, gamma_b, eigvals_only=True)[-1]
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefinite(
            f"Gamma_B is not positive definite: {err}"
        ) from err
    return float(np.sqrt(max(top, 0.0)))
