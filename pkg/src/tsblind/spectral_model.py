"""Stationary-process models as spectral densities and autocovariance sequences."""

from __future__ import annotations

import logging
from numbers import Integral, Real
from pathlib import Path
from typing import NamedTuple, Optional, Tuple

import numpy as np
from numpy.polynomial import chebyshev
from scipy.fft import fft, ifft
from scipy.linalg import toeplitz
from scipy.optimize import minimize_scalar
from skbase.base import BaseObject

from tsblind.exceptions import LagOutOfRange, NonPositiveSpectrum
from tsblind.utils.types import ModelNames
from tsblind.utils.validate import (
    validate_integers,
    validate_literal_type,
    validate_positive_float,
    validate_real,
    validate_real_vector,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

DEFAULT_GRID_SIZE = 4096
# Safety margin between the computed extrema and the stored bounds.
BOUND_MARGIN = 1e-9
# Number of grid local extrema polished with a bounded scalar search.
_N_REFINED_EXTREMA = 8
DEFAULT_AR1_LAGS = 4096


class TrigonometricPolynomial(BaseObject):
    """
    Real even trigonometric polynomial f(t) = a_0 + 2 sum_{k=1}^{P} a_k cos(kt).

    Used for spectral densities, their inverses, and the empirical spectral
    density, which may be negative somewhere.

    Parameters
    ----------
    coefficients : array-like of float
        One-sided Fourier coefficients a_0, ..., a_P. The two-sided sequence
        is the symmetric extension a_{-k} = a_k.
    grid_size : int, default=4096
        Number of equispaced points on [0, 2pi) used for extrema and
        quadrature. The effective grid has at least 2P + 2 points.
    """

    _tags = {"object_type": "spectral_model"}

    def __init__(
        self,
        coefficients=(1.0,),
        grid_size: Integral = DEFAULT_GRID_SIZE,
    ) -> None:
        self.coefficients = coefficients
        self.grid_size = grid_size

        super().__init__()

        validate_single_integer(grid_size, min_value=16)
        a = validate_real_vector(coefficients, "coefficients").copy()
        a.flags.writeable = False
        self._a = a
        self._extrema = {}

    @classmethod
    def from_two_sided(cls, two_sided, **kwargs):
        """
        Build from a two-sided coefficient array a_{-P}, ..., a_P.

        Raises
        ------
        ValueError
            If the array has even length or is not symmetric.
        """
        two_sided = validate_real_vector(two_sided, "two_sided")
        if two_sided.size % 2 == 0:
            raise ValueError(
                "A two-sided coefficient array must have odd length 2P + 1."
            )
        if not np.allclose(two_sided, two_sided[::-1], rtol=0, atol=1e-14):
            raise ValueError(
                "Coefficients must satisfy a_k = a_{-k} for a real even symbol."
            )
        return cls(coefficients=two_sided[two_sided.size // 2 :], **kwargs)

    @property
    def a(self) -> np.ndarray:
        """One-sided coefficients a_0..a_P as a read-only array."""
        return self._a

    @property
    def degree(self) -> int:
        """Highest lag P of the polynomial."""
        return self._a.size - 1

    def two_sided(self) -> np.ndarray:
        """Coefficients a_{-P}, ..., a_P."""
        return np.concatenate([self._a[:0:-1], self._a])

    def evaluate(self, t):
        """
        Evaluate the polynomial at arbitrary points.

        Parameters
        ----------
        t : float or array-like of float
            Evaluation points.

        Returns
        -------
        float or np.ndarray
            f(t), with the shape of `t`.
        """
        # cos(kt) = T_k(cos t)
        c = self._a.copy()
        c[1:] *= 2.0
        return chebyshev.chebval(np.cos(t), c)

    def effective_grid_size(self, n: Optional[int] = None) -> int:
        """Grid size large enough to avoid aliasing the degree-P symbol."""
        n = self.grid_size if n is None else n
        return max(int(n), 2 * self.degree + 2)

    def grid(self, n: Optional[int] = None) -> np.ndarray:
        """Equispaced grid t_j = 2 pi j / n on [0, 2pi)."""
        n = self.effective_grid_size(n)
        return 2.0 * np.pi * np.arange(n) / n

    def grid_values(self, n: Optional[int] = None) -> np.ndarray:
        """
        Values of the polynomial on the equispaced grid, computed with one FFT.

        Parameters
        ----------
        n : int, optional
            Requested grid size; defaults to `grid_size`. Raised to 2P + 2 if
            smaller.

        Returns
        -------
        np.ndarray
            f(t_j) for t_j = 2 pi j / n.
        """
        n = self.effective_grid_size(n)
        P = self.degree
        c = np.zeros(n)
        c[0] = self._a[0]
        if P > 0:
            c[1 : P + 1] = self._a[1:]
            c[n - P :] = self._a[:0:-1]
        return fft(c).real

    def _refined_extremum(self, sign: float) -> float:
        """Grid extremum polished by bounded scalar searches around local extrema."""
        values = sign * self.grid_values()
        best = float(values.min())
        if self.degree == 0:
            return sign * best

        n = values.size
        h = 2.0 * np.pi / n
        is_local = (values <= np.roll(values, 1)) & (
            values <= np.roll(values, -1)
        )
        candidates = np.flatnonzero(is_local)
        candidates = candidates[np.argsort(values[candidates], kind="stable")]
        for j in candidates[:_N_REFINED_EXTREMA]:
            t_j = 2.0 * np.pi * j / n
            res = minimize_scalar(
                lambda t: sign * float(self.evaluate(t)),
                bounds=(t_j - h, t_j + h),
                method="bounded",
                options={"xatol": 1e-12},
            )
            best = min(best, float(res.fun))
        return sign * best

    @property
    def minimum(self) -> float:
        """Minimum of f over [0, 2pi), grid search plus local refinement."""
        if "min" not in self._extrema:
            self._extrema["min"] = self._refined_extremum(1.0)
        return self._extrema["min"]

    @property
    def maximum(self) -> float:
        """Maximum of f over [0, 2pi), grid search plus local refinement."""
        if "max" not in self._extrema:
            self._extrema["max"] = self._refined_extremum(-1.0)
        return self._extrema["max"]

    def sup_norm(self) -> float:
        """Sup norm max_t |f(t)|."""
        return max(abs(self.minimum), abs(self.maximum))

    def sobolev_norm(self, order: Real) -> float:
        """
        Sobolev seminorm sum_{k != 0} |k|^{2 order} a_k^2.

        Parameters
        ----------
        order : float
            Non-negative regularity order.

        Returns
        -------
        float
            The two-sided weighted sum of squared coefficients.
        """
        order = validate_real(order, "order", min_value=0.0)
        k = np.arange(1, self.degree + 1, dtype=np.float64)
        return float(2.0 * np.sum(k ** (2.0 * order) * self._a[1:] ** 2))

    def shifted(self, alpha: Real) -> TrigonometricPolynomial:
        """Return f + alpha as a new TrigonometricPolynomial."""
        a = self._a.copy()
        a[0] += float(alpha)
        return TrigonometricPolynomial(coefficients=a, grid_size=self.grid_size)

    def difference(self, other: TrigonometricPolynomial) -> TrigonometricPolynomial:
        """Return self - other, padding the shorter coefficient array with zeros."""
        P = max(self.degree, other.degree)
        a = np.zeros(P + 1)
        a[: self.degree + 1] += self._a
        a[: other.degree + 1] -= other.a
        return TrigonometricPolynomial(
            coefficients=a, grid_size=max(self.grid_size, other.grid_size)
        )

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"coefficients": (1.0,)},
            {"coefficients": (1.0, -0.8), "grid_size": 512},
        ]


def _validate_bounds(bounds) -> Tuple[float, float]:
    if len(bounds) != 2:
        raise ValueError(f"bounds must be a pair (m, m'). Got {bounds!r}.")
    low = validate_positive_float(bounds[0], "bounds[0]")
    high = validate_real(bounds[1], "bounds[1]", min_value=low)
    return low, high


class SpectralDensity(TrigonometricPolynomial):
    """
    Spectral density f of a stationary process, bounded away from zero.

    Unless `bounds` is given, the bounds are computed: `lower_bound` is the
    refined grid minimum minus a 1e-9 margin and `upper_bound` the refined grid
    maximum plus the same margin.

    Parameters
    ----------
    coefficients : array-like of float
        One-sided Fourier coefficients a_0, ..., a_P (a_k = r_k).
    sobolev_index : float, default=1.0
        Declared Sobolev regularity s >= 1. Finitely supported symbols lie in
        every Sobolev class; s only parameterises the window rule.
    grid_size : int, default=4096
        Grid size for extrema and quadrature.
    bounds : tuple of float, optional
        Known bounds (m, m') with 0 < m <= m'. When given they are used as
        is and the coefficients are not checked for positivity, as for a
        truncated series of a positive function.

    Raises
    ------
    NonPositiveSpectrum
        If the refined minimum of f is not positive.
    """

    def __init__(
        self,
        coefficients=(1.0,),
        sobolev_index: Real = 1.0,
        grid_size: Integral = DEFAULT_GRID_SIZE,
        bounds: Optional[Tuple[Real, Real]] = None,
    ) -> None:
        self.sobolev_index = sobolev_index
        self.bounds = bounds

        super().__init__(coefficients=coefficients, grid_size=grid_size)

        validate_real(sobolev_index, "sobolev_index", min_value=1.0)
        if bounds is not None:
            self._lower_bound, self._upper_bound = _validate_bounds(bounds)
            return
        f_min = self.minimum
        if f_min <= 0:
            raise NonPositiveSpectrum(
                f"Spectral density must be positive; its minimum is {f_min:.6g}."
            )
        self._lower_bound = f_min - min(BOUND_MARGIN, 0.5 * f_min)
        self._upper_bound = self.maximum + BOUND_MARGIN

    @property
    def lower_bound(self) -> float:
        """Lower spectral bound m."""
        return self._lower_bound

    @property
    def upper_bound(self) -> float:
        """Upper spectral bound m'."""
        return self._upper_bound

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"coefficients": (1.0,)},
            {"coefficients": (1.25, 0.5), "sobolev_index": 2.0},
            {"coefficients": (2.0, 0.5, 0.25), "grid_size": 1024},
            {"coefficients": (1.25, 0.5), "bounds": (0.2, 2.5)},
        ]


class CovarianceSequence(BaseObject):
    """
    Autocovariance sequence r_0, ..., r_P of a stationary process.

    Lags beyond P are zero when `tail_bound` is zero. Otherwise the sequence
    is a truncation and `tail_bound` bounds sum_{|k| > P} r_k^2; requesting a
    lag beyond P then raises LagOutOfRange.

    Parameters
    ----------
    values : array-like of float
        Covariances at lags 0..P. Requires r_0 > 0 and |r_k| <= r_0.
    tail_bound : float, default=0.0
        Bound on the squared mass of the dropped lags.
    """

    _tags = {"object_type": "spectral_model"}

    def __init__(self, values=(1.0,), tail_bound: Real = 0.0) -> None:
        self.values = values
        self.tail_bound = tail_bound

        super().__init__()

        r = validate_real_vector(values, "values").copy()
        validate_real(tail_bound, "tail_bound", min_value=0.0)
        if r[0] <= 0:
            raise ValueError(f"r_0 must be positive. Got {r[0]}.")
        if np.any(np.abs(r[1:]) > r[0] * (1.0 + 1e-12)):
            raise ValueError(
                "Covariances must satisfy |r_k| <= r_0 for a stationary process."
            )
        r.flags.writeable = False
        self._r = r

    @property
    def r(self) -> np.ndarray:
        """Covariances r_0..r_P as a read-only array."""
        return self._r

    @property
    def max_lag(self) -> int:
        """Largest stored lag P."""
        return self._r.size - 1

    @property
    def variance(self) -> float:
        """r_0."""
        return float(self._r[0])

    @property
    def is_finitely_supported(self) -> bool:
        return self.tail_bound == 0

    def lags(self, k) -> np.ndarray:
        """
        Covariances at the given lags (negative lags use r_{-k} = r_k).

        Parameters
        ----------
        k : int or array-like of int
            Lags.

        Returns
        -------
        np.ndarray
            r_{|k|}, same shape as `k`.

        Raises
        ------
        LagOutOfRange
            If some |k| > P and the sequence has a nonzero tail.
        """
        k = np.abs(np.asarray(k, dtype=np.int64))
        beyond = k > self.max_lag
        if np.any(beyond):
            if not self.is_finitely_supported:
                raise LagOutOfRange(
                    f"Lag {int(k.max())} exceeds the stored support "
                    f"0..{self.max_lag} of a sequence with tail_bound "
                    f"{self.tail_bound:.3g}."
                )
            out = np.zeros(k.shape)
            out[~beyond] = self._r[k[~beyond]]
            return out
        return self._r[k]

    def lag(self, k: Integral) -> float:
        """Covariance at a single lag."""
        return float(self.lags(k))

    def first_row(self, n: Integral) -> np.ndarray:
        """(r_0, ..., r_{n-1})."""
        validate_single_integer(n, min_value=1)
        return self.lags(np.arange(n))

    def toeplitz(self, n: Integral) -> np.ndarray:
        """Dense n x n covariance matrix of n consecutive samples."""
        return toeplitz(self.first_row(n))

    def is_positive_semidefinite(self, window: Integral, tol: float = 1e-10) -> bool:
        """Check the leading window x window Toeplitz matrix is PSD."""
        eigenvalues = np.linalg.eigvalsh(self.toeplitz(window))
        return bool(eigenvalues.min() >= -tol * self.variance)

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"values": (1.0,)},
            {"values": (1.25, 0.5)},
            {"values": (4.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0), "tail_bound": 0.1},
        ]


def covariance_to_spectrum(
    cov: CovarianceSequence,
    sobolev_index: Real = 1.0,
    grid_size: Integral = DEFAULT_GRID_SIZE,
) -> SpectralDensity:
    """
    Spectral density with Fourier coefficients a_k = r_k.

    Parameters
    ----------
    cov : CovarianceSequence
        The autocovariances.
    sobolev_index : float, default=1.0
        Declared Sobolev index s.
    grid_size : int, default=4096
        Grid size for the bounds.

    Returns
    -------
    SpectralDensity

    Raises
    ------
    NonPositiveSpectrum
        If the symbol is not positive on the grid.
    """
    return SpectralDensity(
        coefficients=cov.r, sobolev_index=sobolev_index, grid_size=grid_size
    )


def spectrum_to_covariance(
    f: TrigonometricPolynomial, max_lag: Integral
) -> CovarianceSequence:
    """
    Autocovariances r_k = a_k for k <= min(max_lag, P).

    Coefficients beyond `max_lag` are dropped and their squared mass goes
    into `tail_bound`.
    """
    validate_integers(max_lag, min_value=0)
    keep = min(int(max_lag), f.degree)
    dropped = f.a[keep + 1 :]
    return CovarianceSequence(
        values=f.a[: keep + 1].copy(),
        tail_bound=float(2.0 * np.sum(dropped**2)),
    )


def sobolev_norm(f: TrigonometricPolynomial, order: Real) -> float:
    """sum_{k != 0} |k|^{2 order} a_k^2 of a symbol."""
    return f.sobolev_norm(order)


def inverse_spectrum(f: SpectralDensity, num_coeffs: Integral) -> SpectralDensity:
    """
    Fourier coefficients of 1/f, truncated at lag `num_coeffs`.

    The coefficients are computed by FFT quadrature on at least
    max(4096, 8 * num_coeffs) grid points. The bounds are set to (1/m', 1/m)
    from f; the truncated series itself need not be positive.

    Parameters
    ----------
    f : SpectralDensity
        A positive symbol.
    num_coeffs : int
        Highest lag kept.

    Returns
    -------
    SpectralDensity
        The truncated inverse symbol, coefficients for lags 0..num_coeffs.
    """
    validate_integers(num_coeffs, min_value=0)
    n = max(DEFAULT_GRID_SIZE, 8 * int(num_coeffs), 2 * f.degree + 2)
    values = f.grid_values(n)
    if values.min() <= 0:
        raise NonPositiveSpectrum(
            "Cannot invert a spectral density that is not positive on the grid."
        )
    coefficients = ifft(1.0 / values).real[: int(num_coeffs) + 1]
    logger.debug(
        f"inverse_spectrum: {num_coeffs + 1} coefficients from a {n}-point grid"
    )
    return SpectralDensity(
        coefficients=coefficients,
        sobolev_index=f.sobolev_index,
        grid_size=f.grid_size,
        bounds=(1.0 / f.upper_bound, 1.0 / f.lower_bound),
    )


def white_noise(sigma2: Real = 1.0) -> CovarianceSequence:
    """Covariances (sigma2, 0, ...)."""
    sigma2 = validate_positive_float(sigma2, "sigma2")
    return CovarianceSequence(values=(sigma2,))


def ar1_covariance(
    phi: Real, sigma2: Real = 1.0, max_lag: Integral = DEFAULT_AR1_LAGS
) -> CovarianceSequence:
    """
    AR(1) covariances r_k = sigma2 phi^k / (1 - phi^2), truncated at `max_lag`.

    The exact tail mass 2 r_0^2 phi^{2(P+1)} / (1 - phi^2) is stored as
    `tail_bound`.

    Parameters
    ----------
    phi : float
        Autoregressive coefficient, |phi| < 1.
    sigma2 : float, default=1.0
        Innovation variance.
    max_lag : int, default=4096
        Number of stored lags.

    Returns
    -------
    CovarianceSequence
    """
    phi = validate_real(phi, "phi")
    if not abs(phi) < 1:
        raise ValueError(f"AR(1) requires |phi| < 1. Got {phi}.")
    sigma2 = validate_positive_float(sigma2, "sigma2")
    validate_integers(max_lag, min_value=0)
    r0 = sigma2 / (1.0 - phi**2)
    r = r0 * phi ** np.arange(int(max_lag) + 1, dtype=np.float64)
    tail = 2.0 * r0**2 * phi ** (2 * (int(max_lag) + 1)) / (1.0 - phi**2)
    return CovarianceSequence(values=r, tail_bound=float(tail))


def ma1_covariance(theta: Real, sigma2: Real = 1.0) -> CovarianceSequence:
    """MA(1) covariances (sigma2 (1 + theta^2), sigma2 theta)."""
    theta = validate_real(theta, "theta")
    sigma2 = validate_positive_float(sigma2, "sigma2")
    return CovarianceSequence(
        values=(sigma2 * (1.0 + theta**2), sigma2 * theta)
    )


class ParsedModel(NamedTuple):
    """A model description: the covariance and the declared Sobolev index."""

    covariance: CovarianceSequence
    sobolev_index: Optional[float]
    description: str


_MODEL_KEYS = {
    "white": {"sigma2"},
    "ar1": {"phi", "sigma2", "lags"},
    "ma1": {"theta", "sigma2"},
}


def _parse_tokens(text: str) -> dict:
    tokens = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in line.replace(",", " ").split():
            key, sep, value = token.partition("=")
            if not sep or not key or not value:
                raise ValueError(f"Malformed model token '{token}'; expected key=value.")
            key = key.strip().lower()
            if key in tokens:
                raise ValueError(f"Duplicate model key '{key}'.")
            tokens[key] = value.strip()
    return tokens


def _to_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"Model key '{key}' needs a number. Got '{value}'.") from None


def parse_model(text: str) -> ParsedModel:
    """
    Parse a plain-text model description.

    Tokens are whitespace separated ``key=value`` pairs; ``#`` starts a
    comment. Either a named model::

        model=white sigma2=1
        model=ar1 phi=0.6 sigma2=1 lags=4096
        model=ma1 theta=0.5 sigma2=1

    or explicit covariances ``r_0=1.25 r_1=0.5`` (unlisted lags up to the
    largest one are zero). ``s=2`` declares the Sobolev index.

    Parameters
    ----------
    text : str
        The model description.

    Returns
    -------
    ParsedModel
    """
    tokens = _parse_tokens(text)
    if not tokens:
        raise ValueError("Empty model description.")

    s = tokens.pop("s", None)
    s = None if s is None else _to_float("s", s)
    if s is not None and s < 1:
        raise ValueError(f"Sobolev index s must be at least 1. Got {s}.")

    if "model" in tokens:
        name = tokens.pop("model").lower()
        validate_literal_type(name, ModelNames)
        unknown = set(tokens) - _MODEL_KEYS[name]
        if unknown:
            raise ValueError(f"Unknown keys for model={name}: {sorted(unknown)}.")
        params = {k: _to_float(k, v) for k, v in tokens.items()}
        sigma2 = params.get("sigma2", 1.0)
        if name == "white":
            cov = white_noise(sigma2)
        elif name == "ar1":
            if "phi" not in params:
                raise ValueError("model=ar1 requires phi=<value>.")
            lags = params.get("lags", DEFAULT_AR1_LAGS)
            if lags != int(lags):
                raise ValueError(f"lags must be an integer. Got {lags}.")
            cov = ar1_covariance(params["phi"], sigma2, int(lags))
        else:
            if "theta" not in params:
                raise ValueError("model=ma1 requires theta=<value>.")
            cov = ma1_covariance(params["theta"], sigma2)
        description = " ".join(
            [f"model={name}"] + [f"{k}={v:g}" for k, v in sorted(params.items())]
        )
    else:
        lags = {}
        for key, value in tokens.items():
            if not key.startswith("r_") or not key[2:].isdigit():
                raise ValueError(
                    f"Unknown model key '{key}'. Expected model=... or r_<lag>=..."
                )
            lags[int(key[2:])] = _to_float(key, value)
        if 0 not in lags:
            raise ValueError("Explicit covariances require r_0.")
        values = np.zeros(max(lags) + 1)
        for k, v in lags.items():
            values[k] = v
        cov = CovarianceSequence(values=values)
        description = " ".join(f"r_{k}={values[k]:g}" for k in range(values.size))

    if s is not None:
        description += f" s={s:g}"
    logger.debug(f"parsed model: {description}")
    return ParsedModel(covariance=cov, sobolev_index=s, description=description)


def load_model(source) -> ParsedModel:
    """
    Parse a model from a file path or from the description string itself.

    Parameters
    ----------
    source : str or Path
        Path to a model file, or a model description.

    Returns
    -------
    ParsedModel
    """
    if isinstance(source, Path):
        return parse_model(source.read_text())
    try:
        path = Path(source)
        is_file = path.is_file()
    except (OSError, ValueError):
        is_file = False
    if is_file:
        return parse_model(path.read_text())
    return parse_model(str(source))
