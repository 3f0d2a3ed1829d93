"""
Monte Carlo experiments on the blind predictor.

Every experiment is driven by an `ExperimentConfig`. Replication ``i`` at
path length ``N`` draws from ``replication_rng(seed, N, i)`` and results are
reduced in replication order, so reports are bitwise reproducible for any
``n_jobs``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from numbers import Integral, Real
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.linalg import eigh, eigvalsh
from scipy.stats import linregress, norm
from skbase.base import BaseObject

from tsblind.blind_predictor import (
    BlindPredictor,
    choose_window,
    model_theory_constants,
    risk_bound,
    theoretical_rate_exponent,
)
from tsblind.covariance_estimation import (
    ObservedPath,
    concentration_bound,
    estimate_covariance,
    spectral_error_bound,
    spectral_sup_error,
    sup_deviation,
)
from tsblind.exceptions import VerificationError, WindowTooLarge
from tsblind.gaussian_simulator import make_sampler
from tsblind.spectral_model import (
    CovarianceSequence,
    ParsedModel,
    SpectralDensity,
    covariance_to_spectrum,
    load_model,
)
from tsblind.toeplitz_algebra import (
    error_operator_duality,
    oracle_predictor,
    projector_infinite_past,
    schur_complement,
    spd_inverse,
    warped_operator_norm,
)
from tsblind.utils.odds_and_ends import replication_rng
from tsblind.utils.serialization import tool_version, write_frame
from tsblind.utils.types import SimulationMethods, SolverTypes
from tsblind.utils.validate import (
    validate_integers,
    validate_literal_type,
    validate_positive_float,
    validate_real,
    validate_seed,
    validate_single_integer,
)

logger = logging.getLogger("tsblind")

# Two-sided 95% normal quantile for Monte Carlo half-widths.
Z_95 = float(norm.ppf(0.975))
MIN_ORACLE_PAST = 512
MAX_SCHUR_SIZE = 64
EIGENVALUE_SLACK = 1e-9
EXCEEDANCE_SLACK = 0.05
LEMMA_SLACK = 1e-12


class ExperimentConfig(BaseObject):
    """
    Configuration of a Monte Carlo experiment.

    Parameters
    ----------
    model : str, Path, ParsedModel or CovarianceSequence, default="model=ma1 theta=0.5"
        Model description, path to a model file, or the covariance itself.
    n_grid : int or sequence of int, default=(4096,)
        Path lengths N.
    window : int, optional
        Fixed window K. If None, K(N) follows the rate-optimal rule.
    sobolev_index : float, optional
        s for the window rule. Defaults to the model's declared s, else 1.
    n_replications : int, default=100
        Replications R >= 2 per path length.
    seed : int, default=0
        64-bit master seed.
    oracle_past : int, optional
        Past length L of the oracle; defaults to max(512, 4 max K).
    lower_bound : float, "estimate" or None, default=None
        m given to the predictor. None uses the model's spectral lower bound.
    target : int, default=0
        Index j in B_K of the pointwise risk.
    concentration_x : float, default=log 2
        Level x of the concentration bound.
    n_jobs : int, default=1
        joblib workers over replications; does not change results.
    debug_oracle : bool, default=False
        Replace the blind predictor by the known-covariance K-window predictor.
    output : str or Path, optional
        CSV destination; stdout when None.
    method : {"auto", "circulant-embedding", "dense-cholesky"}, default="auto"
        Path sampler.
    solver : {"cholesky", "levinson"}, default="cholesky"
        Solver of the predictor.
    """

    _tags = {"object_type": "config"}

    def __init__(
        self,
        model="model=ma1 theta=0.5",
        n_grid=(4096,),
        window: Optional[Integral] = None,
        sobolev_index: Optional[Real] = None,
        n_replications: Integral = 100,
        seed: Integral = 0,
        oracle_past: Optional[Integral] = None,
        lower_bound=None,
        target: Integral = 0,
        concentration_x: Real = float(np.log(2.0)),
        n_jobs: Optional[Integral] = 1,
        debug_oracle: bool = False,
        output=None,
        method: SimulationMethods = "auto",
        solver: SolverTypes = "cholesky",
    ) -> None:
        self.model = model
        self.n_grid = n_grid
        self.window = window
        self.sobolev_index = sobolev_index
        self.n_replications = n_replications
        self.seed = seed
        self.oracle_past = oracle_past
        self.lower_bound = lower_bound
        self.target = target
        self.concentration_x = concentration_x
        self.n_jobs = n_jobs
        self.debug_oracle = debug_oracle
        self.output = output
        self.method = method
        self.solver = solver

        super().__init__()

        self._check_consistency()

    @property
    def model(self):
        """Getter for model."""
        return self._model

    @model.setter
    def model(self, value) -> None:
        """
        Setter for model. Parses descriptions and files on assignment.

        Parameters
        ----------
        value : str, Path, ParsedModel or CovarianceSequence
        """
        if isinstance(value, CovarianceSequence):
            parsed = ParsedModel(
                covariance=value,
                sobolev_index=None,
                description=" ".join(
                    f"r_{k}={v:g}" for k, v in enumerate(value.r[:8])
                )
                + (" ..." if value.max_lag >= 8 else ""),
            )
        elif isinstance(value, ParsedModel):
            parsed = value
        elif isinstance(value, (str, Path)):
            parsed = load_model(value)
        else:
            raise TypeError(
                "model must be a description, a path, a ParsedModel or a CovarianceSequence."
            )
        self._parsed_model = parsed
        self._model = value
        self.__dict__.pop("spectral_density", None)

    @property
    def n_grid(self):
        """Getter for n_grid."""
        return self._n_grid

    @n_grid.setter
    def n_grid(self, value) -> None:
        """Setter for n_grid. Accepts one length or a sequence of lengths >= 3."""
        if isinstance(value, Integral):
            value = (value,)
        value = tuple(value)
        validate_integers(list(value), min_value=3)
        if len(set(value)) != len(value):
            raise ValueError(f"n_grid must not repeat path lengths. Got {value}.")
        self._n_grid = tuple(int(n) for n in value)

    @property
    def window(self):
        """Getter for window."""
        return self._window

    @window.setter
    def window(self, value) -> None:
        """Setter for window (None selects the rate-optimal rule)."""
        if value is not None:
            validate_single_integer(value, min_value=1)
            value = int(value)
        self._window = value

    @property
    def sobolev_index(self):
        """Getter for sobolev_index."""
        return self._sobolev_index

    @sobolev_index.setter
    def sobolev_index(self, value) -> None:
        """Setter for sobolev_index."""
        if value is not None:
            value = validate_real(value, "sobolev_index", min_value=1.0)
        self._sobolev_index = value
        self.__dict__.pop("spectral_density", None)

    @property
    def n_replications(self):
        """Getter for n_replications."""
        return self._n_replications

    @n_replications.setter
    def n_replications(self, value) -> None:
        """Setter for n_replications, at least 2."""
        validate_single_integer(value, min_value=2)
        self._n_replications = int(value)

    @property
    def seed(self):
        """Getter for seed."""
        return self._seed

    @seed.setter
    def seed(self, value) -> None:
        """Setter for seed, 0 <= seed < 2**64."""
        validate_seed(value)
        self._seed = int(value)

    @property
    def oracle_past(self):
        """Getter for oracle_past."""
        return self._oracle_past

    @oracle_past.setter
    def oracle_past(self, value) -> None:
        """Setter for oracle_past."""
        if value is not None:
            validate_single_integer(value, min_value=1)
            value = int(value)
        self._oracle_past = value

    @property
    def lower_bound(self):
        """Getter for lower_bound."""
        return self._lower_bound

    @lower_bound.setter
    def lower_bound(self, value) -> None:
        """Setter for lower_bound: None, a positive float or "estimate"."""
        if isinstance(value, str):
            validate_literal_type(value, ["estimate"])
            value = value.lower()
        elif value is not None:
            value = validate_positive_float(value, "lower_bound")
        self._lower_bound = value

    @property
    def target(self):
        """Getter for target."""
        return self._target

    @target.setter
    def target(self, value) -> None:
        """Setter for target."""
        validate_single_integer(value, min_value=0)
        self._target = int(value)

    @property
    def concentration_x(self):
        """Getter for concentration_x."""
        return self._concentration_x

    @concentration_x.setter
    def concentration_x(self, value) -> None:
        """Setter for concentration_x."""
        self._concentration_x = validate_positive_float(value, "concentration_x")

    @property
    def n_jobs(self):
        """Getter for n_jobs."""
        return self._n_jobs

    @n_jobs.setter
    def n_jobs(self, value) -> None:
        """Setter for n_jobs; any nonzero integer, as in joblib."""
        if value is not None:
            if not isinstance(value, Integral) or value == 0:
                raise ValueError(f"n_jobs must be a nonzero integer. Got {value}.")
            value = int(value)
        self._n_jobs = value

    @property
    def debug_oracle(self):
        """Getter for debug_oracle."""
        return self._debug_oracle

    @debug_oracle.setter
    def debug_oracle(self, value) -> None:
        """Setter for debug_oracle."""
        if not isinstance(value, (bool, np.bool_)):
            raise TypeError(f"debug_oracle must be a boolean. Got {value!r}.")
        self._debug_oracle = bool(value)

    @property
    def output(self):
        """Getter for output."""
        return self._output

    @output.setter
    def output(self, value) -> None:
        """Setter for output."""
        if value is not None and not isinstance(value, (str, Path)):
            raise TypeError(f"output must be a path. Got {value!r}.")
        self._output = value

    @property
    def method(self):
        """Getter for method."""
        return self._method

    @method.setter
    def method(self, value) -> None:
        """Setter for method."""
        validate_literal_type(value, SimulationMethods)
        self._method = value.lower()

    @property
    def solver(self):
        """Getter for solver."""
        return self._solver

    @solver.setter
    def solver(self, value) -> None:
        """Setter for solver."""
        validate_literal_type(value, SolverTypes)
        self._solver = value.lower()

    # derived quantities

    @property
    def covariance(self) -> CovarianceSequence:
        return self._parsed_model.covariance

    @property
    def model_description(self) -> str:
        return self._parsed_model.description

    @property
    def effective_sobolev_index(self) -> float:
        if self.sobolev_index is not None:
            return float(self.sobolev_index)
        if self._parsed_model.sobolev_index is not None:
            return float(self._parsed_model.sobolev_index)
        return 1.0

    @cached_property
    def spectral_density(self) -> SpectralDensity:
        return covariance_to_spectrum(
            self.covariance, sobolev_index=self.effective_sobolev_index
        )

    def window_for(self, n_samples: Integral) -> int:
        """K(N): the fixed window or the rate-optimal rule."""
        if self.window is not None:
            return self.window
        return choose_window(int(n_samples), self.effective_sobolev_index)

    def windows(self) -> List[int]:
        return [self.window_for(n) for n in self.n_grid]

    @property
    def effective_oracle_past(self) -> int:
        if self.oracle_past is not None:
            return self.oracle_past
        return max(MIN_ORACLE_PAST, 4 * max(self.windows()))

    def predictor_lower_bound(self):
        """The m handed to the predictor."""
        if self.lower_bound is None:
            return self.spectral_density.lower_bound
        return self.lower_bound

    def _check_consistency(self) -> None:
        windows = self.windows()
        for n, k in zip(self.n_grid, windows):
            if 2 * k >= n:
                raise WindowTooLarge(
                    f"Window {k} needs 2K < N; got N = {n}."
                )
        if self.target >= min(windows):
            raise ValueError(
                f"target {self.target} must lie in the blind block 0..{min(windows) - 1}."
            )
        if self.effective_oracle_past < 4 * max(windows):
            raise ValueError(
                f"oracle_past must be at least 4 max K = {4 * max(windows)}. "
                f"Got {self.effective_oracle_past}."
            )

    def describe(self) -> dict:
        """Configuration echo written into every report."""
        window_rule = (
            f"fixed k={self.window}"
            if self.window is not None
            else f"s={self.effective_sobolev_index:g}"
        )
        return {
            "tool": "tsblind",
            "version": tool_version(),
            "model": self.model_description,
            "n_grid": " ".join(str(n) for n in self.n_grid),
            "window_rule": window_rule,
            "n_replications": self.n_replications,
            "seed": self.seed,
            "oracle_past": self.effective_oracle_past,
            "lower_bound": (
                "model" if self.lower_bound is None else self.lower_bound
            ),
            "target": self.target,
            "concentration_x": self.concentration_x,
            "method": self.method,
            "solver": self.solver,
            "debug_oracle": self.debug_oracle,
        }

    @classmethod
    def get_test_params(cls, parameter_set="default"):
        """Return testing parameter settings for the estimator."""
        return [
            {"model": "model=white", "n_grid": (64,), "window": 2, "n_replications": 4},
            {
                "model": "model=ar1 phi=0.6 lags=256",
                "n_grid": (256, 512),
                "sobolev_index": 2.0,
                "n_replications": 3,
                "oracle_past": 64,
            },
        ]


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean with a normal-approximation 95% half-width."""

    mean: float
    half_width: float
    n: int

    @classmethod
    def from_samples(cls, values) -> MonteCarloEstimate:
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n < 2:
            raise ValueError("A Monte Carlo estimate needs at least 2 samples.")
        sd = float(np.std(values, ddof=1))
        return cls(float(np.mean(values)), Z_95 * sd / np.sqrt(n), int(n))

    @classmethod
    def exact(cls, value: float) -> MonteCarloEstimate:
        return cls(float(value), 0.0, 0)

    @property
    def sd_of_mean(self) -> float:
        """Standard error of the mean."""
        return self.half_width / Z_95


@dataclass
class _GridTask:
    sampler: object
    n_samples: int
    window: int
    oracle_past: int
    lower_bound: object
    solver: str
    oracle_window: np.ndarray
    oracle_long: np.ndarray
    covariance: CovarianceSequence
    seed: int
    debug_oracle: bool


@dataclass(frozen=True)
class _Replication:
    d: np.ndarray
    e: np.ndarray
    alpha_hat: float
    sup_deviation: float
    min_eigenvalue: float
    lemma_holds: bool
    lower_bound: float
    lower_bound_estimated: bool


def _replicate(task: _GridTask, i: int) -> _Replication:
    rng = replication_rng(task.seed, task.n_samples, i)
    x = task.sampler.draw(rng)
    observed = ObservedPath(x[-task.n_samples :])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        predictor = BlindPredictor(
            window=task.window, lower_bound=task.lower_bound, solver=task.solver
        ).fit(observed)
    window_values = x[-task.window :]
    y_window = window_values @ task.oracle_window
    y_oracle = x[-task.oracle_past :] @ task.oracle_long
    y_hat = y_window if task.debug_oracle else predictor.predict(window_values)

    est = predictor.covariance_
    gamma_tilde = predictor.regularized_.toeplitz()
    lemma_holds = spectral_sup_error(est, task.covariance) <= (
        spectral_error_bound(est, task.covariance) + LEMMA_SLACK
    )
    return _Replication(
        d=y_hat - y_oracle,
        e=y_hat - y_window,
        alpha_hat=predictor.alpha_hat_,
        sup_deviation=sup_deviation(est, task.covariance),
        min_eigenvalue=float(eigvalsh(gamma_tilde.dense)[0]),
        lemma_holds=bool(lemma_holds),
        lower_bound=predictor.lower_bound_,
        lower_bound_estimated=predictor.lower_bound_estimated_,
    )


@dataclass
class GridPointResult:
    """Per-replication outcomes at one path length."""

    n_samples: int
    window: int
    oracle_past: int
    d: np.ndarray
    e: np.ndarray
    alpha_hat: np.ndarray
    sup_deviation: np.ndarray
    min_eigenvalue: np.ndarray
    lemma_holds: np.ndarray
    lower_bound: np.ndarray
    lower_bound_estimated: bool
    oracle_window: np.ndarray = field(repr=False)
    oracle_long: np.ndarray = field(repr=False)


def _oracle_coefficients(cov: CovarianceSequence, window: int, oracle_past: int):
    oracle_window = oracle_predictor(cov, window).matrix
    oracle_long = projector_infinite_past(cov, np.arange(window), oracle_past)
    return oracle_window, oracle_long


def run_grid_point(config: ExperimentConfig, n_samples: Integral) -> GridPointResult:
    """Run all replications at one path length."""
    N = int(n_samples)
    K = config.window_for(N)
    L = config.effective_oracle_past
    cov = config.covariance
    oracle_window, oracle_long = _oracle_coefficients(cov, K, L)
    task = _GridTask(
        sampler=make_sampler(cov, N + L, config.method),
        n_samples=N,
        window=K,
        oracle_past=L,
        lower_bound=config.predictor_lower_bound(),
        solver=config.solver,
        oracle_window=oracle_window,
        oracle_long=oracle_long,
        covariance=cov,
        seed=config.seed,
        debug_oracle=config.debug_oracle,
    )
    logger.info(f"N = {N}: K = {K}, L = {L}, {config.n_replications} replications")
    reps = Parallel(n_jobs=config.n_jobs)(
        delayed(_replicate)(task, i) for i in range(config.n_replications)
    )
    return GridPointResult(
        n_samples=N,
        window=K,
        oracle_past=L,
        d=np.vstack([r.d for r in reps]),
        e=np.vstack([r.e for r in reps]),
        alpha_hat=np.array([r.alpha_hat for r in reps]),
        sup_deviation=np.array([r.sup_deviation for r in reps]),
        min_eigenvalue=np.array([r.min_eigenvalue for r in reps]),
        lemma_holds=np.array([r.lemma_holds for r in reps]),
        lower_bound=np.array([r.lower_bound for r in reps]),
        lower_bound_estimated=any(r.lower_bound_estimated for r in reps),
        oracle_window=oracle_window,
        oracle_long=oracle_long,
    )


def _top_generalized(second_moment: np.ndarray, gamma_b: np.ndarray):
    values, vectors = eigh(0.5 * (second_moment + second_moment.T), gamma_b)
    return max(float(values[-1]), 0.0), vectors[:, -1]


def pointwise_estimate(result: GridPointResult, target: Integral = 0) -> MonteCarloEstimate:
    """Mean of (Y_hat_j - Y_j^oracle)^2 over replications."""
    validate_single_integer(target, min_value=0, max_value=result.window - 1)
    return MonteCarloEstimate.from_samples(result.d[:, int(target)] ** 2)


def global_estimate(
    result: GridPointResult, cov: CovarianceSequence, errors: Optional[np.ndarray] = None
) -> MonteCarloEstimate:
    """
    Largest generalized eigenvalue of (E[d d'], Gamma_B).

    The half-width is that of the per-replication values (v' d)^2 for the
    top generalized eigenvector v, normalised by v' Gamma_B v = 1.
    """
    d = result.d if errors is None else errors
    gamma_b = cov.toeplitz(result.window)
    second_moment = d.T @ d / d.shape[0]
    top, v = _top_generalized(second_moment, gamma_b)
    projected = MonteCarloEstimate.from_samples((d @ v) ** 2)
    return MonteCarloEstimate(top, projected.half_width, projected.n)


def bias_squared(
    cov: CovarianceSequence,
    oracle_window: np.ndarray,
    oracle_long: np.ndarray,
    target: Optional[Integral] = None,
) -> float:
    """
    Squared bias of the K-window oracle against the L-past oracle.

    With `target` j, returns (c_K - c_L)' Gamma_L (c_K - c_L) for column j;
    otherwise the supremum over unit-variance targets in B_K.
    """
    L, K = oracle_long.shape
    D = -oracle_long.copy()
    D[L - K :, :] += oracle_window
    if target is None:
        return warped_operator_norm(D, cov) ** 2
    diff = D[:, int(target)]
    gamma_l = cov.toeplitz(L)
    return max(float(diff @ gamma_l @ diff), 0.0)


@dataclass(frozen=True)
class BiasVarianceSplit:
    """Deterministic squared bias, Monte Carlo variance and the risk they should add up to."""

    n_samples: int
    window: int
    bias_squared: float
    variance: MonteCarloEstimate
    pointwise: MonteCarloEstimate

    @property
    def discrepancy(self) -> float:
        return abs(self.bias_squared + self.variance.mean - self.pointwise.mean)

    @property
    def combined_half_width(self) -> float:
        return float(np.hypot(self.variance.half_width, self.pointwise.half_width))


def _split(result: GridPointResult, cov: CovarianceSequence, target: int) -> BiasVarianceSplit:
    return BiasVarianceSplit(
        n_samples=result.n_samples,
        window=result.window,
        bias_squared=bias_squared(cov, result.oracle_window, result.oracle_long, target),
        variance=MonteCarloEstimate.from_samples(result.e[:, target] ** 2),
        pointwise=pointwise_estimate(result, target),
    )


@dataclass
class Report:
    """A CSV table with metadata lines."""

    frame: pd.DataFrame
    metadata: dict

    def to_csv(self, path=None) -> None:
        write_frame(self.frame, path, metadata=self.metadata)


@dataclass
class RiskReport(Report):
    """
    Per path length: risks, bias-variance split and diagnostics, each Monte
    Carlo quantity with its 95% half-width.
    """

    results: List[GridPointResult] = field(default_factory=list, repr=False)

    @property
    def eigenvalue_floor_holds(self) -> bool:
        return bool(
            np.all(
                self.frame["min_regularized_eigenvalue"]
                >= self.frame["lower_bound"] / 4.0 - EIGENVALUE_SLACK
            )
        )

    @property
    def spectral_lemma_holds(self) -> bool:
        return bool(np.all(self.frame["lemma_bound_fraction"] == 1.0))

    @property
    def passed(self) -> bool:
        return self.eigenvalue_floor_holds and self.spectral_lemma_holds

    def raise_for_failure(self) -> None:
        if not self.eigenvalue_floor_holds:
            raise VerificationError(
                "The regularized covariance fell below the m / 4 eigenvalue floor."
            )
        if not self.spectral_lemma_holds:
            raise VerificationError(
                "The empirical spectral density exceeded its deviation bound."
            )


def _grid_results(config: ExperimentConfig) -> List[GridPointResult]:
    return [run_grid_point(config, n) for n in config.n_grid]


def _theorem_bound(config: ExperimentConfig, n_samples: int, window: int) -> float:
    if window < 2:
        return float("nan")
    consts = model_theory_constants(config.covariance, config.effective_sobolev_index)
    return risk_bound(n_samples, window, consts, config.effective_sobolev_index)


def run_risk_experiment(config: ExperimentConfig) -> RiskReport:
    """
    Estimate pointwise and global risk, the bias-variance split and the
    estimator diagnostics at every path length of the grid.

    Returns
    -------
    RiskReport
    """
    cov = config.covariance
    r0 = cov.variance
    consts = model_theory_constants(cov, config.effective_sobolev_index)
    rows = []
    results = _grid_results(config)
    for result in results:
        K = result.window
        target = config.target
        pointwise = pointwise_estimate(result, target)
        pointwise_x0 = pointwise_estimate(result, 0)
        global_risk_ = global_estimate(result, cov)
        split = _split(result, cov, target)
        global_variance = global_estimate(result, cov, errors=result.e)
        alpha = MonteCarloEstimate.from_samples(result.alpha_hat)
        sup_dev = MonteCarloEstimate.from_samples(result.sup_deviation)
        theorem = (
            risk_bound(result.n_samples, K, consts, config.effective_sobolev_index)
            if K >= 2
            else float("nan")
        )
        rows.append(
            {
                "n_samples": result.n_samples,
                "window": K,
                "oracle_past": result.oracle_past,
                "target": target,
                "pointwise_risk": pointwise.mean,
                "pointwise_risk_hw": pointwise.half_width,
                "pointwise_risk_x0_scaled": pointwise_x0.mean / r0,
                "global_risk": global_risk_.mean,
                "global_risk_hw": global_risk_.half_width,
                "bias_sq": split.bias_squared,
                "variance": split.variance.mean,
                "variance_hw": split.variance.half_width,
                "global_bias_sq": bias_squared(
                    cov, result.oracle_window, result.oracle_long
                ),
                "global_variance": global_variance.mean,
                "global_variance_hw": global_variance.half_width,
                "mean_alpha_hat": alpha.mean,
                "mean_alpha_hat_hw": alpha.half_width,
                "frac_alpha_positive": float(np.mean(result.alpha_hat > 0)),
                "mean_sup_deviation": sup_dev.mean,
                "mean_sup_deviation_hw": sup_dev.half_width,
                "min_regularized_eigenvalue": float(result.min_eigenvalue.min()),
                "lemma_bound_fraction": float(np.mean(result.lemma_holds)),
                "theorem_bound": theorem,
                "lower_bound": float(np.min(result.lower_bound)),
                "lower_bound_estimated": result.lower_bound_estimated,
            }
        )
    metadata = config.describe()
    metadata.update(
        {"C0": consts.C0, "C1": consts.C1, "C2": consts.C2, "C2_proof": consts.C2_proof,
         "C3": consts.C3, "C4": consts.C4, "r4": consts.r4}
    )
    return RiskReport(pd.DataFrame(rows), metadata, results)


def pointwise_risk(config: ExperimentConfig, target: Optional[Integral] = None) -> List[MonteCarloEstimate]:
    """
    Pointwise risk E[(Y_hat_j - E[X_j | past])^2] at every path length.

    The blind predictor is fitted on the N most recent samples of a path of
    length N + L and compared with the known-covariance predictor from the
    last L samples of the same path.
    """
    target = config.target if target is None else target
    return [pointwise_estimate(r, target) for r in _grid_results(config)]


def global_risk(config: ExperimentConfig) -> List[MonteCarloEstimate]:
    """Supremum of the pointwise risk over unit-variance targets in B_K, per path length."""
    return [global_estimate(r, config.covariance) for r in _grid_results(config)]


def bias_variance_split(config: ExperimentConfig) -> List[BiasVarianceSplit]:
    """Squared bias (deterministic) and variance (Monte Carlo) per path length."""
    return [
        _split(r, config.covariance, config.target) for r in _grid_results(config)
    ]


@dataclass
class RateSweepReport(Report):
    """Global risk along the grid and the fitted log-log slope."""

    slope: float = float("nan")
    slope_stderr: float = float("nan")
    slope_mc_stderr: float = float("nan")
    intercept: float = float("nan")
    theoretical_exponent: float = float("nan")

    @property
    def slope_negative(self) -> bool:
        """Slope below zero at three Monte Carlo standard errors."""
        return bool(self.slope + 3.0 * self.slope_mc_stderr < 0)

    @property
    def passed(self) -> bool:
        return self.slope_negative

    def raise_for_failure(self) -> None:
        if not self.passed:
            raise VerificationError(
                f"Fitted slope {self.slope:.4f} is not negative at three Monte Carlo "
                f"standard errors ({self.slope_mc_stderr:.4f})."
            )


def _is_geometric(grid: Sequence[int]) -> bool:
    ratios = np.asarray(grid[1:], dtype=np.float64) / np.asarray(grid[:-1], dtype=np.float64)
    return bool(np.all(ratios > 1) and np.allclose(ratios, ratios[0], rtol=1e-6))


def _slope_mc_stderr(x: np.ndarray, y_half_width: np.ndarray) -> float:
    # least-squares slope is linear in y; propagate per-point Monte Carlo errors
    dx = x - x.mean()
    weights = dx / np.sum(dx**2)
    return float(np.sqrt(np.sum((weights * y_half_width / Z_95) ** 2)))


def rate_sweep(config: ExperimentConfig) -> RateSweepReport:
    """
    Fit the slope of log sqrt(global risk) against log(N / log N).

    Needs at least four path lengths on a geometric grid.

    Returns
    -------
    RateSweepReport
        Per-point risks and half-widths, the slope with its regression and
        Monte Carlo standard errors, and the exponent -(2s - 1) / (2 (2s + 3)) for comparison.
    """
    grid = config.n_grid
    if len(grid) < 4:
        raise ValueError(f"A rate sweep needs at least 4 path lengths. Got {len(grid)}.")
    if not _is_geometric(grid):
        raise ValueError(f"A rate sweep needs an increasing geometric grid. Got {grid}.")

    s = config.effective_sobolev_index
    cov = config.covariance
    rows = []
    for result in _grid_results(config):
        risk = global_estimate(result, cov)
        if risk.mean <= 0:
            raise VerificationError(
                f"Global risk at N = {result.n_samples} is zero; no slope can be fitted."
            )
        N = result.n_samples
        rows.append(
            {
                "n_samples": N,
                "window": result.window,
                "log_n_over_log_n": float(np.log(N / np.log(N))),
                "global_risk": risk.mean,
                "global_risk_hw": risk.half_width,
                "log_sqrt_risk": 0.5 * float(np.log(risk.mean)),
                "log_sqrt_risk_hw": risk.half_width / (2.0 * risk.mean),
                "theorem_bound": _theorem_bound(config, N, result.window),
            }
        )
    frame = pd.DataFrame(rows)
    fit = linregress(frame["log_n_over_log_n"], frame["log_sqrt_risk"])
    mc_stderr = _slope_mc_stderr(
        frame["log_n_over_log_n"].to_numpy(), frame["log_sqrt_risk_hw"].to_numpy()
    )
    exponent = theoretical_rate_exponent(s)
    metadata = config.describe()
    metadata.update(
        {
            "slope": float(fit.slope),
            "slope_stderr": float(fit.stderr),
            "slope_mc_stderr": mc_stderr,
            "theoretical_exponent": exponent,
        }
    )
    report = RateSweepReport(
        frame,
        metadata,
        slope=float(fit.slope),
        slope_stderr=float(fit.stderr),
        slope_mc_stderr=mc_stderr,
        intercept=float(fit.intercept),
        theoretical_exponent=exponent,
    )
    report.metadata["passed"] = report.passed
    return report


@dataclass
class ConcentrationReport(Report):
    """Quantiles of the sup deviation at N and 4N and exceedance of the deviation bound."""

    @property
    def passed(self) -> bool:
        """Exceedance of the bound at level x is at most e^{-x} plus a slack of 0.05."""
        limit = self.frame["exp_minus_x"] + EXCEEDANCE_SLACK
        return bool(
            np.all(self.frame["exceedance"] <= limit)
            and np.all(self.frame["exceedance_4n"] <= limit)
        )

    def raise_for_failure(self) -> None:
        if not self.passed:
            raise VerificationError(
                "The sup deviation exceeded the concentration bound too often."
            )


def _sup_deviations(config: ExperimentConfig, n_samples: int, window: int) -> np.ndarray:
    cov = config.covariance
    sampler = make_sampler(cov, n_samples, config.method)

    def one(i):
        x = sampler.draw(replication_rng(config.seed, n_samples, i))
        return sup_deviation(estimate_covariance(ObservedPath(x), window), cov)

    values = Parallel(n_jobs=config.n_jobs)(
        delayed(one)(i) for i in range(config.n_replications)
    )
    return np.asarray(values)


def concentration_check(config: ExperimentConfig) -> ConcentrationReport:
    """
    Scaling of the sup deviation of the empirical autocovariances.

    For each N of the grid, with K = K(N), the sup deviation over lags up to
    2K is sampled at N and 4N. The ratio of medians should be close to 2;
    the fraction of replications above 4 m' (sqrt((log K + x)/N) + x/N)
    should be at most about e^{-x}.
    """
    m_prime = config.spectral_density.upper_bound
    x = config.concentration_x
    rows = []
    for N in config.n_grid:
        K = config.window_for(N)
        dev_n = _sup_deviations(config, N, K)
        dev_4n = _sup_deviations(config, 4 * N, K)
        bound_n = concentration_bound(N, K, m_prime, x)
        bound_4n = concentration_bound(4 * N, K, m_prime, x)
        median_n = float(np.median(dev_n))
        median_4n = float(np.median(dev_4n))
        rows.append(
            {
                "n_samples": N,
                "window": K,
                "median": median_n,
                "q90": float(np.quantile(dev_n, 0.9)),
                "median_4n": median_4n,
                "q90_4n": float(np.quantile(dev_4n, 0.9)),
                "median_ratio": median_n / median_4n if median_4n > 0 else float("nan"),
                "bound": bound_n,
                "exceedance": float(np.mean(dev_n > bound_n)),
                "bound_4n": bound_4n,
                "exceedance_4n": float(np.mean(dev_4n > bound_4n)),
                "exp_minus_x": float(np.exp(-x)),
            }
        )
    report = ConcentrationReport(pd.DataFrame(rows), config.describe())
    report.metadata["passed"] = report.passed
    return report


def random_positive_covariance(size: Integral, rng) -> CovarianceSequence:
    """
    Covariances of a random positive trigonometric polynomial of degree size - 1.

    a_k ~ N(0, 1) / (k + 1)^2 for k >= 1, a_0 = 2 sum |a_k| + U(0.5, 1.5).
    """
    validate_single_integer(size, min_value=1)
    k = np.arange(1, int(size))
    tail = rng.standard_normal(k.size) / (k + 1.0) ** 2
    a0 = 2.0 * np.sum(np.abs(tail)) + rng.uniform(0.5, 1.5)
    return CovarianceSequence(values=np.concatenate([[a0], tail]))


def _relative_error(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def _schur_trial(cov: CovarianceSequence, n: int, rng) -> dict:
    gamma = cov.toeplitz(n)
    if n == 1:
        keep = np.array([0])
    else:
        keep = np.sort(rng.choice(n, size=rng.integers(1, n), replace=False))
    lemma = schur_complement(spd_inverse(gamma), keep)
    schur_error = _relative_error(lemma, spd_inverse(gamma[np.ix_(keep, keep)]))

    if n == 1:
        duality_error = 0.0
    else:
        order = rng.permutation(n)
        cut = int(rng.integers(1, n))
        check = error_operator_duality(cov, order[:cut], order[cut:])
        duality_error = _relative_error(check.error_operator, check.precision_inverse)

    f = covariance_to_spectrum(cov)
    K = max(1, n // 2)
    D = rng.standard_normal((K, K))
    op_norm = float(np.linalg.norm(D, 2))
    warped = warped_operator_norm(D, cov)
    ratio = f.upper_bound / f.lower_bound
    slack = 1e-9 * op_norm
    bounds_ok = (op_norm / ratio - slack <= warped <= op_norm * ratio + slack)
    return {
        "n": n,
        "schur_error": schur_error,
        "duality_error": duality_error,
        "warped_norm": warped,
        "operator_norm": op_norm,
        "spectral_ratio": ratio,
        "warped_bounds_hold": bool(bounds_ok),
    }


@dataclass
class SchurReport(Report):
    """Per-trial errors of the Schur identity, the duality and the norm bounds."""

    tolerance: float = 1e-8

    @property
    def max_schur_error(self) -> float:
        return float(self.frame["schur_error"].max())

    @property
    def max_duality_error(self) -> float:
        return float(self.frame["duality_error"].max())

    @property
    def passed(self) -> bool:
        return (
            self.max_schur_error <= self.tolerance
            and self.max_duality_error <= self.tolerance
            and bool(self.frame["warped_bounds_hold"].all())
        )

    def raise_for_failure(self) -> None:
        if not self.passed:
            raise VerificationError(
                f"Schur verification failed: max Schur error {self.max_schur_error:.3g}, "
                f"max duality error {self.max_duality_error:.3g}, tolerance {self.tolerance:.3g}."
            )


def schur_verify(
    sizes: Union[Integral, Sequence[Integral]],
    trials: Integral,
    seed: Integral,
    tol: float = 1e-8,
) -> SchurReport:
    """
    Check the Schur identity, the error-operator duality and the warped-norm
    bounds on random positive Toeplitz covariances.

    Trial t uses size sizes[t % len(sizes)] and the stream
    ``replication_rng(seed, 0, t)``.

    Parameters
    ----------
    sizes : int or sequence of int
        Matrix sizes, each at most 64.
    trials : int
        Number of trials.
    seed : int
        64-bit master seed.
    tol : float, default=1e-8
        Relative error tolerance.

    Returns
    -------
    SchurReport
    """
    if isinstance(sizes, Integral):
        sizes = [sizes]
    sizes = [int(n) for n in sizes]
    validate_integers(sizes, min_value=1, max_value=MAX_SCHUR_SIZE)
    validate_single_integer(trials, min_value=1)
    validate_seed(seed)
    rows = []
    for t in range(int(trials)):
        n = sizes[t % len(sizes)]
        rng = replication_rng(seed, 0, t)
        cov = random_positive_covariance(n, rng)
        rows.append({"trial": t, **_schur_trial(cov, n, rng)})
    metadata = {
        "tool": "tsblind",
        "version": tool_version(),
        "sizes": " ".join(str(n) for n in sizes),
        "trials": int(trials),
        "seed": int(seed),
        "tolerance": tol,
    }
    report = SchurReport(pd.DataFrame(rows), metadata, tolerance=tol)
    report.metadata["passed"] = report.passed
    return report
