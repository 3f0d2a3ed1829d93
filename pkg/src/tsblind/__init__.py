from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("tsblind")
except PackageNotFoundError:
    __version__ = "unknown"

from .blind_predictor import (
    BlindPredictor,
    TheoryConstants,
    choose_window,
    model_theory_constants,
    risk_bound,
    theoretical_rate_exponent,
    theory_constants,
)
from .covariance_estimation import (
    EmpiricalCovariance,
    ObservedPath,
    RegularizedCovariance,
    concentration_bound,
    empirical_autocovariance,
    empirical_spectral_density,
    estimate_covariance,
    regularize,
    regularized_covariance_matrix,
    spectral_error_bound,
    spectral_sup_error,
    sup_deviation,
)
from .experiment_harness import (
    ExperimentConfig,
    MonteCarloEstimate,
    bias_variance_split,
    concentration_check,
    global_risk,
    pointwise_risk,
    rate_sweep,
    run_risk_experiment,
    schur_verify,
)
from .gaussian_simulator import (
    SimulationSpec,
    gaussianity_check,
    simulate_path,
    simulate_replications,
)
from .spectral_model import (
    CovarianceSequence,
    SpectralDensity,
    TrigonometricPolynomial,
    ar1_covariance,
    covariance_to_spectrum,
    inverse_spectrum,
    load_model,
    ma1_covariance,
    parse_model,
    sobolev_norm,
    spectrum_to_covariance,
    white_noise,
)
from .toeplitz_algebra import (
    IndexBlocks,
    PredictorCoefficients,
    ToeplitzMatrix,
    error_operator_duality,
    oracle_predictor,
    prediction_error_operator,
    projector_infinite_past,
    schur_complement_inverse,
    warped_operator_norm,
)
