"""Ensemble Kalman filtering on partially observed chaotic systems."""

from .dynamics import (
    BallSpec,
    Lorenz63,
    Lorenz96,
    LinearMap,
    LinearODE,
    estimate_ball_radius,
    project_to_ball,
)
from .ensemble import SquareRootEnKF
from .experiments import (
    AggregateStats,
    ErrorSeries,
    ExperimentConfig,
    emit_training_data,
    estimate_alpha,
    noise_scaling_experiment,
    open_loop_divergence,
    preset_config,
    run_monte_carlo,
    run_trial,
    surrogate_fidelity_experiment,
)
from .linalg import kalman_gain, obs_weighted_norm, psd_sqrt, sym_eig
from .meanfield import GaussianProjectedFilter, GaussianState
from .network import NetworkLayer, NetworkWeights, forward, load_weights, save_weights
from .observation import (
    ObservationSetup,
    every_third_removed,
    first_coordinate,
    selection_matrix,
)
from .surrogate import (
    CoarseStepSurrogate,
    ModelErrorEstimate,
    NeuralSurrogate,
    PerturbedForcingSurrogate,
    RidgeQuadraticSurrogate,
    estimate_model_error,
    fit_ridge_substep_surrogate,
    sample_attractor,
    train_ridge_quadratic,
)
from .validation import BlowUpError, ConfigError, SingularMatrixError, WeightSchemaError

__version__ = "0.1.0"

__all__ = [
    "AggregateStats",
    "BallSpec",
    "BlowUpError",
    "ConfigError",
    "CoarseStepSurrogate",
    "ErrorSeries",
    "ExperimentConfig",
    "GaussianProjectedFilter",
    "GaussianState",
    "LinearMap",
    "LinearODE",
    "Lorenz63",
    "Lorenz96",
    "ModelErrorEstimate",
    "NetworkLayer",
    "NetworkWeights",
    "NeuralSurrogate",
    "ObservationSetup",
    "PerturbedForcingSurrogate",
    "RidgeQuadraticSurrogate",
    "SingularMatrixError",
    "SquareRootEnKF",
    "WeightSchemaError",
    "emit_training_data",
    "estimate_alpha",
    "estimate_ball_radius",
    "estimate_model_error",
    "every_third_removed",
    "first_coordinate",
    "fit_ridge_substep_surrogate",
    "forward",
    "kalman_gain",
    "load_weights",
    "noise_scaling_experiment",
    "obs_weighted_norm",
    "open_loop_divergence",
    "preset_config",
    "project_to_ball",
    "psd_sqrt",
    "run_monte_carlo",
    "run_trial",
    "sample_attractor",
    "save_weights",
    "selection_matrix",
    "surrogate_fidelity_experiment",
    "sym_eig",
    "train_ridge_quadratic",
]
