"""Exact dynamics of a qubit moving through a leaky Lorentzian cavity."""

__version__ = "0.1.0"

from .amplitude import (
    AmplitudeSolution,
    amplitude_at,
    amplitude_derivative_at,
    amplitude_solution,
    memory_kernel,
    solve_cubic,
)
from .dynamics import (
    QubitState,
    coherence,
    coherence_series,
    decay_rate,
    evolve_state,
    lamb_shift,
    rate_series,
)
from .errors import (
    AmplitudeZeroError,
    ConfigError,
    DegenerateRootsError,
    InvalidParameterError,
    QMotionError,
)
from .nonmarkov import (
    StatePair,
    blp_measure,
    maximize_over_pairs,
    sweep_beta,
    sweep_lambda,
    trace_distance,
)
from .params import CavityQubitParams, DimensionlessParams, load_params, to_dimensionless

__all__ = [
    "AmplitudeSolution", "AmplitudeZeroError", "CavityQubitParams", "ConfigError",
    "DegenerateRootsError", "DimensionlessParams", "InvalidParameterError",
    "QMotionError", "QubitState", "StatePair", "amplitude_at",
    "amplitude_derivative_at", "amplitude_solution", "blp_measure", "coherence",
    "coherence_series", "decay_rate", "evolve_state", "lamb_shift", "load_params",
    "maximize_over_pairs", "memory_kernel", "rate_series", "solve_cubic",
    "sweep_beta", "sweep_lambda", "to_dimensionless", "trace_distance",
]
