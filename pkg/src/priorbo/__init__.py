"""Bayesian optimization guided by decaying beliefs about the optimum.

The package couples standard myopic acquisition functions (expected
improvement, probability of improvement, optimistic and joint-draw
selection) with a user-supplied belief density over the minimizer's
location.  The belief multiplies the acquisition with an exponent that
decays like ``beta / n``, so early proposals concentrate where the user
expects the optimum while accumulating evidence eventually dominates.
"""

from .acquisition import (
    AcquisitionSpec,
    DecaySchedule,
    PriorWeighting,
    augment_observations,
    bin_count,
    binned_decayed_density,
    expected_improvement,
    maximize,
    probability_of_improvement,
    thompson_values,
    tie_break_argmax,
    ucb_lower,
)
from .benchmarks import Benchmark, benchmark_names, empirical_max, get_benchmark
from .bounds import (
    BoundGrid,
    SandwichReport,
    bound_constant,
    bound_constant_from_ratio,
    centered_gaussian_grid,
    verify_sandwich,
)
from .errors import (
    ConfigError,
    DomainError,
    NumericalError,
    RunError,
    TraceParseError,
)
from .experiments import (
    Aggregate,
    BeliefSpec,
    ExperimentConfig,
    ExperimentResult,
    aggregate_outcomes,
    beta_sweep,
    execute_run,
    mix_seed,
    read_aggregate_csv,
    run_experiment,
)
from .forest import RandomForest
from .gp import GpPosterior, MleFit, fit_gp, fit_gp_mle, log_marginal_likelihood
from .kernels import Kernel
from .optimizer import (
    OptimizerConfig,
    RunRecord,
    RunResult,
    default_design_size,
    initial_design,
    run,
)
from .priors import (
    EPSILON_FLOOR,
    GaussianBelief,
    Prior,
    PriorQuality,
    UniformBelief,
    synthetic_prior,
    uniform_prior,
)
from .space import Dimension, SearchSpace, unit_space
from .surrogates import ForestSurrogate, GpSurrogate

__version__ = "0.1.0"

__all__ = [
    "AcquisitionSpec",
    "Aggregate",
    "BeliefSpec",
    "Benchmark",
    "BoundGrid",
    "ConfigError",
    "DecaySchedule",
    "Dimension",
    "DomainError",
    "EPSILON_FLOOR",
    "ExperimentConfig",
    "ExperimentResult",
    "ForestSurrogate",
    "GaussianBelief",
    "GpPosterior",
    "GpSurrogate",
    "Kernel",
    "MleFit",
    "NumericalError",
    "OptimizerConfig",
    "Prior",
    "PriorQuality",
    "PriorWeighting",
    "RandomForest",
    "RunError",
    "RunRecord",
    "RunResult",
    "SandwichReport",
    "SearchSpace",
    "TraceParseError",
    "UniformBelief",
    "aggregate_outcomes",
    "augment_observations",
    "benchmark_names",
    "beta_sweep",
    "bin_count",
    "binned_decayed_density",
    "bound_constant",
    "bound_constant_from_ratio",
    "centered_gaussian_grid",
    "default_design_size",
    "empirical_max",
    "execute_run",
    "expected_improvement",
    "fit_gp",
    "fit_gp_mle",
    "get_benchmark",
    "initial_design",
    "log_marginal_likelihood",
    "maximize",
    "mix_seed",
    "probability_of_improvement",
    "read_aggregate_csv",
    "run",
    "run_experiment",
    "synthetic_prior",
    "thompson_values",
    "tie_break_argmax",
    "ucb_lower",
    "uniform_prior",
    "unit_space",
    "verify_sandwich",
]
