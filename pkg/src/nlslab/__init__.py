"""Pseudospectral Monte-Carlo laboratory for sup-norm tail statistics of the
1-D cubic Schrodinger flow on the torus with random decaying Fourier data."""

__version__ = "0.1.0"

from .config import ExperimentConfig, load_config
from .errors import BlowUpError, ConfigError, ContractError
from .ldp import (
    CoeffSpec,
    RateCurve,
    TailEstimate,
    exact_pointwise_tail,
    error_scaling_study,
    gronwall_monitor,
    hyper_tail_check,
    mc_sup_tail,
    rate_curve,
    tune_threshold,
    wilson_interval,
)
from .modified import AppFlow, app_residual, error_trajectory, u_app_at
from .random_data import (
    GaussianDraw,
    make_initial_data,
    phase_invariance_stat,
    truncated_variance,
)
from .resonance import ResonanceQuery, chaos_statistic, decay_slope_fit, key_sum, omega
from .rng import derive_seed
from .solver import (
    SolverConfig,
    Trajectory,
    evolve,
    galerkin_reference_evolve,
    gauge_to_interaction,
    strang_step,
)
from .spectral import (
    LatticeSpec,
    SpectralField,
    apply_trilinear,
    evaluate_physical,
    mass_gauge,
    sobolev_norm,
    sup_norm,
)

__all__ = [
    "AppFlow",
    "BlowUpError",
    "CoeffSpec",
    "ConfigError",
    "ContractError",
    "ExperimentConfig",
    "GaussianDraw",
    "LatticeSpec",
    "RateCurve",
    "ResonanceQuery",
    "SolverConfig",
    "SpectralField",
    "TailEstimate",
    "Trajectory",
    "app_residual",
    "apply_trilinear",
    "chaos_statistic",
    "decay_slope_fit",
    "derive_seed",
    "error_scaling_study",
    "error_trajectory",
    "evaluate_physical",
    "evolve",
    "exact_pointwise_tail",
    "galerkin_reference_evolve",
    "gauge_to_interaction",
    "gronwall_monitor",
    "hyper_tail_check",
    "key_sum",
    "load_config",
    "make_initial_data",
    "mass_gauge",
    "mc_sup_tail",
    "omega",
    "phase_invariance_stat",
    "rate_curve",
    "sobolev_norm",
    "strang_step",
    "sup_norm",
    "truncated_variance",
    "tune_threshold",
    "u_app_at",
    "wilson_interval",
]
