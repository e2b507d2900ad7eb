"""Stationary equilibrium of the age-of-information jamming game."""

from .analytics import (
    AgeConvention,
    AgeValue,
    average_age,
    br_residual,
    clipped_moment,
    g_ratio,
)
from .model import (
    GameConfig,
    JamDistribution,
    Tabulated,
    Threshold,
    ZeroWait,
    check_feasibility,
    equilibrium_distribution,
    mean,
    mix,
    point_mass,
    uniform,
    validate_config,
)
from .montecarlo import AgeStats, simulate, trace
from .solver import (
    EquilibriumSolution,
    best_response,
    beta_star_quadratic,
    equilibrium,
    verify_equilibrium,
)

__version__ = "0.1.0"

__all__ = [
    "AgeConvention",
    "AgeValue",
    "average_age",
    "br_residual",
    "clipped_moment",
    "g_ratio",
    "GameConfig",
    "JamDistribution",
    "Tabulated",
    "Threshold",
    "ZeroWait",
    "check_feasibility",
    "equilibrium_distribution",
    "mean",
    "mix",
    "point_mass",
    "uniform",
    "validate_config",
    "AgeStats",
    "simulate",
    "trace",
    "EquilibriumSolution",
    "best_response",
    "beta_star_quadratic",
    "equilibrium",
    "verify_equilibrium",
]
