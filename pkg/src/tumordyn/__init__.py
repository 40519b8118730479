"""Periodic tumor-radius dynamics and linear stability toolkit."""

from .fields import (
    BoundaryDerivatives,
    boundary_derivatives,
    p_star,
    perturbed_surface,
    sigma_star,
    spherical_harmonic,
)
from .errors import (
    InsufficientDataError,
    NoPeriodicSolutionError,
    ScheduleError,
    SolverError,
    TumordynError,
)
from .nutrient import (
    ConstantSchedule,
    FourierSchedule,
    NutrientSchedule,
    PiecewiseLinearSchedule,
    SinusoidSchedule,
    schedule_from_spec,
)
from .periodic import (
    PeriodicSolution,
    RateFit,
    bracket,
    convergence_rate,
    find_periodic,
    poincare_map,
)
from .radial import (
    Classification,
    ExtinctionReport,
    ModelParams,
    Trajectory,
    classify_radial,
    extinction_diagnostics,
    integrate,
    rhs,
)
from .specfun import p0, p0_inverse, pn, pn_derivative
from .stability import (
    ModeExponent,
    StabilityReport,
    Verdict,
    analyze,
    evolve_mode,
    mode_decay_bound_check,
    mode_exponent,
    mu_star,
    theta_n,
)

__all__ = [
    "BoundaryDerivatives",
    "Classification",
    "ConstantSchedule",
    "ExtinctionReport",
    "FourierSchedule",
    "InsufficientDataError",
    "ModeExponent",
    "ModelParams",
    "NoPeriodicSolutionError",
    "NutrientSchedule",
    "PeriodicSolution",
    "PiecewiseLinearSchedule",
    "RateFit",
    "ScheduleError",
    "SinusoidSchedule",
    "SolverError",
    "StabilityReport",
    "Trajectory",
    "TumordynError",
    "Verdict",
    "analyze",
    "boundary_derivatives",
    "bracket",
    "classify_radial",
    "convergence_rate",
    "evolve_mode",
    "extinction_diagnostics",
    "find_periodic",
    "integrate",
    "mode_decay_bound_check",
    "mode_exponent",
    "mu_star",
    "p0",
    "p0_inverse",
    "p_star",
    "perturbed_surface",
    "pn",
    "pn_derivative",
    "poincare_map",
    "rhs",
    "schedule_from_spec",
    "sigma_star",
    "spherical_harmonic",
    "theta_n",
]

__version__ = "0.1.0"
