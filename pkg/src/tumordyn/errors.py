"""Exception types shared across the package."""


class TumordynError(Exception):
    """Base class for package-specific failures."""


class ScheduleError(TumordynError, ValueError):
    """Invalid nutrient schedule (non-positive, discontinuous, bad table)."""


class NoPeriodicSolutionError(TumordynError):
    """Raised when sigma_tilde >= mean nutrient supply: no positive periodic orbit."""


class SolverError(TumordynError):
    """Numerical solve failed (integration breakdown, bracket violation, bound check)."""


class InsufficientDataError(TumordynError):
    """Not enough usable samples to fit a rate or statistic."""
