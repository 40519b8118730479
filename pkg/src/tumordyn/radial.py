"""The reduced tumor-radius ODE and its long-time classification.

dR/dt = mu * R * [Phi(t) * P0(R) - sigma_tilde / 3]

R = 0 is invariant; positive solutions stay positive.  Extinction versus
persistence is decided analytically by comparing sigma_tilde with the period
mean of the nutrient supply; integration is used only for diagnostics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import SolverError
from .nutrient import NutrientSchedule
from .specfun import p0

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Model parameters (mu, sigma_tilde, gamma) plus the nutrient schedule."""

    mu: float
    sigma_tilde: float
    gamma: float
    schedule: NutrientSchedule

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise ValueError(f"mu must be positive, got {self.mu}")
        if not (math.isfinite(self.sigma_tilde) and self.sigma_tilde >= 0.0):
            raise ValueError(f"sigma_tilde must be nonnegative, got {self.sigma_tilde}")
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def period(self) -> float:
        return self.schedule.period


class Classification(enum.Enum):
    EXTINCTION = "Extinction"
    PERSISTENCE = "Persistence"


def rhs(params: ModelParams, t: float, R: float) -> float:
    """Right side of the radius ODE; exactly 0 at R = 0."""
    if R < 0.0:
        raise ValueError(f"radius must be nonnegative, got {R}")
    if R == 0.0:
        return 0.0
    return params.mu * R * (params.schedule(t) * p0(R) - params.sigma_tilde / 3.0)


@dataclass
class Trajectory:
    """Dense ODE solution R(t) on [t0, t1] with its interpolant."""

    times: np.ndarray
    radii: np.ndarray
    t0: float
    t1: float
    steps: int
    nfev: int
    _interp: object = field(repr=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t0 - 1e-12) or np.any(t > self.t1 + 1e-12):
            raise ValueError("evaluation time outside the integrated span")
        out = self._interp(np.clip(t, self.t0, self.t1))[0]
        return float(out) if t.ndim == 0 else out


def integrate(
    params: ModelParams,
    R0: float,
    t0: float,
    t1: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    t_eval=None,
) -> Trajectory:
    """Adaptive Dormand-Prince (RK45) solve with dense output.

    Positivity is verified on the accepted nodes; the right side treats
    non-positive trial radii as stationary so the integrator cannot step
    through zero.
    """
    if not R0 > 0.0:
        raise ValueError(f"initial radius must be positive, got {R0}")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")

    def fun(t, y):
        r = y[0]
        if r <= 0.0:
            return [0.0]
        return [params.mu * r * (params.schedule(t) * p0(r) - params.sigma_tilde / 3.0)]

    sol = solve_ivp(
        fun,
        (t0, t1),
        [R0],
        method="RK45",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        t_eval=t_eval,
    )
    if not sol.success:
        raise SolverError(f"integration failed: {sol.message}")
    radii = sol.y[0]
    if np.any(radii <= 0.0):
        raise SolverError("integration produced a non-positive radius")
    return Trajectory(
        times=sol.t,
        radii=radii,
        t0=t0,
        t1=t1,
        steps=len(sol.t) - 1,
        nfev=sol.nfev,
        _interp=sol.sol,
    )


def classify_radial(params: ModelParams) -> Classification:
    """Extinction iff sigma_tilde >= mean(Phi); ties count as extinction."""
    mean = params.schedule.mean
    if params.sigma_tilde >= mean:
        return Classification.EXTINCTION
    return Classification.PERSISTENCE


@dataclass
class ExtinctionReport:
    period_times: np.ndarray
    period_radii: np.ndarray
    nonincreasing_ok: bool
    cap_ok: bool
    final_radius: float
    violations: list[str]


def extinction_diagnostics(
    params: ModelParams,
    R0: float,
    n_periods: int,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    grid_per_period: int = 32,
) -> ExtinctionReport:
    """Integrate n_periods and check the proof-backed decay structure.

    Verifies (a) R(kT) is non-increasing and (b) within each period
    R(t) <= R(kT) * exp(mu*(Phi_max - sigma_tilde)*T/3) on a grid.
    """
    if classify_radial(params) is not Classification.EXTINCTION:
        raise ValueError("extinction diagnostics require sigma_tilde >= mean(Phi)")
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")

    T = params.period
    t_grid = np.linspace(0.0, n_periods * T, n_periods * grid_per_period + 1)
    traj = integrate(params, R0, 0.0, n_periods * T, rtol=rtol, atol=atol, t_eval=t_grid)

    rk = traj.radii[::grid_per_period]
    tk = traj.times[::grid_per_period]
    slack = 10.0 * max(rtol * float(np.max(traj.radii)), atol)
    violations: list[str] = []

    diffs = np.diff(rk)
    nonincreasing_ok = bool(np.all(diffs <= slack))
    if not nonincreasing_ok:
        k = int(np.argmax(diffs))
        violations.append(
            f"R(kT) increased between periods {k} and {k + 1} by {diffs[k]:.3e}"
        )

    cap = math.exp(params.mu * (params.schedule.maximum - params.sigma_tilde) * T / 3.0)
    cap_ok = True
    for k in range(n_periods):
        seg = traj.radii[k * grid_per_period : (k + 1) * grid_per_period + 1]
        bound = rk[k] * cap + slack
        if np.any(seg > bound):
            cap_ok = False
            violations.append(f"within-period growth cap violated in period {k}")
            break

    return ExtinctionReport(
        period_times=tk,
        period_radii=rk,
        nonincreasing_ok=nonincreasing_ok,
        cap_ok=cap_ok,
        final_radius=float(traj.radii[-1]),
        violations=violations,
    )
