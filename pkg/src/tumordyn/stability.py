"""Linear stability of the periodic orbit under spherical-harmonic modes.

Each surface mode (n, m) has amplitude

  rho_nm(t) = rho_nm(0) * (R*(0)/R*(t))^(n-1)
              * exp(-Int_0^t [gamma*n*(n(n+1)/2 - 1)/R*^3
                              - mu*Phi*R*^2*P0(R*)*(P1(R*) - Pn(R*))] ds).

The period average of that integrand is the mode exponent Lambda_n (the
closed-form (n-1)*dlogR*/dt term integrates to zero over full periods and is
kept out of Lambda_n).  Mode n decays iff mu < theta_n, and the critical
proliferation coefficient is mu_star = theta_2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .errors import NoPeriodicSolutionError, SolverError
from .periodic import PeriodicSolution, find_periodic
from .radial import ModelParams
from .specfun import pn

DEFAULT_N_MAX = 32
MARGINAL_BAND = 1e-8


class Verdict(enum.Enum):
    LINEARLY_STABLE = "LinearlyStable"
    LINEARLY_UNSTABLE = "LinearlyUnstable"
    MARGINAL = "Marginal"


@dataclass(frozen=True)
class ModeExponent:
    mode: int
    lambda_bar: float
    floquet_multiplier: float


def _surface_tension_integral(orbit: PeriodicSolution) -> float:
    """Int over one period of 1/R*^3."""
    _, wq, rq = orbit.quadrature()
    return float(np.sum(wq / rq**3))


def _proliferation_integral(orbit: PeriodicSolution, n: int) -> float:
    """Int over one period of Phi * R*^2 * P0(R*) * (P1(R*) - Pn(R*))."""
    tq, wq, rq = orbit.quadrature()
    phi = orbit.params.schedule(tq)
    p0q = pn(0, rq)
    p1q = pn(1, rq)
    pnq = p1q if n == 1 else pn(n, rq)
    return float(np.sum(wq * phi * rq**2 * p0q * (p1q - pnq)))


def _mode_coefficient(n: int) -> float:
    return n * (n * (n + 1) / 2.0 - 1.0)


def theta_n(orbit: PeriodicSolution, n: int) -> float:
    """Threshold theta_n: mode n decays iff mu < theta_n (n >= 2)."""
    if n < 2:
        raise ValueError("theta_n is defined for n >= 2 (theta_0 = theta_1 = infinity)")
    num = orbit.params.gamma * _mode_coefficient(n) * _surface_tension_integral(orbit)
    den = _proliferation_integral(orbit, n)
    return num / den


def mode_exponent(
    orbit: PeriodicSolution, n: int, mu: float | None = None
) -> ModeExponent:
    """Period-averaged decay rate Lambda_n of mode n on this orbit.

    Lambda_1 is exactly zero (translation modes are neutral).  mu defaults to
    the orbit's own parameter; passing another value evaluates the exponent
    formula on the frozen orbit.
    """
    if n < 0 or n != int(n):
        raise ValueError(f"mode index must be a nonnegative integer, got {n!r}")
    n = int(n)
    if mu is None:
        mu = orbit.params.mu
    T = orbit.period
    lam = (
        orbit.params.gamma * _mode_coefficient(n) * _surface_tension_integral(orbit)
        - mu * _proliferation_integral(orbit, n)
    ) / T
    return ModeExponent(mode=n, lambda_bar=lam, floquet_multiplier=math.exp(-lam * T))


def mu_star(
    params: ModelParams,
    self_consistent: bool = False,
    orbit: PeriodicSolution | None = None,
    rel_tol: float = 1e-9,
) -> tuple[float, bool]:
    """Critical proliferation coefficient theta_2.

    By default theta_2 is evaluated on the orbit computed at params.mu (the
    per-mu classification).  With self_consistent=True the root of
    mu = theta_2(orbit(mu)) is returned instead; the two coincide for a
    constant nutrient supply, where the orbit is mu-independent.
    """
    if not self_consistent:
        if orbit is None:
            orbit = find_periodic(params)
        return theta_n(orbit, 2), False

    def h(mu: float) -> float:
        trial = replace(params, mu=mu)
        return mu - theta_n(find_periodic(trial), 2)

    # walk a log grid; large mu can collapse the orbit radius below the
    # representable range, in which case no threshold exists numerically
    lo, hi = None, None
    prev_mu, prev_h = None, None
    for exponent in range(-6, 7):
        mu_try = 10.0**exponent
        try:
            h_try = h(mu_try)
        except (SolverError, ValueError, OverflowError):
            break
        if prev_h is not None and prev_h < 0.0 <= h_try:
            lo, hi = prev_mu, mu_try
            break
        prev_mu, prev_h = mu_try, h_try
    if lo is None:
        raise NoPeriodicSolutionError(
            "self-consistent mu_star not bracketed in [1e-6, 1e6]"
        )
    root = brentq(h, lo, hi, rtol=rel_tol, xtol=1e-12)
    return float(root), True


def evolve_mode(
    orbit: PeriodicSolution, n: int, m: int, rho0: float, t: float
) -> float:
    """Amplitude rho_nm(t) of surface mode (n, m); independent of m.

    Whole periods use the cached exponent; the fractional remainder is
    integrated by composite Gauss-Legendre on the dense orbit.
    """
    if abs(m) > n:
        raise ValueError(f"|m| <= n required, got (n, m) = ({n}, {m})")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    T = orbit.period
    k = int(math.floor(t / T))
    tau = t - k * T
    lam = mode_exponent(orbit, n).lambda_bar
    integral = k * lam * T + _partial_integral(orbit, n, tau)
    prefactor = (orbit.R_star0 / orbit(orbit.t0 + t)) ** (n - 1)
    return rho0 * prefactor * math.exp(-integral)


def _partial_integral(orbit: PeriodicSolution, n: int, tau: float) -> float:
    """Int_0^tau of the mode integrand over a fraction of a period."""
    if tau <= 0.0:
        return 0.0
    params = orbit.params
    x, w = np.polynomial.legendre.leggauss(8)
    edges = orbit.t0 + np.linspace(0.0, tau, 257)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    tq = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wq = (half[:, None] * w[None, :]).ravel()
    rq = orbit(tq)
    p0q = pn(0, rq)
    p1q = pn(1, rq)
    pnq = p1q if n == 1 else pn(n, rq)
    integrand = params.gamma * _mode_coefficient(n) / rq**3 - params.mu * params.schedule(
        tq
    ) * rq**2 * p0q * (p1q - pnq)
    return float(np.sum(wq * integrand))


@dataclass
class DecayBoundReport:
    """Check of the cubic-in-n decay floor Lambda_n >= delta * (n^3 + 1)."""

    mu: float
    theta2: float
    delta_hat: float
    candidate_floor: float
    per_mode: list[tuple[int, float]]
    nonpositive_modes: list[int]
    ok: bool


def mode_decay_bound_check(
    orbit: PeriodicSolution,
    n_range=range(2, 33),
    mu: float | None = None,
    slack: float = 0.05,
) -> DecayBoundReport:
    """Verify min_n Lambda_n/(n^3+1) clears the analytic floor
    (mu/theta2)(theta2/mu - 1) * gamma / (4 R_max^3), up to slack."""
    if mu is None:
        mu = orbit.params.mu
    theta2 = theta_n(orbit, 2)
    if mu >= theta2:
        raise ValueError("decay bound check requires the stable regime mu < theta_2")
    per_mode = []
    nonpositive = []
    for n in n_range:
        lam = mode_exponent(orbit, n, mu=mu).lambda_bar
        per_mode.append((n, lam / (n**3 + 1)))
        if lam <= 0.0:
            nonpositive.append(n)
    delta_hat = min(v for _, v in per_mode)
    floor = (
        0.25
        * (mu / theta2)
        * (theta2 / mu - 1.0)
        * orbit.params.gamma
        / orbit.R_max**3
    )
    ok = not nonpositive and delta_hat >= (1.0 - slack) * floor
    return DecayBoundReport(
        mu=mu,
        theta2=theta2,
        delta_hat=delta_hat,
        candidate_floor=floor,
        per_mode=per_mode,
        nonpositive_modes=nonpositive,
        ok=ok,
    )


@dataclass
class StabilityReport:
    params: ModelParams
    orbit: PeriodicSolution
    thresholds: np.ndarray        # theta_n for n = 2..n_max
    mu_star: float                # theta_2 on the orbit at params.mu
    self_consistent_mu_star: float | None
    exponents: list[ModeExponent]  # n = 0..n_max
    verdict: Verdict


def analyze(
    params: ModelParams,
    n_max: int = DEFAULT_N_MAX,
    self_consistent: bool = False,
    marginal_band: float = MARGINAL_BAND,
) -> StabilityReport:
    """Full per-mode stability report at the given parameters."""
    orbit = find_periodic(params)
    thresholds = np.array([theta_n(orbit, n) for n in range(2, n_max + 1)])
    exponents = [mode_exponent(orbit, n) for n in range(0, n_max + 1)]
    crit = thresholds[0]
    if abs(params.mu - crit) <= marginal_band * crit:
        verdict = Verdict.MARGINAL
    elif params.mu < crit:
        verdict = Verdict.LINEARLY_STABLE
    else:
        verdict = Verdict.LINEARLY_UNSTABLE
    sc = mu_star(params, self_consistent=True)[0] if self_consistent else None
    return StabilityReport(
        params=params,
        orbit=orbit,
        thresholds=thresholds,
        mu_star=crit,
        self_consistent_mu_star=sc,
        exponents=exponents,
        verdict=verdict,
    )
