"""T-periodic, strictly positive nutrient supply schedules.

Four concrete forms are supported: constant, sinusoid, truncated Fourier
series, and a periodic piecewise-linear table.  Every form reduces time
modulo the period before evaluating, so long integrations accrue no phase
drift, and every form has a closed-form period mean.  Positivity is enforced
at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ScheduleError

_SCAN_SAMPLES = 4096


@dataclass(frozen=True)
class NutrientSchedule:
    """Base class; subclasses fill in the in-period evaluation and stats."""

    period: float

    def __post_init__(self):
        if not (math.isfinite(self.period) and self.period > 0.0):
            raise ScheduleError(f"period must be positive, got {self.period}")

    # -- evaluation -------------------------------------------------------

    def __call__(self, t):
        tau = np.asarray(t, dtype=float) % self.period
        out = self._value(tau)
        return float(out) if np.isscalar(t) else out

    def _value(self, tau):
        raise NotImplementedError

    # -- period statistics -------------------------------------------------

    @property
    def mean(self) -> float:
        return self._stats()[0]

    @property
    def maximum(self) -> float:
        return self._stats()[1]

    @property
    def minimum(self) -> float:
        return self._stats()[2]

    def stats(self) -> tuple[float, float, float]:
        """(mean, max, min) over one period."""
        return self._stats()

    def _stats(self) -> tuple[float, float, float]:
        raise NotImplementedError

    def _check_positive(self):
        if self.minimum <= 0.0:
            raise ScheduleError(
                f"{type(self).__name__} schedule is not strictly positive "
                f"(min = {self.minimum})"
            )


@dataclass(frozen=True)
class ConstantSchedule(NutrientSchedule):
    value: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        self._check_positive()

    def _value(self, tau):
        return np.full_like(np.asarray(tau, dtype=float), self.value)[()]

    def _stats(self):
        return (self.value, self.value, self.value)


@dataclass(frozen=True)
class SinusoidSchedule(NutrientSchedule):
    """mean + amplitude * sin(2*pi*t/period)."""

    mean_level: float = 1.0
    amplitude: float = 0.5

    def __post_init__(self):
        super().__post_init__()
        self._check_positive()

    def _value(self, tau):
        return self.mean_level + self.amplitude * np.sin(
            2.0 * math.pi * tau / self.period
        )

    def _stats(self):
        a = abs(self.amplitude)
        return (self.mean_level, self.mean_level + a, self.mean_level - a)


@dataclass(frozen=True)
class FourierSchedule(NutrientSchedule):
    """mean + sum_k cos_coeffs[k-1]*cos(2*pi*k*t/T) + sin_coeffs[k-1]*sin(...)."""

    mean_level: float = 1.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    _cached: tuple[float, float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        object.__setattr__(self, "_cached", self._scan_extrema())
        self._check_positive()

    def _value(self, tau):
        w = 2.0 * math.pi * np.asarray(tau, dtype=float) / self.period
        out = np.full_like(np.asarray(w, dtype=float), self.mean_level)
        for k, a in enumerate(self.cos_coeffs, start=1):
            out = out + a * np.cos(k * w)
        for k, b in enumerate(self.sin_coeffs, start=1):
            out = out + b * np.sin(k * w)
        return out

    def _scan_extrema(self):
        # zero-mean harmonics: the period mean is exactly the constant term
        tau = np.linspace(0.0, self.period, _SCAN_SAMPLES, endpoint=False)
        vals = self._value(tau)
        hi = self._refine(tau, vals, np.argmax(vals), sign=-1.0)
        lo = self._refine(tau, vals, np.argmin(vals), sign=1.0)
        return (self.mean_level, hi, lo)

    def _refine(self, tau, vals, idx, sign):
        h = self.period / _SCAN_SAMPLES
        a, b = tau[idx] - h, tau[idx] + h
        res = minimize_scalar(
            lambda t: sign * float(self._value(np.asarray(t))),
            bounds=(a, b),
            method="bounded",
            options={"xatol": 1e-13},
        )
        return sign * res.fun

    def _stats(self):
        return self._cached


@dataclass(frozen=True)
class PiecewiseLinearSchedule(NutrientSchedule):
    """Periodic linear interpolation of (time, value) knots spanning [0, T]."""

    knot_times: tuple[float, ...] = ()
    knot_values: tuple[float, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        t = tuple(float(x) for x in self.knot_times)
        v = tuple(float(x) for x in self.knot_values)
        object.__setattr__(self, "knot_times", t)
        object.__setattr__(self, "knot_values", v)
        if len(t) < 2 or len(t) != len(v):
            raise ScheduleError("piecewise table needs matching times/values, >= 2 knots")
        if t[0] != 0.0 or abs(t[-1] - self.period) > 1e-12 * self.period:
            raise ScheduleError("piecewise table must span [0, period]")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ScheduleError("piecewise knot times must be strictly increasing")
        if v[0] != v[-1]:
            raise ScheduleError(
                "piecewise table must close periodically (first value == last value)"
            )
        self._check_positive()

    def _value(self, tau):
        return np.interp(tau, self.knot_times, self.knot_values)

    def _stats(self):
        t = np.asarray(self.knot_times)
        v = np.asarray(self.knot_values)
        mean = float(np.trapezoid(v, t) / self.period)
        return (mean, float(v.max()), float(v.min()))


def schedule_from_spec(spec: dict) -> NutrientSchedule:
    """Build a schedule from a config mapping (see the CLI config schema)."""
    if not isinstance(spec, dict) or "form" not in spec:
        raise ScheduleError("schedule spec must be a mapping with a 'form' key")
    form = spec["form"]
    period = spec.get("period", 1.0)
    try:
        if form == "constant":
            return ConstantSchedule(period=period, value=spec["value"])
        if form == "sinusoid":
            return SinusoidSchedule(
                period=period,
                mean_level=spec["mean"],
                amplitude=spec["amplitude"],
            )
        if form == "fourier":
            return FourierSchedule(
                period=period,
                mean_level=spec["mean"],
                cos_coeffs=tuple(spec.get("cos", ())),
                sin_coeffs=tuple(spec.get("sin", ())),
            )
        if form == "piecewise":
            return PiecewiseLinearSchedule(
                period=period,
                knot_times=tuple(spec["times"]),
                knot_values=tuple(spec["values"]),
            )
    except KeyError as exc:
        raise ScheduleError(f"schedule form {form!r} missing key {exc}") from exc
    raise ScheduleError(f"unknown schedule form {form!r}")
