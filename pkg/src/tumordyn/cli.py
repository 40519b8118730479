"""Batch driver: simulate / periodic / stability / sweep commands.

Runs are described by a single versioned JSON config file and emit
deterministic CSV/JSON artifacts (17 significant digits, sorted JSON keys,
LF line endings), so identical configs reproduce byte-identical outputs.

Exit codes: 0 success, 1 runtime/solver failure, 2 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import periodic as periodic_mod
from . import radial, stability
from .errors import NoPeriodicSolutionError, ScheduleError, TumordynError
from .nutrient import schedule_from_spec
from .radial import Classification, ModelParams

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------
# deterministic serialization


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if not math.isfinite(v):
        raise ValueError(f"cannot serialize non-finite number {v}")
    return f"{v:.17g}"


def _json_dumps(obj, indent=0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return _fmt(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_json_dumps(v, indent + 1)}"
            for k, v in sorted(obj.items())
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = ",\n".join(f"{inner}{_json_dumps(v, indent + 1)}" for v in seq)
        return "[\n" + items + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(path: Path, obj) -> None:
    path.write_text(_json_dumps(obj) + "\n", encoding="utf-8", newline="\n")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else (v if isinstance(v, str) else _fmt(v)) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ----------------------------------------------------------------------
# config


@dataclass
class RunConfig:
    params: ModelParams
    schedule_spec: dict
    options: dict


def load_config(path: Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if raw.get("version") != CONFIG_VERSION:
        raise ConfigError(
            f"unsupported config version {raw.get('version')!r}; expected {CONFIG_VERSION}"
        )
    if "schedule" not in raw or "params" not in raw:
        raise ConfigError("config requires 'params' and 'schedule' sections")
    schedule = schedule_from_spec(raw["schedule"])
    p = raw["params"]
    try:
        params = ModelParams(
            mu=float(p["mu"]),
            sigma_tilde=float(p["sigma_tilde"]),
            gamma=float(p["gamma"]),
            schedule=schedule,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid params section: {exc}") from exc
    return RunConfig(params=params, schedule_spec=raw["schedule"], options=raw)


def _params_summary(params: ModelParams) -> dict:
    return {
        "mu": params.mu,
        "sigma_tilde": params.sigma_tilde,
        "gamma": params.gamma,
        "period": params.period,
    }


# ----------------------------------------------------------------------
# commands


def cmd_simulate(config: RunConfig, out: Path, rtol: float, atol: float) -> None:
    opts = config.options.get("simulate", {})
    R0 = float(opts.get("R0", 1.0))
    n_periods = int(opts.get("n_periods", 10))
    if R0 <= 0 or n_periods < 1:
        raise ConfigError("simulate requires R0 > 0 and n_periods >= 1")
    params = config.params
    T = params.period
    samples = int(opts.get("samples_per_period", 64))
    t_eval = np.linspace(0.0, n_periods * T, n_periods * samples + 1)
    traj = radial.integrate(params, R0, 0.0, n_periods * T, rtol=rtol, atol=atol, t_eval=t_eval)
    _write_csv(out / "trajectory.csv", ["t", "R"], zip(traj.times, traj.radii))

    verdict = radial.classify_radial(params)
    summary = {
        "params": _params_summary(params),
        "R0": R0,
        "n_periods": n_periods,
        "verdict": verdict.value,
        "final_radius": float(traj.radii[-1]),
    }
    if verdict is Classification.EXTINCTION:
        report = radial.extinction_diagnostics(params, R0, n_periods, rtol=rtol, atol=atol)
        summary["extinction_check"] = {
            "period_radii": list(report.period_radii),
            "nonincreasing_ok": report.nonincreasing_ok,
            "within_period_cap_ok": report.cap_ok,
            "violations": list(report.violations),
        }
    _write_json(out / "summary.json", summary)


def cmd_periodic(config: RunConfig, out: Path) -> None:
    opts = config.options.get("periodic", {})
    params = config.params
    orbit = periodic_mod.find_periodic(params, tol=float(opts.get("tol", 1e-11)))
    _write_csv(out / "orbit.csv", ["t", "R_star"], zip(orbit.times, orbit.radii))

    rate_factor = float(opts.get("rate_R0_factor", 2.0))
    rate_periods = int(opts.get("rate_n_periods", 30))
    fit = periodic_mod.convergence_rate(
        params, rate_factor * orbit.R_star0, rate_periods, orbit=orbit
    )
    _write_json(
        out / "summary.json",
        {
            "params": _params_summary(params),
            "R_star0": orbit.R_star0,
            "R_min": orbit.R_min,
            "R_max": orbit.R_max,
            "residual": orbit.residual,
            "delta_hat": fit.delta_hat,
            "delta_bound": fit.delta_bound,
        },
    )


def cmd_stability(config: RunConfig, out: Path, n_max: int) -> None:
    opts = config.options.get("stability", {})
    params = config.params
    report = stability.analyze(
        params,
        n_max=int(opts.get("n_max", n_max)),
        self_consistent=bool(opts.get("self_consistent", False)),
    )
    exponents = [
        {"n": e.mode, "lambda_bar": e.lambda_bar, "multiplier": e.floquet_multiplier}
        for e in report.exponents
    ]
    _write_json(
        out / "report.json",
        {
            "params": _params_summary(params),
            "mu": params.mu,
            "sigma_tilde": params.sigma_tilde,
            "gamma": params.gamma,
            "T": params.period,
            "mu_star": report.mu_star,
            "self_consistent_mu_star": report.self_consistent_mu_star,
            "thresholds": list(report.thresholds),
            "exponents": exponents,
            "verdict": report.verdict.value,
        },
    )
    rows = []
    for e in report.exponents:
        theta = report.thresholds[e.mode - 2] if e.mode >= 2 else None
        rows.append((e.mode, "" if theta is None else _fmt(theta), e.lambda_bar))
    _write_csv(out / "modes.csv", ["n", "theta_n", "lambda_n"], rows)


def _sweep_row(args) -> dict:
    params, mu, sigma = args
    from dataclasses import replace

    row = {"mu": mu, "sigma_tilde": sigma, "error": ""}
    try:
        trial = replace(params, mu=mu, sigma_tilde=sigma)
        verdict = radial.classify_radial(trial)
        if verdict is Classification.EXTINCTION:
            row.update(verdict="Extinction", R_star0=None, theta2=None, lambda2=None)
            return row
        orbit = periodic_mod.find_periodic(trial)
        theta2 = stability.theta_n(orbit, 2)
        lambda2 = stability.mode_exponent(orbit, 2).lambda_bar
        if mu < theta2:
            stab = "LinearlyStable"
        elif mu > theta2:
            stab = "LinearlyUnstable"
        else:
            stab = "Marginal"
        row.update(verdict=stab, R_star0=orbit.R_star0, theta2=theta2, lambda2=lambda2)
    except TumordynError as exc:
        row.update(verdict="Error", R_star0=None, theta2=None, lambda2=None, error=str(exc))
    return row


def cmd_sweep(config: RunConfig, out: Path, workers: int) -> None:
    opts = config.options.get("sweep", {})
    mu_grid = [float(m) for m in opts.get("mu_grid", [config.params.mu])]
    sigma_grid = [float(s) for s in opts.get("sigma_grid", [config.params.sigma_tilde])]
    if not mu_grid or not sigma_grid:
        raise ConfigError("sweep grids must be non-empty")
    if any(b <= a for a, b in zip(mu_grid, mu_grid[1:])) or any(
        b <= a for a, b in zip(sigma_grid, sigma_grid[1:])
    ):
        raise ConfigError("sweep grids must be strictly increasing")

    jobs = [(config.params, mu, sigma) for sigma in sigma_grid for mu in mu_grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]

    if all(r["verdict"] == "Error" for r in rows):
        raise TumordynError("every sweep row failed")
    _write_csv(
        out / "sweep.csv",
        ["mu", "sigma_tilde", "verdict", "R_star0", "theta2", "lambda2", "error"],
        [
            (
                r["mu"],
                r["sigma_tilde"],
                r["verdict"],
                r["R_star0"],
                r["theta2"],
                r["lambda2"],
                r["error"],
            )
            for r in rows
        ],
    )


# ----------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tumordyn",
        description="Periodic tumor-radius dynamics and linear stability driver",
    )
    parser.add_argument("command", choices=["simulate", "periodic", "stability", "sweep"])
    parser.add_argument("--config", required=True, type=Path, help="JSON run config")
    parser.add_argument("--out", required=True, type=Path, help="output directory")
    parser.add_argument("--workers", type=int, default=1, help="sweep worker count")
    parser.add_argument("--tol-rtol", type=float, default=1e-10)
    parser.add_argument("--tol-atol", type=float, default=1e-12)
    parser.add_argument("--n-max", type=int, default=32)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.tol_rtol <= 0 or args.tol_atol <= 0 or args.workers < 1:
            raise ConfigError("tolerances must be positive and workers >= 1")
        config = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            cmd_simulate(config, out, args.tol_rtol, args.tol_atol)
        elif args.command == "periodic":
            cmd_periodic(config, out)
        elif args.command == "stability":
            cmd_stability(config, out, args.n_max)
        else:
            cmd_sweep(config, out, args.workers)
    except (ConfigError, ScheduleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoPeriodicSolutionError as exc:
        print(f"error: no positive periodic solution ({exc})", file=sys.stderr)
        return 1
    except TumordynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
