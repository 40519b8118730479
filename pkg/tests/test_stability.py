import math
from dataclasses import replace

import numpy as np
import pytest

from tumordyn import (
    NoPeriodicSolutionError,
    Verdict,
    analyze,
    convergence_rate,
    evolve_mode,
    find_periodic,
    mode_decay_bound_check,
    mode_exponent,
    mu_star,
    theta_n,
)


class TestThetaN:
    def test_strictly_increasing(self, default_orbit):
        thetas = [theta_n(default_orbit, n) for n in range(2, 33)]
        assert all(b > a for a, b in zip(thetas, thetas[1:]))

    def test_frozen_theta2(self, default_orbit):
        # frozen from a converged run on the default sinusoid orbit
        assert theta_n(default_orbit, 2) == pytest.approx(64.0499443, rel=1e-6)

    def test_low_modes_rejected(self, default_orbit):
        with pytest.raises(ValueError):
            theta_n(default_orbit, 1)
        with pytest.raises(ValueError):
            theta_n(default_orbit, 0)


class TestModeExponent:
    def test_lambda1_exactly_zero(self, default_orbit):
        assert abs(mode_exponent(default_orbit, 1).lambda_bar) <= 1e-11

    def test_lambda0_positive(self, default_params):
        for mu in (0.1, 1.0, 10.0):
            orbit = find_periodic(replace(default_params, mu=mu))
            assert mode_exponent(orbit, 0).lambda_bar > 0.0

    def test_lambda0_is_radial_contraction_rate(self, default_params, default_orbit):
        lam0 = mode_exponent(default_orbit, 0).lambda_bar
        fit = convergence_rate(
            default_params, 1.5 * default_orbit.R_star0, 150, orbit=default_orbit, burn_in=30
        )
        assert fit.delta_hat == pytest.approx(lam0, rel=1e-2)

    def test_multiplier_consistent(self, default_orbit):
        e = mode_exponent(default_orbit, 2)
        assert e.floquet_multiplier == pytest.approx(
            math.exp(-e.lambda_bar * default_orbit.period), rel=1e-14
        )

    def test_sign_equivalence_with_threshold(self, default_params):
        # Lambda_2 > 0 iff mu < theta_2(mu), on a grid straddling the flip
        # (at sigma_tilde = 0.5 the flip sits near mu ~ 0.426)
        params = replace(default_params, sigma_tilde=0.5)
        flipped = 0
        for mu in (0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 1.0):
            orbit = find_periodic(replace(params, mu=mu))
            lam2 = mode_exponent(orbit, 2).lambda_bar
            th2 = theta_n(orbit, 2)
            assert (lam2 > 0.0) == (mu < th2)
            flipped += mu > th2
        assert 0 < flipped < 7  # the grid genuinely straddles the threshold

    def test_frozen_exponent_on_orbit(self, default_orbit):
        assert mode_exponent(default_orbit, 2).lambda_bar == pytest.approx(
            1.70777, rel=1e-4
        )

    def test_bad_mode(self, default_orbit):
        with pytest.raises(ValueError):
            mode_exponent(default_orbit, -1)


class TestMuStar:
    def test_per_mu_equals_theta2(self, default_params, default_orbit):
        val, sc = mu_star(default_params, orbit=default_orbit)
        assert not sc
        assert val == pytest.approx(theta_n(default_orbit, 2), rel=1e-14)

    def test_constant_supply_self_consistent(self, constant_params, constant_orbit):
        # mu-independent orbit: both variants return the same threshold
        per_mu, _ = mu_star(constant_params, orbit=constant_orbit)
        sc_val, sc = mu_star(constant_params, self_consistent=True)
        assert sc
        assert sc_val == pytest.approx(per_mu, rel=1e-8)

    def test_self_consistent_root(self, sinusoid):
        from tumordyn import ModelParams

        params = ModelParams(mu=1.0, sigma_tilde=0.5, gamma=1.0, schedule=sinusoid)
        root, sc = mu_star(params, self_consistent=True)
        assert sc
        orbit = find_periodic(replace(params, mu=root))
        assert root == pytest.approx(theta_n(orbit, 2), rel=1e-6)

    def test_self_consistent_no_root(self, default_params):
        # at sigma_tilde = 0.9 the threshold outruns mu on the whole grid
        with pytest.raises(NoPeriodicSolutionError):
            mu_star(default_params, self_consistent=True)


class TestEvolveMode:
    def test_whole_period_envelope(self, default_orbit):
        for n in (0, 2, 3, 5):
            lam = mode_exponent(default_orbit, n).lambda_bar
            for k in (1, 5, 20):
                got = evolve_mode(default_orbit, n, 0, 1.0, k * default_orbit.period)
                assert got == pytest.approx(math.exp(-lam * k), rel=1e-9)

    def test_m_independent(self, default_orbit):
        vals = {m: evolve_mode(default_orbit, 3, m, 0.7, 2.3) for m in (-3, 0, 2)}
        assert len(set(vals.values())) == 1

    def test_continuity_at_period_boundary(self, default_orbit):
        eps = 1e-8
        below = evolve_mode(default_orbit, 2, 0, 1.0, 1.0 - eps)
        above = evolve_mode(default_orbit, 2, 0, 1.0, 1.0 + eps)
        assert below == pytest.approx(above, rel=1e-6)

    def test_bad_inputs(self, default_orbit):
        with pytest.raises(ValueError):
            evolve_mode(default_orbit, 2, 3, 1.0, 0.5)
        with pytest.raises(ValueError):
            evolve_mode(default_orbit, 2, 0, 1.0, -0.1)


class TestDecayBound:
    def test_floor_in_stable_regime(self, default_params, default_orbit):
        theta2 = theta_n(default_orbit, 2)
        report = mode_decay_bound_check(default_orbit, mu=0.5 * theta2)
        assert report.ok
        assert not report.nonpositive_modes
        assert report.delta_hat >= 0.95 * report.candidate_floor

    def test_rejects_unstable_regime(self, default_orbit):
        theta2 = theta_n(default_orbit, 2)
        with pytest.raises(ValueError):
            mode_decay_bound_check(default_orbit, mu=2.0 * theta2)


class TestAnalyze:
    def test_stable_verdict(self, default_params):
        report = analyze(default_params, n_max=8)
        assert report.verdict is Verdict.LINEARLY_STABLE
        assert report.mu_star == pytest.approx(64.0499443, rel=1e-6)
        assert len(report.thresholds) == 7
        assert len(report.exponents) == 9

    def test_unstable_verdict(self, default_params):
        # at sigma_tilde = 0.5 the threshold sits near 0.426, so mu = 1 is above it
        report = analyze(replace(default_params, sigma_tilde=0.5), n_max=4)
        assert report.verdict is Verdict.LINEARLY_UNSTABLE

    def test_marginal_verdict(self, constant_params):
        # constant supply: the orbit (and hence theta_2) does not move with mu,
        # so re-running exactly at the threshold lands in the marginal band
        base = analyze(constant_params, n_max=2)
        report = analyze(replace(constant_params, mu=base.mu_star), n_max=2)
        assert report.verdict is Verdict.MARGINAL
