"""Cnoidal construction tests.

Oracles: the quadratic solved by hand for the root examples, shooting
integration of the profile equation for the period, and the sech^2
solitary profile for the long-period limit.
"""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from sbwave.cnoidal import (
    branch_sample,
    build_wave,
    ode_residual,
    params_for,
    period,
    period_infimum,
    roots_from_beta2,
    sample_profile,
    solve_beta2,
)
from sbwave.errors import DomainError, NoSolutionError, ResolutionError

# frozen: period(beta2=1, omega0=1) = 2*sqrt(6)/sqrt(2*sqrt(3)) * K(sqrt(1/2)),
# confirmed by the shooting oracle below to 8e-12
PERIOD_1_1 = 4.880199001739228


def shooting_period(beta2, omega0):
    """Integrate psi'' = omega*psi - psi^2 from the crest and time the return."""
    beta1, beta3, _, _ = roots_from_beta2(beta2, omega0)
    omega = 2.0 * omega0
    sol = solve_ivp(
        lambda t, y: [y[1], omega * y[0] - y[0] ** 2],
        [0.0, 50.0],
        [beta3, 0.0],
        rtol=1e-12,
        atol=1e-12,
        dense_output=True,
    )
    dpsi = lambda t: sol.sol(t)[1]
    ts = np.linspace(0.05, 50.0, 5000)
    vals = dpsi(ts)
    idx = np.nonzero(np.diff(np.sign(vals)))[0][0]
    t_half = brentq(dpsi, ts[idx], ts[idx + 1], xtol=1e-12)
    return 2.0 * t_half


class TestRoots:
    def test_hand_solved_quadratic(self):
        beta1, beta3, rho, mod = roots_from_beta2(1.0, 1.0)
        assert beta1 == pytest.approx(1.0 - math.sqrt(3.0), rel=1e-14)
        assert beta3 == pytest.approx(1.0 + math.sqrt(3.0), rel=1e-14)
        assert rho == pytest.approx(2.0 * math.sqrt(3.0), rel=1e-14)
        assert mod.k2 == pytest.approx(0.5, abs=1e-14)

    def test_rho_two_ways(self):
        for beta2 in np.linspace(0.05, 1.95, 21):
            beta1, beta3, rho, _ = roots_from_beta2(float(beta2), 1.0)
            assert abs((beta3 - beta1) - rho) <= 1e-12 * rho

    def test_vieta(self):
        beta1, beta3, _, _ = roots_from_beta2(0.7, 0.9)
        beta2, omega0 = 0.7, 0.9
        assert beta1 + beta2 + beta3 == pytest.approx(3 * omega0, rel=1e-13)
        assert beta1 * beta2 + beta1 * beta3 + beta2 * beta3 == pytest.approx(0.0, abs=1e-12)

    def test_modulus_limits(self):
        # beta2 -> 2*omega0 sends k^2 -> 0; beta2 -> 0 sends k^2 -> 1
        _, _, _, near_zero = roots_from_beta2(2.0 - 1e-6, 1.0)
        assert near_zero.k2 == pytest.approx(0.0, abs=1e-6)
        _, _, _, near_one = roots_from_beta2(1e-6, 1.0)
        assert near_one.k2 == pytest.approx(1.0, abs=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            roots_from_beta2(0.0, 1.0)
        with pytest.raises(DomainError):
            roots_from_beta2(2.5, 1.0)


class TestPeriod:
    def test_frozen_value(self):
        assert period(1.0, 1.0) == pytest.approx(PERIOD_1_1, rel=1e-14)

    def test_shooting_oracle(self):
        for beta2, omega0 in [(1.0, 1.0), (0.4, 0.7)]:
            assert period(beta2, omega0) == pytest.approx(
                shooting_period(beta2, omega0), abs=1e-9
            )

    def test_infimum_limit(self):
        # T -> sqrt(2) pi / sqrt(omega0) as beta2 -> 2 omega0
        for omega0 in (0.5, 1.0, 2.0):
            lim = period_infimum(omega0)
            assert period(2 * omega0 - 1e-8, omega0) == pytest.approx(lim, abs=1e-6)

    def test_divergence_limit(self):
        # T -> +infinity as beta2 -> 0 (logarithmically: K ~ ln(4/k'))
        assert period(1e-30, 1.0) > 50.0
        assert period(1e-12, 1.0) > period(1e-6, 1.0) > period(1e-3, 1.0)

    def test_monotone_decreasing(self):
        betas = np.linspace(1e-4, 2.0 - 1e-4, 1000)
        periods = np.array([period(float(b), 1.0) for b in betas])
        assert np.all(np.diff(periods) < 0.0)


class TestSolveBeta2:
    def test_period_recovered(self):
        beta2 = solve_beta2(13.0, 1.0)
        assert 0.0 < beta2 < 2.0
        assert abs(period(beta2, 1.0) - 13.0) <= 1e-10

    def test_near_infimum(self):
        omega0 = 2 * math.pi**2 / 169.0 * 1.0001
        beta2 = solve_beta2(13.0, omega0)
        assert beta2 > 1.8 * omega0  # pushed toward the k -> 0 end
        assert abs(period(beta2, omega0) - 13.0) <= 1e-10

    def test_no_solution(self):
        L = 2 * math.pi
        with pytest.raises(NoSolutionError):
            solve_beta2(L, 2 * math.pi**2 / L**2)

    def test_admissible_grid(self):
        # the full (L, omega0) property: 5 periods x 4 frequencies
        for L in (7.0, 9.5, 13.0, 21.0, 40.0):
            for omega0 in (0.35, 0.5, 1.0, 1.7):
                if omega0 <= 2 * math.pi**2 / L**2:
                    continue
                beta2 = solve_beta2(L, omega0)
                assert abs(period(beta2, omega0) - L) <= 1e-10 * L


class TestBuildWave:
    def test_residual(self):
        profile = build_wave(1.0, 13.0, 256)
        assert ode_residual(profile) <= 1e-8

    def test_positive_and_ranged(self):
        profile = build_wave(2.0, 13.0, 256)
        p = profile.params
        psi = profile.psi
        assert psi.min() > 0.0
        assert psi.min() == pytest.approx(p.beta2, rel=1e-10)
        assert psi.max() == pytest.approx(p.beta3, rel=1e-10)
        # trough at the half period
        mid = np.argmin(psi)
        assert profile.field.grid.x[mid] == pytest.approx(13.0 / 2, abs=13.0 / 256)

    def test_even_about_origin(self):
        profile = build_wave(1.0, 13.0, 256)
        psi = profile.psi
        np.testing.assert_allclose(psi[1:], psi[:0:-1], atol=1e-12)

    def test_ordering_invariant(self):
        p = build_wave(1.3, 13.0, 128).params
        assert p.beta1 < 0 < p.beta2 < p.omega < p.beta3 < 1.5 * p.omega

    def test_a_psi_is_product_third(self):
        p = build_wave(1.0, 13.0, 128).params
        assert p.A_psi == pytest.approx(p.beta1 * p.beta2 * p.beta3 / 3.0, rel=1e-14)

    def test_coefficient_tail(self):
        profile = build_wave(1.0, 13.0, 256)
        assert profile.field.resolution_tail() <= 1e-13

    def test_sech_limit(self):
        # at L = 200 the profile near the crest matches (3w/2) sech^2(sqrt(w) x / 2)
        profile = build_wave(1.0, 200.0, 2048)
        x = profile.field.grid.x[:64]
        sech = 1.5 / np.cosh(0.5 * x) ** 2
        np.testing.assert_allclose(profile.psi[:64], sech, atol=1e-4)

    def test_under_resolved(self):
        with pytest.raises(ResolutionError):
            build_wave(1.0, 200.0, 32)

    def test_preconditions(self):
        with pytest.raises(DomainError):
            build_wave(1.0, 13.0, 100)
        with pytest.raises(DomainError):
            build_wave(1.0, 13.0, 16)
        with pytest.raises(DomainError):
            build_wave(0.1, 13.0, 256)  # omega below 4 pi^2 / L^2

    def test_profile_samples_match_closed_form(self):
        params = params_for(1.0, 13.0)
        xs = np.array([0.0, 1.0, 3.3])
        vals = sample_profile(params, xs)
        assert vals[0] == pytest.approx(params.beta3, rel=1e-14)


class TestBranch:
    def test_modulus_increases_with_omega(self):
        profiles = branch_sample(13.0, [0.8, 1.0, 1.2], 256)
        ks = [p.params.k.k for p in profiles]
        assert ks[0] < ks[1] < ks[2]

    def test_single_element_consistency(self):
        a = branch_sample(13.0, [1.0], 256)[0]
        b = build_wave(1.0, 13.0, 256)
        np.testing.assert_allclose(a.psi, b.psi, atol=0)

    def test_branch_continuity(self):
        h = 1e-4
        a, b = branch_sample(13.0, [1.0, 1.0 + h], 256)
        gap = np.abs(a.psi - b.psi).max()
        assert gap <= 1e-2
        a2, b2 = branch_sample(13.0, [1.0, 1.0 + h / 2], 256)
        gap2 = np.abs(a2.psi - b2.psi).max()
        assert gap2 <= 0.75 * gap  # roughly linear in the omega increment
