"""Conserved quantities, combined norms, and the stability index d(omega).

The conserved mass is F = int (P^2 + Q^2) dx with P, Q the real and
imaginary parts of u, with no 1/2 factor, so d'(omega) = F(Psi_omega)
holds literally.  The energy is

    E = int { P_x^2 + Q_x^2 + v_x^2/2 + v^2/2 + w^2/2 - v (P^2 + Q^2) } dx,

and the combined norm tracking the long-wave component is

    ||v||_B(s)^2 = ||v||_{H^s}^2 + ||(-Lap)^{-1/2} v_t||_{H^{s-1}}^2,

with v_t = w_x and [(-Lap)^{-1/2} f]^hat(n) = |n|^{-1} fhat(n) for n != 0.

All quadratures are spectral trapezoid sums (exact for trigonometric
polynomials on the grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cnoidal import WaveProfile, build_wave
from .elliptic import complete_elliptic
from .errors import UsageError
from .grid import SpectralField, sobolev_norm, sobolev_product

_MEAN_TOL = 1e-12


@dataclass(frozen=True)
class ConservedReport:
    """Monitored invariants of one evolution snapshot."""

    time: float
    mass: float
    energy: float
    b_norm: float


@dataclass(frozen=True)
class StabilityIndex:
    """d'(omega), d''(omega) and the closed-form ingredients at one branch point."""

    omega: float
    d_prime: float
    d_second: float
    d_second_fd: float
    G: float
    H: float

    def csv_row(self):
        return (self.omega, self.d_prime, self.d_second, self.d_second_fd)


def mass(u: SpectralField) -> float:
    """F = int |u|^2 dx = L * sum |uhat(n)|^2 (Parseval, 1/L convention)."""
    return float(u.grid.L * np.sum(np.abs(u.coeffs) ** 2))


def _dx_values(grid, coeffs):
    sym = 1j * grid.xi.copy()
    sym[grid.N // 2] = 0.0
    return np.real(grid.values_of(sym * coeffs))


def energy(state) -> float:
    """The Hamiltonian energy of an (u, v, w) state (duck-typed SBState)."""
    g = state.grid
    u = g.values_of(state.u_hat)
    v = np.real(g.values_of(state.v_hat))
    w = np.real(g.values_of(state.w_hat))
    P, Q = u.real, u.imag
    Px = _dx_values(g, g.coeffs_of(P))
    Qx = _dx_values(g, g.coeffs_of(Q))
    vx = _dx_values(g, state.v_hat)
    integrand = Px**2 + Qx**2 + 0.5 * vx**2 + 0.5 * v**2 + 0.5 * w**2 - v * (P**2 + Q**2)
    return float(integrand.sum() * (g.L / g.N))


def b_norm(v: SpectralField, w: SpectralField, s: float = 0.0) -> float:
    """Combined norm of (v, v_t) with v_t = w_x; w must have zero mean."""
    if v.grid != w.grid:
        raise UsageError("b_norm requires v and w on a shared grid")
    scale = 1.0 + np.abs(w.coeffs).max()
    if np.abs(w.coeffs[0]) > _MEAN_TOL * scale:
        raise UsageError(f"w must have zero mean, got what(0) = {w.coeffs[0]:.3e}")
    g = v.grid
    first = sobolev_product(v, v, s)
    # [(-Lap)^{-1/2} d_x w]^hat(n) = (|xi_n| / |n|) what(n) = (2 pi / L) what(n), n != 0
    nz = g.n != 0
    weights = (1.0 + np.abs(g.n[nz])) ** (2.0 * (s - 1.0))
    second = (2.0 * np.pi / g.L) ** 2 * np.sum(weights * np.abs(w.coeffs[nz]) ** 2)
    return float(math.sqrt(max(first + second, 0.0)))


def b_norm_pair(v0: SpectralField, v1: SpectralField, s: float = 0.0) -> float:
    """Initial-data norm ||v0, v1||_B(s) = sqrt(||v0||_{H^s}^2 + ||v1||_{H^{s-1}}^2)."""
    return float(
        math.sqrt(sobolev_product(v0, v0, s) + sobolev_product(v1, v1, s - 1.0))
    )


def wave_mean_integral(profile: WaveProfile) -> float:
    """int_0^L psi dx by the spectral trapezoid rule."""
    g = profile.field.grid
    return float(profile.psi.sum() * (g.L / g.N))


def d_prime(omega: float, L: float, n_modes: int = 256) -> float:
    """d'(omega) = F(Psi_omega) = int psi_omega^2 dx."""
    profile = build_wave(omega, L, n_modes)
    g = profile.field.grid
    return float((profile.psi**2).sum() * (g.L / g.N))


def h_of_k(k: float, L: float) -> float:
    """Closed form H(k) with int_0^L psi dx = H(k(omega)) along the branch."""
    pair = complete_elliptic(k)
    K, E = pair.K, pair.E
    S = math.sqrt(k**4 - k**2 + 1.0)
    return 8.0 * K * K / L * (S - 2.0 + k * k) + 24.0 * K * E / L


def dh_dk(k: float, L: float) -> float:
    """Derivative of h_of_k via dK/dk and dE/dk."""
    pair = complete_elliptic(k)
    K, E = pair.K, pair.E
    kp2 = 1.0 - k * k
    dK = (E - kp2 * K) / (k * kp2)
    dE = (E - K) / k
    S = math.sqrt(k**4 - k**2 + 1.0)
    dS = k * (2.0 * k * k - 1.0) / S
    return (
        16.0 * K * dK / L * (S - 2.0 + k * k)
        + 8.0 * K * K / L * (dS + 2.0 * k)
        + 24.0 * (dK * E + K * dE) / L
    )


def beta2_closed_form(k: float, L: float) -> float:
    """beta2 = (8 K^2 / L^2) [sqrt(k^4 - k^2 + 1) + 1 - 2 k^2] along the branch."""
    K = complete_elliptic(k).K
    S = math.sqrt(k**4 - k**2 + 1.0)
    return 8.0 * K * K / (L * L) * (S + 1.0 - 2.0 * k * k)


def d_second(omega: float, L: float, n_modes: int = 256, delta: float = 1e-5) -> StabilityIndex:
    """d''(omega) = dG/domega with G(omega) = omega * int psi_omega dx.

    Computed two ways: (a) the analytic chain rule
    dG/domega = int psi + omega * dH/dk * dk/domega with dk/domega by
    central branch differencing, and (b) a central difference of G itself.
    Both are recorded in the returned StabilityIndex.
    """
    profile = build_wave(omega, L, n_modes)
    k = profile.params.k.k
    int_psi = wave_mean_integral(profile)
    g = profile.field.grid
    dp = float((profile.psi**2).sum() * (g.L / g.N))

    plus = build_wave(omega + delta, L, n_modes)
    minus = build_wave(omega - delta, L, n_modes)
    dk_dom = (plus.params.k.k - minus.params.k.k) / (2.0 * delta)
    analytic = int_psi + omega * dh_dk(k, L) * dk_dom

    g_plus = (omega + delta) * wave_mean_integral(plus)
    g_minus = (omega - delta) * wave_mean_integral(minus)
    fd = (g_plus - g_minus) / (2.0 * delta)

    return StabilityIndex(
        omega=omega,
        d_prime=dp,
        d_second=analytic,
        d_second_fd=fd,
        G=omega * int_psi,
        H=h_of_k(k, L),
    )
