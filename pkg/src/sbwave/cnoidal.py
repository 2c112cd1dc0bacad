"""Cnoidal traveling-wave profiles of psi'' - omega*psi + psi^2 = 0.

The explicit solution with prescribed period L is

    psi(x) = beta2 + (beta3 - beta2) * cn^2(sqrt((beta3 - beta1)/6) x; k),
    k^2 = (beta3 - beta2) / (beta3 - beta1),

where beta1 < 0 < beta2 < omega < beta3 < 3*omega/2 are the quadrature
roots.  With omega0 = omega/2 the roots satisfy the Vieta relations
beta1 + beta2 + beta3 = 3*omega0 and beta1*beta2 + beta1*beta3
+ beta2*beta3 = 0, and the fundamental period is

    T(beta2; omega0) = 2*sqrt(6)/sqrt(rho) * K(k),
    rho = sqrt(9*omega0^2 - 3*beta2^2 + 6*omega0*beta2) = beta3 - beta1.

T is strictly decreasing in beta2 with limits T -> +inf (beta2 -> 0) and
T -> sqrt(2)*pi/sqrt(omega0) (beta2 -> 2*omega0), which makes the period
equation T = L uniquely solvable whenever omega0 > 2*pi^2/L^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticModulus, EllipticPair, complete_elliptic, jacobi
from .errors import DomainError, NoSolutionError, ResolutionError
from .grid import RESOLUTION_TOL, FourierGrid, SpectralField

#: bisection bracket is narrowed to this fraction of the beta2 interval
#: before the Newton polish
_BISECT_RTOL = 1e-13
_NEWTON_POLISH_STEPS = 2


@dataclass(frozen=True)
class WaveParams:
    """Cnoidal parametrization at one point of the branch."""

    omega: float
    omega0: float
    beta1: float
    beta2: float
    beta3: float
    k: EllipticModulus
    rho: float
    L: float
    A_psi: float
    integrals: EllipticPair

    def validate(self):
        # beta3 < 3*omega/2 holds strictly in exact arithmetic but the gap
        # (~beta2^2/(3*omega)) rounds to zero at the long-period end
        upper = 1.5 * self.omega * (1.0 + 1e-12)
        if not (self.beta1 < 0.0 < self.beta2 < self.omega < self.beta3 <= upper):
            raise DomainError(
                "root ordering beta1 < 0 < beta2 < omega < beta3 < 3*omega/2 violated: "
                f"({self.beta1}, {self.beta2}, {self.omega}, {self.beta3})"
            )
        return self


@dataclass(frozen=True)
class WaveProfile:
    """A cnoidal wave sampled on a Fourier grid."""

    params: WaveParams
    field: SpectralField

    @property
    def psi(self) -> np.ndarray:
        return self.field.real_values

    def to_dict(self) -> dict:
        p = self.params
        return {
            "omega": p.omega,
            "omega0": p.omega0,
            "beta1": p.beta1,
            "beta2": p.beta2,
            "beta3": p.beta3,
            "k": p.k.k,
            "k2": p.k.k2,
            "rho": p.rho,
            "L": p.L,
            "A_psi": p.A_psi,
            "K": p.integrals.K,
            "E": p.integrals.E,
            "N": p.field.grid.N,
        }


def roots_from_beta2(beta2: float, omega0: float):
    """Remaining quadrature roots for given beta2 and omega0 = omega/2.

    Solves the Vieta system beta1 + beta3 = 3*omega0 - beta2,
    beta1*beta3 = -beta2*(3*omega0 - beta2) and returns
    (beta1, beta3, rho, modulus) with beta1 < 0 < beta3.  The closed form
    rho = sqrt(9*omega0^2 - 3*beta2^2 + 6*omega0*beta2) is used for the
    modulus; it agrees with beta3 - beta1 identically.

    Near beta2 = 0 the complement k'^2 = 1 - k^2 collapses below machine
    epsilon; it is computed through the cancellation-free rearrangement
    k'^2 = (3*beta2 / 2*rho) * (1 + (2*omega0 - beta2)/(rho + 3*omega0))
    so the long-period (k -> 1) end of the branch stays fully resolved.
    """
    if not (0.0 < beta2 < 2.0 * omega0):
        raise DomainError(f"beta2 must lie in (0, 2*omega0), got beta2={beta2}, omega0={omega0}")
    s = 3.0 * omega0 - beta2
    rho = math.sqrt(9.0 * omega0**2 - 3.0 * beta2**2 + 6.0 * omega0 * beta2)
    beta3 = 0.5 * (s + rho)
    beta1 = -beta2 * s / beta3  # product form: (s - rho)/2 cancels at small beta2
    k2 = 0.5 + 3.0 * (omega0 - beta2) / (2.0 * rho)
    if k2 <= 0.5:
        mod = EllipticModulus.from_k2(max(k2, 0.0))
    else:
        kp2 = (3.0 * beta2 / (2.0 * rho)) * (1.0 + (2.0 * omega0 - beta2) / (rho + 3.0 * omega0))
        mod = EllipticModulus.from_complement_sq(min(kp2, 1.0))
    return beta1, beta3, rho, mod


def period(beta2: float, omega0: float) -> float:
    """Fundamental period T(beta2; omega0) = 2*sqrt(6)/sqrt(rho) * K(k)."""
    _, _, rho, mod = roots_from_beta2(beta2, omega0)
    return 2.0 * math.sqrt(6.0 / rho) * complete_elliptic(mod).K


def period_infimum(omega0: float) -> float:
    """Limit of the period as beta2 -> 2*omega0 (the k -> 0 end)."""
    return math.sqrt(2.0) * math.pi / math.sqrt(omega0)


def solve_beta2(L: float, omega0: float) -> float:
    """The unique beta2 in (0, 2*omega0) with period(beta2, omega0) = L.

    Bisection on the strictly decreasing period map, run in log(beta2)
    so the bracket reaches relative width 1e-13 uniformly down to the
    long-period end where beta2 is exponentially small, then two Newton
    polish steps with central-difference derivatives.  Raises
    NoSolutionError when omega0 <= 2*pi^2/L^2 (L at or below the period
    infimum).
    """
    if L <= 0 or omega0 <= 0:
        raise DomainError("L and omega0 must be positive")
    if L <= period_infimum(omega0):
        raise NoSolutionError(
            f"no beta2 solves T = {L}: need omega0 > 2*pi^2/L^2 = {2 * math.pi**2 / L**2:.6g}, "
            f"got omega0 = {omega0}"
        )
    width = 2.0 * omega0
    lo, hi = math.log(1e-280 * width), math.log(width * (1.0 - 1e-15))
    # T(exp(lo)) > L and T(exp(hi)) < L by the infimum check above
    while hi - lo > _BISECT_RTOL:
        mid = 0.5 * (lo + hi)
        if period(math.exp(mid), omega0) > L:
            lo = mid
        else:
            hi = mid
    b = math.exp(0.5 * (lo + hi))
    for _ in range(_NEWTON_POLISH_STEPS):
        hh = min(1e-7 * b, 0.5 * (width - b))
        slope = (period(b + hh, omega0) - period(b - hh, omega0)) / (2.0 * hh)
        step = (period(b, omega0) - L) / slope
        b_new = b - step
        if 0.0 < b_new < width:
            b = b_new
    return b


def params_for(omega: float, L: float) -> WaveParams:
    """WaveParams of the period-L branch point at frequency omega."""
    if omega <= 4.0 * math.pi**2 / L**2:
        raise DomainError(
            f"branch requires omega > 4*pi^2/L^2 = {4 * math.pi**2 / L**2:.6g}, got {omega}"
        )
    omega0 = 0.5 * omega
    beta2 = solve_beta2(L, omega0)
    beta1, beta3, rho, mod = roots_from_beta2(beta2, omega0)
    return WaveParams(
        omega=omega,
        omega0=omega0,
        beta1=beta1,
        beta2=beta2,
        beta3=beta3,
        k=mod,
        rho=rho,
        L=L,
        A_psi=beta1 * beta2 * beta3 / 3.0,
        integrals=complete_elliptic(mod),
    ).validate()


def sample_profile(params: WaveParams, x) -> np.ndarray:
    """Evaluate the closed-form profile at the points x (crest at x = 0)."""
    arg = math.sqrt(params.rho / 6.0) * np.asarray(x, dtype=float)
    _, cn, _ = jacobi(arg, params.k)
    return params.beta2 + (params.beta3 - params.beta2) * cn**2


def build_wave(omega: float, L: float, n_modes: int) -> WaveProfile:
    """Construct the period-L cnoidal wave at frequency omega on n_modes points.

    n_modes must be a power of two >= 32.  The profile is sampled from the
    closed form (never from ODE integration) and checked for spectral
    resolution; an unresolved grid raises ResolutionError.
    """
    if n_modes < 32 or n_modes & (n_modes - 1):
        raise DomainError(f"n_modes must be a power of two >= 32, got {n_modes}")
    params = params_for(omega, L)
    grid = FourierGrid(L, n_modes)
    field = SpectralField.from_values(grid, sample_profile(params, grid.x))
    if field.resolution_tail() > RESOLUTION_TOL:
        raise ResolutionError(
            f"cnoidal profile unresolved at N={n_modes}: "
            f"tail {field.resolution_tail():.3e} (omega={omega}, L={L})"
        )
    return WaveProfile(params=params, field=field)


def branch_sample(L: float, omegas, n_modes: int):
    """Profiles of the smooth branch omega -> psi_omega at the given omegas."""
    return [build_wave(float(om), L, n_modes) for om in omegas]


def ode_residual(profile: WaveProfile) -> float:
    """Sup norm of psi'' - omega*psi + psi^2 under spectral differentiation."""
    g = profile.field.grid
    sym = (1j * g.xi) ** 2
    d2 = np.real(g.values_of(sym * profile.field.coeffs))
    psi = profile.psi
    return float(np.abs(d2 - profile.params.omega * psi + psi**2).max())
