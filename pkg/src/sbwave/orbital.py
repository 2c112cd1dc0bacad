"""Symmetry-reduced distance to the traveling-wave orbit and stability runs.

The distance of a state (u, v, v_t) to the orbit of a reference wave
(psi, phi, 0) is the infimum over phase s and shift y of the
X = H^1 x H^1 x L^2 norm of

    (u - e^{is} psi(. + y),  v - phi(. + y),  v_t - 0),

with v_t recovered as w_x.  For each shift the optimal phase is the
closed form s = arg <u, psi(. + y)>_{H^1}; the shift search scans all N
grid offsets through one FFT cross-correlation and then refines the best
candidate by golden-section.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, UsageError
from .evolution import SBState, SolverConfig, evolve
from .grid import SpectralField, sobolev_product

_GOLDEN_TOL = 1e-8
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OrbitalDistanceResult:
    distance: float
    best_phase: float
    best_shift: float


def _reference(wave):
    """(psi, phi) coefficient arrays from a WaveProfile or continuation pair."""
    if hasattr(wave, "phi"):
        return wave.psi, wave.phi
    return wave.field, wave.field


def x_distance(state: SBState, wave) -> OrbitalDistanceResult:
    """Distance from a state to the symmetry orbit of (psi, phi, 0)."""
    psi, phi = _reference(wave)
    g = state.grid
    if psi.grid != g:
        raise GridMismatchError("state and reference wave must share a grid")

    n = g.n
    w1 = (1.0 + np.abs(n)) ** 2
    u, v = state.u_hat, state.v_hat
    # v_t = w_x, with the odd-derivative Nyquist convention
    dsym = 1j * g.xi.copy()
    dsym[g.N // 2] = 0.0
    vt = dsym * state.w_hat

    uu = float(np.sum(w1 * np.abs(u) ** 2))
    pp = float(np.sum(w1 * np.abs(psi.coeffs) ** 2))
    vv = float(np.sum(w1 * np.abs(v) ** 2))
    ff = float(np.sum(w1 * np.abs(phi.coeffs) ** 2))
    tt = float(np.sum(np.abs(vt) ** 2))

    cu = w1 * u * np.conj(psi.coeffs)
    cv = w1 * v * np.conj(phi.coeffs)

    def objective_terms(y):
        ph = np.exp(-2j * np.pi * n * y / g.L)
        gu = complex(np.sum(cu * ph))
        gv = float(np.real(np.sum(cv * ph)))
        return uu + pp - 2.0 * abs(gu) + vv + ff - 2.0 * gv + tt, gu

    # coarse scan over all grid shifts via FFT: sum_n c_n e^{-2 pi i n j / N}
    gu_all = np.fft.fft(cu)
    gv_all = np.real(np.fft.fft(cv))
    obj_all = uu + pp - 2.0 * np.abs(gu_all) + vv + ff - 2.0 * gv_all + tt
    j0 = int(np.argmin(obj_all))
    y0 = j0 * g.L / g.N

    a = y0 - g.L / g.N
    b = y0 + g.L / g.N
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = objective_terms(c)[0]
    fd = objective_terms(d)[0]
    while (b - a) > _GOLDEN_TOL:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = objective_terms(c)[0]
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = objective_terms(d)[0]
    y_best = 0.5 * (a + b)
    obj, gu = objective_terms(y_best)
    if obj_all[j0] < obj:  # golden refinement never beats the scan only by noise
        y_best, obj, gu = y0, float(obj_all[j0]), complex(gu_all[j0])
    return OrbitalDistanceResult(
        distance=math.sqrt(max(obj, 0.0)),
        best_phase=float(np.angle(gu) % (2.0 * math.pi)),
        best_shift=float(y_best % g.L),
    )


def x_norm_of(du: SpectralField, dv: SpectralField, dvt: SpectralField) -> float:
    """The product-space norm sqrt(||du||_{H^1}^2 + ||dv||_{H^1}^2 + ||dvt||^2)."""
    return math.sqrt(
        sobolev_product(du, du, 1.0)
        + sobolev_product(dv, dv, 1.0)
        + sobolev_product(dvt, dvt, 0.0)
    )


def random_x_perturbation(grid, eps: float, seed: int, max_mode: int | None = None):
    """Seeded trigonometric-polynomial perturbation of X-size eps.

    Returns coefficient arrays (du, dv, dw): du complex, dv and dw real
    fields (dw zero-mean), supported on modes |n| <= max_mode
    (default N/4) and normalized so that ||(du, dv, d_x dw)||_X = eps.
    """
    if max_mode is None:
        max_mode = grid.N // 4
    rng = np.random.default_rng(seed)
    act = np.abs(grid.n) <= max_mode

    du = np.where(act, rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N), 0.0)

    def real_field(zero_mean=False):
        c = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
        c = np.where(act, c, 0.0)
        mirrored = np.conj(np.roll(c[::-1], 1))
        c = 0.5 * (c + mirrored)
        if zero_mean:
            c[0] = 0.0
        return c

    dv = real_field()
    dw = real_field(zero_mean=True)

    dsym = 1j * grid.xi.copy()
    dsym[grid.N // 2] = 0.0
    w1 = (1.0 + np.abs(grid.n)) ** 2
    size = math.sqrt(
        float(np.sum(w1 * np.abs(du) ** 2))
        + float(np.sum(w1 * np.abs(dv) ** 2))
        + float(np.sum(np.abs(dsym * dw) ** 2))
    )
    scale = eps / size if size > 0 else 0.0
    return du * scale, dv * scale, dw * scale


def stability_experiment(
    eps: float,
    T: float,
    n_snapshots: int,
    cfg: SolverConfig,
    wave,
    seed: int = 0,
):
    """Distance to the orbit along a perturbed standing-wave trajectory.

    Starts from (psi, phi, 0) plus a seeded random perturbation of X-size
    eps and returns a list of (t, OrbitalDistanceResult) at n_snapshots
    times spanning [0, T].  Requires the focusing couplings
    alpha = beta = -1 of the traveling-wave ansatz.
    """
    if eps < 0:
        raise UsageError("eps must be nonnegative")
    if not (cfg.alpha == -1.0 and cfg.beta == -1.0):
        raise UsageError("stability experiments require alpha = beta = -1")
    psi, phi = _reference(wave)
    g = psi.grid
    du, dv, dw = random_x_perturbation(g, eps, seed)
    state = SBState(
        0.0,
        g,
        psi.coeffs.astype(complex) + du,
        phi.coeffs.astype(complex) + dv,
        dw.astype(complex),
    )
    series = [(0.0, x_distance(state, wave))]
    times = np.linspace(0.0, T, n_snapshots)
    for t_target in times[1:]:
        seg = t_target - state.t
        result = evolve(state, seg, cfg)
        state = result.final
        series.append((state.t, x_distance(state, wave)))
    return series
