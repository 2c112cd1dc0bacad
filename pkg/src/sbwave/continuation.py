"""Newton continuation of even periodic solution pairs (psi, phi).

Solves the stationary system

    -psi'' + omega*psi - psi*phi = 0,
    -phi'' + phi - psi^2 = 0,

in the half-spectrum cosine basis, which enforces evenness exactly and
excludes the translation direction psi' by construction.  At omega = 1
the explicit cnoidal wave (psi_1, psi_1) solves the system; the branch
is followed from there by natural-parameter stepping with the Frechet
derivative

    [[-d2 + omega - phi, -psi], [-2*psi, -d2 + 1]],

a non-symmetric block operator solved by dense LU.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateJacobianError,
    DomainError,
    NonConvergenceError,
    UsageError,
)
from .grid import FourierGrid, SpectralField

_RESIDUAL_TOL = 1e-10
_MAX_NEWTON = 20
_GUESS_SUP = 0.1
_STEP_FLOOR_FACTOR = 64


@dataclass(frozen=True)
class SolutionPair:
    """An even solution pair of the stationary system at one omega."""

    omega: float
    psi: SpectralField
    phi: SpectralField
    residual_norm: float

    def to_row(self):
        return (
            self.omega,
            float(self.psi.real_values.min()),
            float(self.psi.real_values.max()),
            self.residual_norm,
        )


def even_coefficients(field: SpectralField) -> np.ndarray:
    """Cosine coefficients a_m, m = 0..N/2, of an even real field."""
    g = field.grid
    c = field.coeffs
    M = g.N // 2 + 1
    a = np.zeros(M)
    a[0] = c[0].real
    a[1 : M - 1] = 2.0 * c[1 : M - 1].real
    a[M - 1] = c[g.N // 2].real
    return a


def field_from_even(grid: FourierGrid, a: np.ndarray) -> SpectralField:
    """The even real field with cosine coefficients a_m."""
    M = grid.N // 2 + 1
    c = np.zeros(grid.N, dtype=complex)
    c[0] = a[0]
    c[1 : M - 1] = 0.5 * a[1 : M - 1]
    c[-1 : -(M - 1) : -1] = 0.5 * a[1 : M - 1]
    c[grid.N // 2] = a[M - 1]
    return SpectralField.from_coeffs(grid, c, is_real=True)


class _EvenWorkspace:
    """Cosine-basis transforms and multiplication matrices for one grid."""

    def __init__(self, grid: FourierGrid):
        self.grid = grid
        self.M = grid.N // 2 + 1
        self.xi2 = (2.0 * np.pi * np.arange(self.M) / grid.L) ** 2

    def to_grid(self, a):
        return field_from_even(self.grid, a).real_values

    def to_cos(self, values):
        return even_coefficients(SpectralField.from_values(self.grid, values))

    def mult_matrix(self, q_values):
        """Matrix of multiplication by the even function q in the cosine basis."""
        N, M = self.grid.N, self.M
        qh = np.real(np.fft.fft(q_values) / N)

        def qc(j):
            j = abs(j)
            return qh[j] if j <= N // 2 else 0.0

        out = np.zeros((M, M))
        for m in range(M):
            for j in range(M):
                if m == 0:
                    out[0, j] = qc(j)
                elif j == 0:
                    out[m, 0] = 2.0 * qc(m)
                else:
                    out[m, j] = qc(m - j) + qc(m + j)
        return out


def residual(omega: float, pair: SolutionPair):
    """The two residual fields of the stationary system, evaluated spectrally."""
    g = pair.psi.grid
    ws = _EvenWorkspace(g)
    a_psi = even_coefficients(pair.psi)
    a_phi = even_coefficients(pair.phi)
    r1, r2 = _residual_cos(ws, omega, a_psi, a_phi)
    return field_from_even(g, r1), field_from_even(g, r2)


def _residual_cos(ws, omega, a_psi, a_phi):
    psi = ws.to_grid(a_psi)
    phi = ws.to_grid(a_phi)
    r1 = ws.xi2 * a_psi + omega * a_psi - ws.to_cos(psi * phi)
    r2 = ws.xi2 * a_phi + a_phi - ws.to_cos(psi * psi)
    return r1, r2


def jacobian(omega: float, pair: SolutionPair) -> np.ndarray:
    """Frechet derivative in the cosine basis (non-symmetric, dense)."""
    ws = _EvenWorkspace(pair.psi.grid)
    return _jacobian_cos(ws, omega, even_coefficients(pair.psi), even_coefficients(pair.phi))


def _jacobian_cos(ws, omega, a_psi, a_phi):
    D2 = np.diag(ws.xi2)
    I = np.eye(ws.M)
    Mpsi = ws.mult_matrix(ws.to_grid(a_psi))
    Mphi = ws.mult_matrix(ws.to_grid(a_phi))
    return np.block([[D2 + omega * I - Mphi, -Mpsi], [-2.0 * Mpsi, D2 + I]])


def smallest_singular_value(omega: float, pair: SolutionPair) -> float:
    """Smallest singular value of the even-subspace Jacobian."""
    return float(np.linalg.svd(jacobian(omega, pair), compute_uv=False)[-1])


def pair_from_wave(profile) -> SolutionPair:
    """The explicit solution (psi, psi) of a cnoidal profile as a SolutionPair."""
    f = profile.field
    a = even_coefficients(f)
    r = _sup_residual(profile.params.omega, a, a, _EvenWorkspace(f.grid))
    return SolutionPair(omega=profile.params.omega, psi=f, phi=f, residual_norm=r)


def _sup_residual(omega, a_psi, a_phi, ws):
    r1, r2 = _residual_cos(ws, omega, a_psi, a_phi)
    return float(max(np.abs(ws.to_grid(r1)).max(), np.abs(ws.to_grid(r2)).max()))


def newton_solve(omega: float, guess: SolutionPair) -> SolutionPair:
    """Newton iteration at fixed omega from an even guess pair.

    Requires the guess residual to be small (sup norm <= 0.1) so the
    iteration starts in the local-convergence regime; raises
    DegenerateJacobianError on a singular Jacobian and
    NonConvergenceError (with the residual history) after 20 steps.
    """
    g = guess.psi.grid
    ws = _EvenWorkspace(g)
    a_psi = even_coefficients(guess.psi)
    a_phi = even_coefficients(guess.phi)
    history = [_sup_residual(omega, a_psi, a_phi, ws)]
    if history[0] > _GUESS_SUP:
        raise UsageError(
            f"guess residual {history[0]:.3e} exceeds the local-convergence bound {_GUESS_SUP}"
        )
    for _ in range(_MAX_NEWTON):
        if history[-1] <= _RESIDUAL_TOL:
            return SolutionPair(
                omega=omega,
                psi=field_from_even(g, a_psi),
                phi=field_from_even(g, a_phi),
                residual_norm=history[-1],
            )
        r1, r2 = _residual_cos(ws, omega, a_psi, a_phi)
        J = _jacobian_cos(ws, omega, a_psi, a_phi)
        rhs = -np.concatenate([r1, r2])
        try:
            delta = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError as exc:
            raise DegenerateJacobianError(
                f"singular Jacobian at omega = {omega}: {exc}"
            ) from exc
        cond_scale = np.abs(delta).max()
        if not np.isfinite(cond_scale) or cond_scale > 1e6:
            raise DegenerateJacobianError(
                f"Newton step of size {cond_scale:.3e} at omega = {omega}"
            )
        a_psi = a_psi + delta[: ws.M]
        a_phi = a_phi + delta[ws.M :]
        history.append(_sup_residual(omega, a_psi, a_phi, ws))
    raise NonConvergenceError(
        f"Newton did not reach {_RESIDUAL_TOL} in {_MAX_NEWTON} iterations "
        f"at omega = {omega}", history=history,
    )


def continue_branch(omegas, step_control: float, start: SolutionPair):
    """Solutions at every requested omega, walked outward from the start pair.

    `omegas` must contain the start pair's omega (where the explicit wave
    seeds the branch).  Between targets the continuation advances by at
    most step_control, halving the step on Newton failure down to
    step_control/64 before giving up with the last good omega reported.
    """
    if step_control <= 0:
        raise DomainError("step_control must be positive")
    targets = sorted(float(om) for om in omegas)
    om0 = start.omega
    if not any(abs(t - om0) < 1e-12 for t in targets):
        raise UsageError(f"omega range must contain the seed omega {om0}")

    solutions = {om0: start}

    def walk(direction):
        current = start
        goal_list = [t for t in targets if (t - om0) * direction > 1e-12]
        goal_list.sort(key=lambda t: abs(t - om0))
        for goal in goal_list:
            current = _walk_to(current, goal, step_control, direction)
            solutions[goal] = current

    def _walk_to(current, goal, h, direction):
        floor = h / _STEP_FLOOR_FACTOR
        om = current.omega
        while abs(goal - om) > 1e-14:
            step_len = min(h, abs(goal - om))
            while True:
                try:
                    nxt = newton_solve(om + direction * step_len, current)
                    break
                except (NonConvergenceError, DegenerateJacobianError, UsageError) as exc:
                    step_len /= 2.0
                    if step_len < floor:
                        raise NonConvergenceError(
                            f"continuation stalled at omega = {om} "
                            f"(last good point; target {goal}): {exc}"
                        ) from exc
            current = nxt
            om = current.omega
        return current

    walk(+1)
    walk(-1)
    return [solutions[t] for t in targets]
