"""Fourier-truncated linearized operators around a wave and their spectra.

Four self-adjoint operators are assembled in the complex-exponential
Fourier basis, where -d2/dx2 is diagonal and multiplication by the
(real, even) profile is a Toeplitz convolution with its coefficients:

    L1 = -d2 + omega - 2*psi          (kernel candidate psi')
    L2 = -d2 + omega - psi            (kernel candidate psi)
    AR = [[2*(-d2 + omega - phi), -2*psi], [-2*psi, -d2 + 1]]
    AI = [[2*(-d2 + omega - phi), 0], [0, I]]

At omega = 1 with phi = psi these are the literal linearizations around
the explicit wave; passing a continuation pair (psi_omega, phi_omega)
reuses the same assembly along the branch, where AR annihilates
(psi', phi') and AI annihilates (psi, 0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergenceError, ResolutionError, UsageError
from .grid import RESOLUTION_TOL, SpectralField

KINDS = ("L1", "L2", "AR", "AI")

#: zero-eigenvalue tolerance is this fraction of 1 + |lambda_max|
ZERO_TOL_FACTOR = 1e-7


@dataclass(frozen=True)
class Spectrum:
    """Low-lying eigenpairs of one assembled operator."""

    kind: str
    omega: float
    L: float
    N: int
    eigenvalues: np.ndarray
    eigenvectors: list  # grid-sampled functions, (N,) or (2, N) arrays
    coeff_vectors: np.ndarray  # raw orthonormal coefficient vectors, columns
    n_negative: int
    n_zero: int
    zero_tol: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "omega": self.omega,
            "L": self.L,
            "N": self.N,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "inertia": {
                "negative": self.n_negative,
                "zero": self.n_zero,
                "zero_tol": self.zero_tol,
            },
        }


def _unpack(wave):
    """(omega, psi_field, phi_field) from a WaveProfile or a continuation pair."""
    if hasattr(wave, "phi"):  # continuation SolutionPair
        return float(wave.omega), wave.psi, wave.phi
    psi = wave.field
    return float(wave.params.omega), psi, psi


def _mult_matrix(field: SpectralField) -> np.ndarray:
    """Toeplitz convolution matrix of multiplication by a real even field."""
    g = field.grid
    c = field.coeffs
    if np.abs(c.imag).max() > 1e-10 * (1.0 + np.abs(c).max()):
        raise UsageError("multiplication potential must be real and even")
    diff = g.n[:, None] - g.n[None, :]
    M = np.zeros((g.N, g.N))
    inside = np.abs(diff) <= g.N // 2 - 1
    M[inside] = c.real[diff[inside] % g.N]
    return M


def assemble(kind: str, wave) -> np.ndarray:
    """Dense real symmetric matrix of the requested operator.

    `wave` is a cnoidal WaveProfile (phi = psi) or a continuation pair
    with attributes omega/psi/phi.  Raises ResolutionError when the
    profile's spectrum has not decayed on its grid.
    """
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")
    omega, psi, phi = _unpack(wave)
    for f in (psi, phi):
        if f.resolution_tail() > RESOLUTION_TOL:
            raise ResolutionError(f"wave unresolved: tail {f.resolution_tail():.3e}")
    g = psi.grid
    D2 = np.diag(g.xi**2)
    I = np.eye(g.N)
    P = _mult_matrix(psi)
    if kind == "L1":
        return D2 + omega * I - 2.0 * P
    if kind == "L2":
        return D2 + omega * I - P
    Q = P if phi is psi else _mult_matrix(phi)
    top = 2.0 * (D2 + omega * I - Q)
    if kind == "AR":
        return np.block([[top, -2.0 * P], [-2.0 * P, D2 + I]])
    return np.block([[top, np.zeros((g.N, g.N))], [np.zeros((g.N, g.N)), I]])


def _parity_projector(grid, blocks: int, parity: str) -> np.ndarray:
    """Orthonormal basis of the even (cosine) or odd (sine) coefficient subspace."""
    N = grid.N
    cols = []
    base = np.zeros(N)
    if parity == "even":
        e0 = base.copy()
        e0[0] = 1.0
        cols.append(e0)
        for m in range(1, N // 2):
            v = base.copy()
            v[m] = v[N - m] = 1.0 / np.sqrt(2.0)
            cols.append(v)
        eny = base.copy()
        eny[N // 2] = 1.0
        cols.append(eny)
    elif parity == "odd":
        for m in range(1, N // 2):
            v = base.copy()
            v[m] = 1.0 / np.sqrt(2.0)
            v[N - m] = -1.0 / np.sqrt(2.0)
            cols.append(v)
    else:
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    P1 = np.stack(cols, axis=1)
    if blocks == 1:
        return P1
    Z = np.zeros_like(P1)
    return np.block([[P1, Z], [Z, P1]])


def spectrum(kind: str, wave, m: int, parity: str | None = None) -> Spectrum:
    """The m lowest eigenpairs of the operator, with inertia counts.

    The dense symmetric eigensolve runs on the full Fourier truncation
    (optionally restricted to one parity subspace).  zero_tol defaults to
    ZERO_TOL_FACTOR * (1 + |lambda|_max) over the computed spectrum.
    """
    omega, psi, _ = _unpack(wave)
    A = assemble(kind, wave)
    g = psi.grid
    if parity is not None:
        P = _parity_projector(g, 2 if kind in ("AR", "AI") else 1, parity)
        A = P.T @ A @ P
    if m > A.shape[0]:
        raise DomainError(f"requested {m} eigenpairs of a {A.shape[0]}-dim matrix")
    try:
        vals, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NonConvergenceError(f"eigensolver failed for {kind}: {exc}") from exc
    if parity is not None:
        vecs = P @ vecs
    zero_tol = ZERO_TOL_FACTOR * (1.0 + float(np.abs(vals).max()))
    n_negative = int(np.sum(vals < -zero_tol))
    n_zero = int(np.sum(np.abs(vals) <= zero_tol))
    grid_vecs = []
    scale = 1.0 / np.sqrt(g.L)  # unit norm in the discrete L^2 pairing
    for j in range(m):
        v = vecs[:, j].astype(complex) * scale
        if kind in ("AR", "AI"):
            grid_vecs.append(np.stack([g.values_of(v[: g.N]), g.values_of(v[g.N :])]))
        else:
            grid_vecs.append(g.values_of(v))
    return Spectrum(
        kind=kind,
        omega=omega,
        L=g.L,
        N=g.N,
        eigenvalues=vals[:m].copy(),
        eigenvectors=grid_vecs,
        coeff_vectors=vecs[:, :m].copy(),
        n_negative=n_negative,
        n_zero=n_zero,
        zero_tol=zero_tol,
    )


def kernel_candidate(kind: str, wave) -> np.ndarray:
    """Coefficient vector of the analytic kernel element for this operator."""
    omega, psi, phi = _unpack(wave)
    g = psi.grid
    dsym = 1j * g.xi.copy()
    dsym[g.N // 2] = 0.0
    dpsi = dsym * psi.coeffs
    if kind == "L1":
        return dpsi
    if kind == "L2":
        return psi.coeffs.copy()
    if kind == "AR":
        return np.concatenate([dpsi, dsym * phi.coeffs])
    return np.concatenate([psi.coeffs, np.zeros(g.N, dtype=complex)])


def kernel_check(kind: str, wave) -> dict:
    """Residual norm ||A v|| / ||v|| for the analytic kernel candidate."""
    A = assemble(kind, wave)
    v = kernel_candidate(kind, wave)
    r = float(np.linalg.norm(A @ v) / np.linalg.norm(v))
    names = {"L1": "psi'", "L2": "psi", "AR": "(psi', phi')", "AI": "(psi, 0)"}
    return {"kind": kind, "candidate": names[kind], "residual": r}


def cosine_similarity(u, v) -> float:
    """|<u, v>| / (||u|| ||v||) for complex coefficient or grid vectors."""
    u = np.asarray(u).ravel()
    v = np.asarray(v).ravel()
    return float(np.abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v)))
