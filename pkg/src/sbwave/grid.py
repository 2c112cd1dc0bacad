"""Equispaced periodic grid and Fourier-space field representation.

The Fourier convention carries 1/L in the forward transform,

    fhat(n) = (1/L) * int_0^L exp(-2*pi*i*n*x/L) f(x) dx,

so Sobolev-type norms are plain weighted l2 sums over the integer
wavenumber n.  Discretely, coeffs = fft(values)/N and
values = ifft(coeffs)*N.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridMismatchError, ResolutionError

#: relative coefficient size in the top tenth of the spectrum above which a
#: field counts as under-resolved
RESOLUTION_TOL = 1e-10


@dataclass(frozen=True)
class FourierGrid:
    """Equispaced N-point grid on [0, L) with its integer wavenumbers."""

    L: float
    N: int
    x: np.ndarray = field(init=False, repr=False, compare=False)
    n: np.ndarray = field(init=False, repr=False, compare=False)
    xi: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError(f"period must be positive, got {self.L}")
        if self.N < 4 or self.N & (self.N - 1):
            raise DomainError(f"N must be a power of two >= 4, got {self.N}")
        object.__setattr__(self, "x", np.arange(self.N) * (self.L / self.N))
        n = np.fft.fftfreq(self.N, d=1.0 / self.N).astype(int)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "xi", 2.0 * np.pi * n / self.L)

    def coeffs_of(self, values) -> np.ndarray:
        return np.fft.fft(np.asarray(values, dtype=complex)) / self.N

    def values_of(self, coeffs) -> np.ndarray:
        return np.fft.ifft(np.asarray(coeffs, dtype=complex)) * self.N


@dataclass(frozen=True)
class SpectralField:
    """A periodic function held jointly as samples and Fourier coefficients."""

    grid: FourierGrid
    values: np.ndarray
    coeffs: np.ndarray
    is_real: bool

    @classmethod
    def from_values(cls, grid: FourierGrid, values) -> "SpectralField":
        values = np.asarray(values)
        is_real = not np.iscomplexobj(values)
        values = values.astype(complex)
        return cls(grid, values, grid.coeffs_of(values), is_real)

    @classmethod
    def from_coeffs(cls, grid: FourierGrid, coeffs, is_real=None) -> "SpectralField":
        coeffs = np.asarray(coeffs, dtype=complex)
        if is_real is None:
            is_real = hermitian_defect(coeffs) < 1e-12 * (1.0 + np.abs(coeffs).max())
        return cls(grid, grid.values_of(coeffs), coeffs, bool(is_real))

    @property
    def real_values(self) -> np.ndarray:
        return self.values.real

    def resolution_tail(self) -> float:
        """Largest coefficient in the top tenth of |n|, relative to the peak."""
        c = np.abs(self.coeffs)
        peak = c.max()
        if peak == 0.0:
            return 0.0
        cut = int(0.9 * (self.grid.N // 2))
        return float(c[np.abs(self.grid.n) >= cut].max() / peak)


def hermitian_defect(coeffs) -> float:
    """Max deviation from the Hermitian symmetry of a real field's coefficients."""
    coeffs = np.asarray(coeffs)
    mirrored = np.conj(np.roll(coeffs[::-1], 1))  # index n -> -n
    return float(np.abs(coeffs - mirrored).max())


def _require_resolved(f: SpectralField, what: str):
    tail = f.resolution_tail()
    if tail > RESOLUTION_TOL:
        raise ResolutionError(
            f"{what}: relative coefficient tail {tail:.3e} exceeds {RESOLUTION_TOL:.0e}"
        )


def derivative(f: SpectralField, order: int) -> SpectralField:
    """Spectral derivative of integer order 1..4.

    Coefficients are multiplied by (i*xi_n)^order; the Nyquist mode is
    zeroed for odd orders to preserve real-field symmetry.  Raises
    ResolutionError when the input's spectrum has not decayed.
    """
    if order not in (1, 2, 3, 4):
        raise DomainError(f"derivative order must be in 1..4, got {order}")
    _require_resolved(f, "derivative")
    g = f.grid
    sym = (1j * g.xi) ** order
    if order % 2 == 1:
        sym = sym.copy()
        sym[g.N // 2] = 0.0
    return SpectralField(g, g.values_of(sym * f.coeffs), sym * f.coeffs, f.is_real)


def dealias(f: SpectralField) -> SpectralField:
    """Zero every coefficient with |n| > N/3 (the 2/3 rule)."""
    g = f.grid
    mask = np.abs(g.n) <= g.N // 3
    c = np.where(mask, f.coeffs, 0.0)
    return SpectralField(g, g.values_of(c), c, f.is_real)


def sobolev_product(f: SpectralField, g: SpectralField, s: float) -> float:
    """Real part of sum_n <n>^{2s} fhat(n) conj(ghat(n)), <n> = 1 + |n|.

    With f = g this is the squared H^s norm in the 1/L transform
    convention (so the s = 0 case equals (1/L) * int |f|^2 dx).
    """
    if f.grid != g.grid:
        raise GridMismatchError("sobolev_product requires a shared grid")
    w = (1.0 + np.abs(f.grid.n)) ** (2.0 * s)
    return float(np.real(np.sum(w * f.coeffs * np.conj(g.coeffs))))


def sobolev_norm(f: SpectralField, s: float) -> float:
    return float(np.sqrt(max(sobolev_product(f, f, s), 0.0)))


def shift(f: SpectralField, y: float) -> SpectralField:
    """The translate x -> f(x + y), exact in Fourier space."""
    g = f.grid
    c = f.coeffs * np.exp(2j * np.pi * g.n * y / g.L)
    return SpectralField(g, g.values_of(c), c, f.is_real)
