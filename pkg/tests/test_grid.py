"""Spectral substrate tests: transforms, derivatives, dealiasing, norms."""

import numpy as np
import pytest

from sbwave.cnoidal import build_wave
from sbwave.errors import DomainError, GridMismatchError, ResolutionError
from sbwave.grid import (
    FourierGrid,
    SpectralField,
    dealias,
    derivative,
    hermitian_defect,
    shift,
    sobolev_norm,
    sobolev_product,
)


@pytest.fixture()
def grid():
    return FourierGrid(13.0, 128)


def smooth_random_field(grid, rng, width=10):
    c = np.zeros(grid.N, dtype=complex)
    act = np.abs(grid.n) <= width
    c[act] = rng.standard_normal(act.sum()) + 1j * rng.standard_normal(act.sum())
    return SpectralField.from_coeffs(grid, c)


class TestTransforms:
    def test_round_trip(self, grid, rng):
        values = rng.standard_normal(grid.N) + 1j * rng.standard_normal(grid.N)
        f = SpectralField.from_values(grid, values)
        np.testing.assert_allclose(grid.values_of(f.coeffs), values, atol=1e-13)

    def test_forward_convention(self, grid):
        # fhat(n) of exp(2 pi i x / L) is the Kronecker delta at n = 1
        f = SpectralField.from_values(grid, np.exp(2j * np.pi * grid.x / grid.L))
        expected = np.zeros(grid.N)
        expected[1] = 1.0
        np.testing.assert_allclose(f.coeffs, expected, atol=1e-14)

    def test_hermitian_symmetry_of_real_fields(self, grid, rng):
        f = SpectralField.from_values(grid, rng.standard_normal(grid.N))
        assert f.is_real
        assert hermitian_defect(f.coeffs) < 1e-14

    def test_grid_validation(self):
        with pytest.raises(DomainError):
            FourierGrid(-1.0, 64)
        with pytest.raises(DomainError):
            FourierGrid(10.0, 100)  # not a power of two


class TestDerivative:
    def test_single_mode(self, grid):
        f = SpectralField.from_values(grid, np.sin(2 * np.pi * grid.x / grid.L))
        df = derivative(f, 1)
        expected = (2 * np.pi / grid.L) * np.cos(2 * np.pi * grid.x / grid.L)
        np.testing.assert_allclose(df.real_values, expected, atol=1e-14)

    def test_constant(self, grid):
        f = SpectralField.from_values(grid, np.full(grid.N, 3.7))
        for order in (1, 2, 3, 4):
            np.testing.assert_allclose(derivative(f, order).values, 0.0, atol=1e-14)

    def test_cnoidal_second_derivative(self):
        # psi'' = omega psi - psi^2 rearranged as the oracle
        profile = build_wave(1.0, 13.0, 256)
        d2 = derivative(profile.field, 2)
        psi = profile.psi
        np.testing.assert_allclose(d2.real_values, psi - psi**2, atol=1e-8)

    def test_composition_matches_fourth_order(self, grid, rng):
        f = smooth_random_field(grid, rng)
        twice = derivative(derivative(f, 2), 2)
        np.testing.assert_allclose(
            twice.coeffs, derivative(f, 4).coeffs,
            atol=1e-11 * np.abs(derivative(f, 4).coeffs).max(),
        )

    def test_order_validation(self, grid, rng):
        f = smooth_random_field(grid, rng)
        with pytest.raises(DomainError):
            derivative(f, 5)

    def test_resolution_error(self, grid, rng):
        rough = SpectralField.from_values(grid, rng.standard_normal(grid.N))
        with pytest.raises(ResolutionError):
            derivative(rough, 2)

    def test_nyquist_zeroed_for_odd_orders(self, grid):
        # trace Nyquist content (below the resolution tolerance) must be
        # dropped by odd derivatives and kept by even ones
        c = np.zeros(grid.N, dtype=complex)
        c[1] = c[-1] = 1.0
        c[grid.N // 2] = 1e-12
        f = SpectralField.from_coeffs(grid, c)
        assert derivative(f, 1).coeffs[grid.N // 2] == 0.0
        assert abs(derivative(f, 2).coeffs[grid.N // 2]) > 0.0


class TestDealias:
    def test_low_modes_unchanged(self, grid, rng):
        f = smooth_random_field(grid, rng, width=grid.N // 3)
        np.testing.assert_allclose(dealias(f).coeffs, f.coeffs, atol=0)

    def test_nyquist_killed(self, grid):
        c = np.zeros(grid.N, dtype=complex)
        c[grid.N // 2] = 1.0
        f = SpectralField.from_coeffs(grid, c)
        assert np.abs(dealias(f).coeffs).max() == 0.0

    def test_product_against_double_resolution(self, rng):
        # dealiased product on N modes vs the exact product computed at 2N
        coarse = FourierGrid(13.0, 128)
        fine = FourierGrid(13.0, 256)
        f = smooth_random_field(coarse, rng, width=20)
        g = smooth_random_field(coarse, rng, width=20)

        def lift(field):
            c = np.zeros(fine.N, dtype=complex)
            for idx, n in enumerate(coarse.n):
                c[n % fine.N] = field.coeffs[idx]
            return SpectralField.from_coeffs(fine, c)

        prod_coarse = dealias(SpectralField.from_values(coarse, f.values * g.values))
        prod_fine = SpectralField.from_values(fine, lift(f).values * lift(g).values)
        keep = np.abs(coarse.n) <= coarse.N // 3
        fine_match = np.array([prod_fine.coeffs[n % fine.N] for n in coarse.n])
        scale = np.abs(fine_match).max()
        np.testing.assert_allclose(
            prod_coarse.coeffs[keep], fine_match[keep], atol=1e-12 * scale
        )


class TestInnerProducts:
    def test_constant(self, grid):
        c = 2.5
        f = SpectralField.from_values(grid, np.full(grid.N, c))
        assert sobolev_product(f, f, 3.0) == pytest.approx(c * c, rel=1e-14)

    def test_single_mode_weight(self, grid):
        f = SpectralField.from_values(grid, np.exp(2j * np.pi * grid.x / grid.L))
        assert sobolev_product(f, f, 1.0) == pytest.approx(4.0, rel=1e-13)

    def test_parseval_vs_trapezoid(self, grid, rng):
        f = smooth_random_field(grid, rng)
        trapz = np.sum(np.abs(f.values) ** 2) * (grid.L / grid.N) / grid.L
        assert sobolev_product(f, f, 0.0) == pytest.approx(trapz, rel=1e-12)

    def test_grid_mismatch(self, grid, rng):
        other = FourierGrid(12.0, 128)
        f = smooth_random_field(grid, rng)
        g = smooth_random_field(other, rng)
        with pytest.raises(GridMismatchError):
            sobolev_product(f, g, 0.0)

    def test_norm_is_sqrt(self, grid, rng):
        f = smooth_random_field(grid, rng)
        assert sobolev_norm(f, 1.0) == pytest.approx(
            np.sqrt(sobolev_product(f, f, 1.0)), rel=1e-15
        )


def test_shift_is_exact(grid, rng):
    f = smooth_random_field(grid, rng, width=12)
    y = 0.7321
    g = shift(f, y)
    direct = np.array([
        np.sum(f.coeffs * np.exp(2j * np.pi * grid.n * (x + y) / grid.L)) for x in grid.x[:8]
    ])
    np.testing.assert_allclose(g.values[:8], direct, atol=1e-12 * np.abs(direct).max())
