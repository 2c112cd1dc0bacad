"""Linearized-operator spectra around the explicit wave.

The inertia counts and kernel alignments checked here are the spectral
hypotheses of the stability argument: one simple negative eigenvalue and
a one-dimensional kernel for the real block, nonnegativity for the
imaginary block.
"""

import numpy as np
import pytest

from sbwave.cnoidal import build_wave
from sbwave.errors import DomainError, ResolutionError
from sbwave.grid import SpectralField, sobolev_product
from sbwave.hill import (
    ZERO_TOL_FACTOR,
    assemble,
    cosine_similarity,
    kernel_candidate,
    kernel_check,
    spectrum,
)


@pytest.fixture(scope="module")
def spectra(wave13):
    return {kind: spectrum(kind, wave13, 6) for kind in ("L1", "L2", "AR", "AI")}


class TestAssembly:
    def test_symmetric(self, wave13):
        for kind in ("L1", "L2", "AR", "AI"):
            A = assemble(kind, wave13)
            assert np.abs(A - A.T).max() <= 1e-13

    def test_ai_block_structure(self, wave13):
        A = assemble("AI", wave13)
        N = wave13.field.grid.N
        np.testing.assert_allclose(A[N:, N:], np.eye(N), atol=0)
        np.testing.assert_allclose(A[:N, N:], 0.0, atol=0)
        np.testing.assert_allclose(A[N:, :N], 0.0, atol=0)

    def test_l2_annihilates_psi(self, wave13):
        A = assemble("L2", wave13)
        c = wave13.field.coeffs
        assert np.linalg.norm(A @ c) / np.linalg.norm(c) <= 1e-8

    def test_l1_annihilates_psi_prime(self, wave13):
        A = assemble("L1", wave13)
        g = wave13.field.grid
        dsym = 1j * g.xi.copy()
        dsym[g.N // 2] = 0.0
        dpsi = dsym * wave13.field.coeffs
        assert np.linalg.norm(A @ dpsi) / np.linalg.norm(dpsi) <= 1e-8

    def test_bad_kind(self, wave13):
        with pytest.raises(DomainError):
            assemble("LX", wave13)

    def test_under_resolved(self, rng):
        from sbwave.grid import FourierGrid

        grid = FourierGrid(13.0, 64)
        rough = SpectralField.from_values(grid, rng.standard_normal(64))

        class FakeWave:
            params = type("P", (), {"omega": 1.0})()
            field = rough

        with pytest.raises(ResolutionError):
            assemble("L1", FakeWave())


class TestKernels:
    @pytest.mark.parametrize("kind", ["L1", "L2", "AR", "AI"])
    def test_kernel_residuals(self, wave13, kind):
        assert kernel_check(kind, wave13)["residual"] <= 1e-7


class TestInertia:
    def test_l1(self, spectra):
        s = spectra["L1"]
        assert (s.n_negative, s.n_zero) == (1, 1)
        assert s.eigenvalues[0] < 0 < s.eigenvalues[2]
        assert abs(s.eigenvalues[1]) <= s.zero_tol

    def test_l2(self, spectra):
        s = spectra["L2"]
        assert (s.n_negative, s.n_zero) == (0, 1)
        assert abs(s.eigenvalues[0]) <= s.zero_tol
        assert s.eigenvalues[1] > s.zero_tol

    def test_ar(self, spectra, wave13):
        s = spectra["AR"]
        assert (s.n_negative, s.n_zero) == (1, 1)
        assert s.eigenvalues[0] < -s.zero_tol
        assert abs(s.eigenvalues[1]) <= s.zero_tol
        assert s.eigenvalues[2] > s.zero_tol  # third eigenvalue strictly positive
        cand = kernel_candidate("AR", wave13)
        assert cosine_similarity(s.coeff_vectors[:, 1], cand) > 0.999

    def test_ai(self, spectra, wave13):
        s = spectra["AI"]
        assert (s.n_negative, s.n_zero) == (0, 1)
        assert abs(s.eigenvalues[0]) <= s.zero_tol
        cand = kernel_candidate("AI", wave13)
        assert cosine_similarity(s.coeff_vectors[:, 0], cand) > 0.999

    def test_zero_tol_default(self, spectra):
        s = spectra["L1"]
        lam_max = max(
            abs(s.eigenvalues).max(),
            ZERO_TOL_FACTOR and 0.0,
        )
        assert s.zero_tol >= ZERO_TOL_FACTOR  # at least the absolute floor

    def test_eigenvectors_orthonormal(self, spectra):
        for s in spectra.values():
            V = s.coeff_vectors
            gram = V.T @ V
            np.testing.assert_allclose(gram, np.eye(V.shape[1]), atol=1e-10)


class TestQuadraticForms:
    def _pairing(self, grid, a, b):
        return float(grid.L * np.real(np.sum(a * np.conj(b))))

    def test_real_block_identity(self, wave13, rng):
        # <AR(f,g),(f,g)> = 2<L1 f, f> + <L1 g, g> + 2 int psi (f-g)^2
        g = wave13.field.grid
        act = np.abs(g.n) <= 40

        def random_real():
            c = np.where(act, rng.standard_normal(g.N) + 1j * rng.standard_normal(g.N), 0.0)
            return SpectralField.from_coeffs(g, 0.5 * (c + np.conj(np.roll(c[::-1], 1))))

        AR = assemble("AR", wave13)
        L1 = assemble("L1", wave13)
        psi = wave13.psi
        for _ in range(3):
            f, h = random_real(), random_real()
            v = np.concatenate([f.coeffs, h.coeffs])
            lhs = self._pairing(g, AR @ v, v)
            cross = 2.0 * np.sum(psi * (f.real_values - h.real_values) ** 2) * (g.L / g.N)
            rhs = (
                2.0 * self._pairing(g, L1 @ f.coeffs, f.coeffs)
                + self._pairing(g, L1 @ h.coeffs, h.coeffs)
                + cross
            )
            assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(lhs)))

    def test_imag_block_identity(self, wave13, rng):
        # <AI(f,g),(f,g)> = 2<L2 f, f> + ||g||^2
        g = wave13.field.grid
        act = np.abs(g.n) <= 40

        def random_real():
            c = np.where(act, rng.standard_normal(g.N) + 1j * rng.standard_normal(g.N), 0.0)
            return SpectralField.from_coeffs(g, 0.5 * (c + np.conj(np.roll(c[::-1], 1))))

        AI = assemble("AI", wave13)
        L2 = assemble("L2", wave13)
        for _ in range(3):
            f, h = random_real(), random_real()
            v = np.concatenate([f.coeffs, h.coeffs])
            lhs = self._pairing(g, AI @ v, v)
            rhs = 2.0 * self._pairing(g, L2 @ f.coeffs, f.coeffs) + g.L * sobolev_product(
                h, h, 0.0
            )
            assert lhs == pytest.approx(rhs, abs=1e-10 * max(1.0, abs(lhs)))


class TestResolutionStability:
    def test_eigenvalues_stable_under_refinement(self, wave13):
        fine = build_wave(1.0, 13.0, 512)
        for kind in ("L1", "L2", "AR", "AI"):
            coarse_vals = spectrum(kind, wave13, 5).eigenvalues
            fine_vals = spectrum(kind, fine, 5).eigenvalues
            np.testing.assert_allclose(coarse_vals, fine_vals, atol=1e-8)


class TestParity:
    def test_even_odd_split_covers_low_spectrum(self, wave13):
        full = spectrum("L1", wave13, 6)
        even = spectrum("L1", wave13, 4, parity="even")
        odd = spectrum("L1", wave13, 4, parity="odd")
        merged = np.sort(np.concatenate([even.eigenvalues, odd.eigenvalues]))[:6]
        np.testing.assert_allclose(full.eigenvalues, merged, atol=1e-9)

    def test_translation_mode_is_odd(self, wave13):
        # psi' is odd, so the even-restricted L1 must lose the zero eigenvalue
        even = spectrum("L1", wave13, 3, parity="even")
        assert even.n_zero == 0

    def test_bad_parity(self, wave13):
        with pytest.raises(DomainError):
            spectrum("L1", wave13, 3, parity="sideways")


def test_spectrum_export(wave13):
    s = spectrum("AR", wave13, 5)
    d = s.to_dict()
    assert d["kind"] == "AR"
    assert d["inertia"]["negative"] == 1
    assert d["inertia"]["zero"] == 1
    assert len(d["eigenvalues"]) == 5
