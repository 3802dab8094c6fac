"""Dense spectra of the dynamical generator and the positive energy observable.

Oracle: for f = 0 the generator is diagonal in the mixed (k_x, v) basis, so
its spectrum is exactly {hbar k_i v_j}.  Everything else leans on exact
linear-algebra identities (shared eigenbasis, parity symmetry).
"""

import numpy as np
import pytest

from confqm.errors import ArgumentError, ResourceError
from confqm.grids import (
    ForceField,
    PhysicalConstants,
    WaveFunction2D,
    gaussian_packet,
    make_grid,
)
from confqm.operators import apply_hdyn
from confqm.spectra import (
    DenseOperator,
    build_hdyn_matrix,
    energy_commutation_check,
    energy_observable,
    spectrum,
)

GRID16 = make_grid(-8.0, 8.0, 16, -8.0, 8.0, 16)


def deriv_wavenumbers(n, d):
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=d)
    k[n // 2] = 0.0
    return k


class TestBuildHdyn:
    def test_free_spectrum_is_product_of_diagonals(self):
        op = build_hdyn_matrix(GRID16, ForceField.free())
        got = spectrum(op)
        k = deriv_wavenumbers(16, GRID16.dx)
        expected = np.sort(np.outer(k, GRID16.vs).ravel())
        assert np.max(np.abs(got - expected)) < 1e-9

    def test_hermitian_by_construction(self):
        for force in (ForceField.free(), ForceField.uniform(g=2.0), ForceField.harmonic(omega=1.0)):
            op = build_hdyn_matrix(GRID16, force)
            assert op.hermiticity_defect() < 1e-10

    def test_uniform_spectrum_symmetric_about_zero(self):
        grid = make_grid(-4.0, 4.0, 8, -4.0, 4.0, 8)
        op = build_hdyn_matrix(grid, ForceField.uniform(g=3.0))
        w = spectrum(op)
        assert np.max(np.abs(w + w[::-1])) < 1e-8

    def test_eigenvalues_are_real(self):
        op = build_hdyn_matrix(GRID16, ForceField.harmonic(omega=1.0))
        w = np.linalg.eigvals(np.asarray(op.entries))
        assert np.max(np.abs(w.imag)) < 1e-9

    def test_hbar_scales_spectrum(self):
        op = build_hdyn_matrix(GRID16, ForceField.free(), PhysicalConstants(hbar=0.5))
        k = deriv_wavenumbers(16, GRID16.dx)
        expected = np.sort(0.5 * np.outer(k, GRID16.vs).ravel())
        assert np.max(np.abs(spectrum(op) - expected)) < 1e-9

    def test_dimension_cap(self):
        grid = make_grid(-8.0, 8.0, 128, -8.0, 8.0, 64)
        with pytest.raises(ResourceError, match="4096"):
            build_hdyn_matrix(grid, ForceField.free())

    def test_dense_apply_matches_streaming_action(self):
        grid = make_grid(-6.0, 6.0, 32, -6.0, 6.0, 32)
        force = ForceField.harmonic(omega=1.0)
        op = build_hdyn_matrix(grid, force)
        rng = np.random.default_rng(7)
        for _ in range(20):
            raw = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
            raw /= np.sqrt(np.sum(np.abs(raw) ** 2) * grid.cell)
            wf = WaveFunction2D(grid, raw)
            dense = op.apply(wf)
            stream = apply_hdyn(wf, force)
            scale = np.sqrt(np.sum(np.abs(stream.amps) ** 2) * grid.cell)
            diff = np.sqrt(np.sum(np.abs(dense.amps - stream.amps) ** 2) * grid.cell)
            assert diff < 1e-10 * max(scale, 1.0)

    def test_validation(self):
        op = build_hdyn_matrix(GRID16, ForceField.free())
        with pytest.raises(ArgumentError, match="shape"):
            DenseOperator(dim=10, entries=np.asarray(op.entries), grid=GRID16)
        other = make_grid(-6.0, 6.0, 32, -6.0, 6.0, 32)
        wf = gaussian_packet(other, x0=0.0, v0=0.0, sigma_x=1.2, sigma_v=1.2)
        with pytest.raises(ArgumentError, match="grid"):
            op.apply(wf)


@pytest.fixture(scope="module")
def harmonic_pair():
    op = build_hdyn_matrix(GRID16, ForceField.harmonic(omega=1.0))
    return op, energy_observable(op)


class TestEnergyObservable:
    def test_positive_semidefinite(self, harmonic_pair):
        _, eng = harmonic_pair
        assert np.min(spectrum(eng)) >= -1e-10

    def test_commutes_with_generator(self, harmonic_pair):
        op, eng = harmonic_pair
        a = np.asarray(op.entries)
        b = np.asarray(eng.entries)
        assert np.max(np.abs(a @ b - b @ a)) < 1e-9

    def test_idempotent_on_positive_input(self, harmonic_pair):
        _, eng = harmonic_pair
        again = energy_observable(eng)
        assert np.max(np.abs(np.asarray(again.entries) - np.asarray(eng.entries))) < 1e-10

    def test_free_case_takes_absolute_values(self):
        op = build_hdyn_matrix(GRID16, ForceField.free())
        eng = energy_observable(op)
        k = deriv_wavenumbers(16, GRID16.dx)
        expected = np.sort(np.abs(np.outer(k, GRID16.vs)).ravel())
        assert np.max(np.abs(spectrum(eng) - expected)) < 1e-9

    def test_rejects_non_hermitian_input(self):
        op = build_hdyn_matrix(GRID16, ForceField.free())
        bad = np.array(op.entries, copy=True)
        bad[0, 1] += 1e-5
        with pytest.raises(ArgumentError, match="Hermitian"):
            energy_observable(DenseOperator(dim=op.dim, entries=bad, grid=GRID16))


class TestEnergyCommutation:
    GRID = make_grid(-8.0, 8.0, 128, -8.0, 8.0, 128)

    def states(self):
        return [
            gaussian_packet(self.GRID, x0=1.0, v0=0.0, sigma_x=0.5, sigma_v=0.5),
            gaussian_packet(self.GRID, x0=-1.0, v0=0.5, sigma_x=0.6, sigma_v=0.4, p0=1.0),
            gaussian_packet(self.GRID, x0=0.0, v0=-1.0, sigma_x=0.4, sigma_v=0.6, p0=-0.5),
        ]

    def test_free_commutes_exactly(self):
        report = energy_commutation_check(self.GRID, ForceField.free(), self.states())
        assert report.max_residual < 1e-10

    def test_uniform_within_budget(self):
        report = energy_commutation_check(self.GRID, ForceField.uniform(g=9.81), self.states())
        assert report.max_residual < 1e-7

    def test_harmonic_within_budget(self):
        report = energy_commutation_check(self.GRID, ForceField.harmonic(omega=1.0), self.states())
        assert report.max_residual < 1e-6
        assert len(report.residuals) == 3

    def test_needs_states_on_grid(self):
        with pytest.raises(ArgumentError, match="at least one"):
            energy_commutation_check(self.GRID, ForceField.free(), [])
        other = make_grid(-6.0, 6.0, 64, -6.0, 6.0, 64)
        wf = gaussian_packet(other, x0=0.0, v0=0.0, sigma_x=0.6, sigma_v=0.6)
        with pytest.raises(ArgumentError, match="different grid"):
            energy_commutation_check(self.GRID, ForceField.free(), [wf])
