"""Dense-matrix spectra of the dynamical generator on coarse grids.

The generator v p + f(x) a is not bounded below; the positive energy
observable is obtained by eigendecomposing the dense matrix and replacing
every eigenvalue with its absolute value.  Since that keeps the eigenbasis,
the result commutes with the generator by construction.

Dense work is capped at dim = n_x * n_v = 4096 (a 64 x 64 grid): the point
of this module is representation-level checks, not resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ArgumentError, ResourceError
from .grids import (
    ForceField,
    Grid2D,
    PhysicalConstants,
    WaveFunction2D,
    norm,
)
from .operators import ObservableTag, apply_hdyn, apply_operator

__all__ = [
    "DenseOperator",
    "build_hdyn_matrix",
    "energy_observable",
    "spectrum",
    "EnergyCommutationReport",
    "energy_commutation_check",
]

_DIM_CAP = 4096


@dataclass(frozen=True)
class DenseOperator:
    """A dense matrix acting on flattened (x, v) amplitudes (x-major)."""

    dim: int
    entries: np.ndarray
    grid: Grid2D

    def __post_init__(self):
        if self.entries.shape != (self.dim, self.dim):
            raise ArgumentError(
                f"entries shape {self.entries.shape} does not match dim = {self.dim}"
            )
        if self.grid.n_x * self.grid.n_v != self.dim:
            raise ArgumentError("grid size does not match operator dimension")
        if not np.all(np.isfinite(self.entries.view(np.float64))):
            raise ArgumentError("operator entries must be finite")
        self.entries.flags.writeable = False

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def apply(self, wf: WaveFunction2D) -> WaveFunction2D:
        if wf.grid != self.grid:
            raise ArgumentError("state lives on a different grid than the operator")
        out = self.entries @ wf.amps.reshape(-1)
        return WaveFunction2D(self.grid, out.reshape(wf.grid.shape), wf.constants)


def _derivative_matrix(n: int, d: float, hbar: float) -> np.ndarray:
    """Dense -i hbar d/dq on a periodic axis: F^-1 diag(hbar k) F, Nyquist zeroed."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=d)
    k[n // 2] = 0.0
    eye = np.eye(n, dtype=np.complex128)
    return sfft.ifft(hbar * k[:, None] * sfft.fft(eye, axis=0), axis=0)


def build_hdyn_matrix(
    grid: Grid2D, force: ForceField, constants: PhysicalConstants = PhysicalConstants()
) -> DenseOperator:
    """Dense v p + f(x) a: diag(v) (P x I) + diag(f(x)) (I x A).

    Each factor pair commutes (the diagonal acts on the axis the derivative
    does not touch), so the result is Hermitian by construction.
    """
    dim = grid.n_x * grid.n_v
    if dim > _DIM_CAP:
        raise ResourceError(
            f"dense generator needs dim = n_x*n_v <= {_DIM_CAP}, got {dim}; use the "
            "matrix-free operator actions for large grids"
        )
    p_mat = _derivative_matrix(grid.n_x, grid.dx, constants.hbar)
    a_mat = _derivative_matrix(grid.n_v, grid.dv, constants.hbar)
    f_of_x = force.force(grid.xs)

    h4 = np.zeros((grid.n_x, grid.n_v, grid.n_x, grid.n_v), dtype=np.complex128)
    for j, v in enumerate(grid.vs):
        h4[:, j, :, j] = v * p_mat
    for i in range(grid.n_x):
        h4[i, :, i, :] += f_of_x[i] * a_mat
    return DenseOperator(dim=dim, entries=h4.reshape(dim, dim), grid=grid)


def energy_observable(hdyn: DenseOperator) -> DenseOperator:
    """Replace the generator's eigenvalues by their absolute values.

    The input must be Hermitian within 1e-8 (max-entry defect); the output
    shares its eigenbasis, so it is positive and commutes with the input.
    """
    defect = hdyn.hermiticity_defect()
    if defect > 1e-8:
        raise ArgumentError(
            f"generator is not Hermitian (max defect {defect:.3e}); cannot take |E|"
        )
    sym = 0.5 * (hdyn.entries + hdyn.entries.conj().T)
    evals, vecs = np.linalg.eigh(sym)
    eng = (vecs * np.abs(evals)) @ vecs.conj().T
    return DenseOperator(dim=hdyn.dim, entries=eng, grid=hdyn.grid)


def spectrum(op: DenseOperator) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian dense operator."""
    sym = 0.5 * (op.entries + op.entries.conj().T)
    return np.linalg.eigvalsh(sym)


@dataclass(frozen=True)
class EnergyCommutationReport:
    """Per-state residuals of ||(H_class H_dyn - H_dyn H_class) psi|| / ||psi||."""

    residuals: tuple[float, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def energy_commutation_check(
    grid: Grid2D, force: ForceField, test_states
) -> EnergyCommutationReport:
    """Matrix-free conservation check: the classical energy must commute
    with the dynamical generator on interior states (boundary-artifact
    budget applies, since coordinate multiplication wraps at the seam)."""
    if not test_states:
        raise ArgumentError("need at least one test state")
    residuals = []
    for wf in test_states:
        if wf.grid != grid:
            raise ArgumentError("test state lives on a different grid")
        forward = apply_operator(ObservableTag.CLASSICAL_ENERGY, apply_hdyn(wf, force), force)
        backward = apply_hdyn(apply_operator(ObservableTag.CLASSICAL_ENERGY, wf, force), force)
        diff = WaveFunction2D(grid, forward.amps - backward.amps, wf.constants)
        residuals.append(norm(diff) / norm(wf))
    return EnergyCommutationReport(residuals=tuple(residuals))
