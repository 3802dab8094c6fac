r"""Spectral operators on position-velocity wave functions.

Position and velocity act by pointwise multiplication.  Momentum and
acceleratum are the conjugate derivative operators

    p = -i hbar d/dx,        a = -i hbar d/dv,

applied via FFT: multiply the transform by ``hbar * k`` along the matching
axis.  Two wavenumber conventions coexist on even grids:

- derivatives zero the Nyquist bin, which keeps odd-order spectral
  derivatives Hermitian;
- translations keep the full phase (Nyquist as the negative frequency), so
  a shift by an integer number of cells is exactly a circular shift.

The canonical commutators on interior states are [x, p] = [v, a] = i*hbar
while the four cross pairs (x,v), (x,a), (p,v), (p,a) commute, and the
translation/boost unitaries obey the Weyl exchange relations with phase
``exp(i xi mu / hbar)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ArgumentError, SupportError
from .grids import (
    Grid2D,
    PhysicalConstants,
    WaveFunction2D,
    ForceField,
    v_moments,
    x_moments,
)

__all__ = [
    "ObservableTag",
    "SpectralWorkspace",
    "apply_operator",
    "apply_hdyn",
    "to_momentum_rep",
    "from_momentum_rep",
    "translate_x",
    "boost_v",
    "commutator_residual",
    "weyl_residual",
]


class ObservableTag(enum.Enum):
    """The operators the library exposes by name."""

    POSITION = "position"
    VELOCITY = "velocity"
    MOMENTUM = "momentum"
    ACCELERATUM = "acceleratum"
    CLASSICAL_ENERGY = "classical_energy"


_DIAGONAL_TAGS = (ObservableTag.POSITION, ObservableTag.VELOCITY)
_KINEMATIC_TAGS = (
    ObservableTag.POSITION,
    ObservableTag.VELOCITY,
    ObservableTag.MOMENTUM,
    ObservableTag.ACCELERATUM,
)


def _wavenumbers(n: int, d: float) -> tuple[np.ndarray, np.ndarray]:
    """(shift, derivative) angular wavenumber arrays for an even grid."""
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=d)
    k_deriv = k.copy()
    k_deriv[n // 2] = 0.0  # Nyquist zeroed for Hermitian odd derivatives
    k.flags.writeable = False
    k_deriv.flags.writeable = False
    return k, k_deriv


@dataclass(frozen=True)
class SpectralWorkspace:
    """Cached wavenumber arrays for one grid."""

    grid: Grid2D
    kx_shift: np.ndarray
    kx_deriv: np.ndarray
    kv_shift: np.ndarray
    kv_deriv: np.ndarray


_WORKSPACES: dict[Grid2D, SpectralWorkspace] = {}


def workspace_for(grid: Grid2D) -> SpectralWorkspace:
    ws = _WORKSPACES.get(grid)
    if ws is None:
        kx, kxd = _wavenumbers(grid.n_x, grid.dx)
        kv, kvd = _wavenumbers(grid.n_v, grid.dv)
        ws = SpectralWorkspace(grid, kx, kxd, kv, kvd)
        _WORKSPACES[grid] = ws
    return ws


def _derivative_apply(amps: np.ndarray, k_deriv: np.ndarray, hbar: float, axis: int) -> np.ndarray:
    shape = [1, 1]
    shape[axis] = k_deriv.size
    ft = sfft.fft(amps, axis=axis)
    ft *= (hbar * k_deriv).reshape(shape)
    return sfft.ifft(ft, axis=axis)


def apply_operator(tag: ObservableTag, wf: WaveFunction2D, force: ForceField | None = None) -> WaveFunction2D:
    """Apply one named operator and return the (generally unnormalized) result.

    ``CLASSICAL_ENERGY`` is ``m v^2 / 2 + V(x)`` and needs the force field
    that defines V; the four kinematic tags take no extra data.
    """
    ws = workspace_for(wf.grid)
    hbar = wf.constants.hbar
    if tag is ObservableTag.POSITION:
        out = wf.amps * wf.grid.xs[:, None]
    elif tag is ObservableTag.VELOCITY:
        out = wf.amps * wf.grid.vs[None, :]
    elif tag is ObservableTag.MOMENTUM:
        out = _derivative_apply(wf.amps, ws.kx_deriv, hbar, axis=0)
    elif tag is ObservableTag.ACCELERATUM:
        out = _derivative_apply(wf.amps, ws.kv_deriv, hbar, axis=1)
    elif tag is ObservableTag.CLASSICAL_ENERGY:
        if force is None:
            raise ArgumentError("CLASSICAL_ENERGY requires a force field (it defines V)")
        diag = 0.5 * force.mass * wf.grid.vs[None, :] ** 2 + force.potential(wf.grid.xs)[:, None]
        out = diag * wf.amps
    else:  # pragma: no cover - exhaustive over the enum
        raise ArgumentError(f"unknown observable tag {tag!r}")
    return WaveFunction2D(wf.grid, out, wf.constants)


def apply_hdyn(wf: WaveFunction2D, force: ForceField) -> WaveFunction2D:
    """Apply the dynamical generator v p + f(x) a without densifying it."""
    ws = workspace_for(wf.grid)
    hbar = wf.constants.hbar
    out = wf.grid.vs[None, :] * _derivative_apply(wf.amps, ws.kx_deriv, hbar, axis=0)
    out += force.force(wf.grid.xs)[:, None] * _derivative_apply(wf.amps, ws.kv_deriv, hbar, axis=1)
    return WaveFunction2D(wf.grid, out, wf.constants)


def to_momentum_rep(wf: WaveFunction2D) -> WaveFunction2D:
    r"""Unitary change to the (p, v) representation.

    Per velocity row, ``psi~(p, v) = (2 pi hbar)^{-1/2} \int dx e^{-i p x/hbar}
    psi(x, v)`` discretized on the grid.  The returned state reuses
    WaveFunction2D with axis 0 holding momentum nodes ``p = hbar * k`` in
    ascending order; sum(|psi~|^2) dp dv equals sum(|psi|^2) dx dv exactly.
    """
    grid = wf.grid
    ws = workspace_for(grid)
    hbar = wf.constants.hbar
    ft = sfft.fft(wf.amps, axis=0)
    ft *= np.exp(-1j * ws.kx_shift * grid.x_min)[:, None]
    ft *= grid.dx / np.sqrt(2.0 * np.pi * hbar)
    ft = np.fft.fftshift(ft, axes=0)
    ps = hbar * np.fft.fftshift(ws.kx_shift)
    dp = 2.0 * np.pi * hbar / (grid.n_x * grid.dx)
    pgrid = Grid2D(float(ps[0]), float(ps[0] + grid.n_x * dp), grid.n_x,
                   grid.v_min, grid.v_max, grid.n_v)
    return WaveFunction2D(pgrid, ft, wf.constants)


def from_momentum_rep(wf_p: WaveFunction2D, grid: Grid2D) -> WaveFunction2D:
    """Invert :func:`to_momentum_rep` back onto the given position grid."""
    ws = workspace_for(grid)
    hbar = wf_p.constants.hbar
    dp = 2.0 * np.pi * hbar / (grid.n_x * grid.dx)
    pg = wf_p.grid
    if (pg.n_x, pg.n_v) != (grid.n_x, grid.n_v) or not (
        np.isclose(pg.x_min, -np.pi * hbar / grid.dx, rtol=1e-12, atol=1e-12)
        and np.isclose(pg.dx, dp, rtol=1e-12)
        and (pg.v_min, pg.v_max) == (grid.v_min, grid.v_max)
    ):
        raise ArgumentError("momentum-representation state does not match the target grid")
    ft = np.fft.ifftshift(wf_p.amps, axes=0)
    ft = ft * np.exp(+1j * ws.kx_shift * grid.x_min)[:, None]
    ft *= np.sqrt(2.0 * np.pi * hbar) / grid.dx
    return WaveFunction2D(grid, sfft.ifft(ft, axis=0), wf_p.constants)


def _require_shift_budget(axis: str, lo: float, hi: float, mean: float, std: float, shift: float):
    for label, center in (("current", mean), ("shifted", mean + shift)):
        if center - 5.0 * std < lo or center + 5.0 * std > hi:
            raise SupportError(
                f"{label} packet support ({axis} = {center:g} +- 5*{std:g}) would cross the "
                f"periodic boundary of [{lo:g}, {hi:g}]"
            )


def translate_x(wf: WaveFunction2D, xi: float) -> WaveFunction2D:
    """Apply exp(-i xi p / hbar): shift the state by xi in x.

    Refuses shifts whose 5-sigma support (from the x marginal) would touch
    the periodic boundary.  When xi is an integer number of cells the result
    is exactly a circular index shift.
    """
    mean, std = x_moments(wf)
    _require_shift_budget("x", wf.grid.x_min, wf.grid.x_max, mean, std, xi)
    ws = workspace_for(wf.grid)
    ft = sfft.fft(wf.amps, axis=0)
    ft *= np.exp(-1j * ws.kx_shift * xi)[:, None]
    return WaveFunction2D(wf.grid, sfft.ifft(ft, axis=0), wf.constants)


def boost_v(wf: WaveFunction2D, alpha: float) -> WaveFunction2D:
    """Apply exp(-i alpha a / hbar): shift the state by alpha in v."""
    mean, std = v_moments(wf)
    _require_shift_budget("v", wf.grid.v_min, wf.grid.v_max, mean, std, alpha)
    ws = workspace_for(wf.grid)
    ft = sfft.fft(wf.amps, axis=1)
    ft *= np.exp(-1j * ws.kv_shift * alpha)[None, :]
    return WaveFunction2D(wf.grid, sfft.ifft(ft, axis=1), wf.constants)


def _require_interior(wf: WaveFunction2D):
    mean_x, std_x = x_moments(wf)
    mean_v, std_v = v_moments(wf)
    _require_shift_budget("x", wf.grid.x_min, wf.grid.x_max, mean_x, std_x, 0.0)
    _require_shift_budget("v", wf.grid.v_min, wf.grid.v_max, mean_v, std_v, 0.0)


def commutator_residual(
    tag_a: ObservableTag, tag_b: ObservableTag, wf: WaveFunction2D
) -> tuple[WaveFunction2D, complex]:
    """Return ([A, B] psi, expected constant c with [A, B] = c on interior states).

    c is ``i hbar`` for (position, momentum) and (velocity, acceleratum),
    ``-i hbar`` for the reversed orders, and 0 for the four cross pairs.
    Both operators must be kinematic and the state must be interior.
    """
    for tag in (tag_a, tag_b):
        if tag not in _KINEMATIC_TAGS:
            raise ArgumentError(f"commutators are defined for kinematic tags, not {tag}")
    if tag_a is tag_b:
        raise ArgumentError("commutator of an operator with itself is trivially zero")
    _require_interior(wf)

    hbar = wf.constants.hbar
    pairs = {
        (ObservableTag.POSITION, ObservableTag.MOMENTUM): 1j * hbar,
        (ObservableTag.VELOCITY, ObservableTag.ACCELERATUM): 1j * hbar,
    }
    expected = pairs.get((tag_a, tag_b), 0.0)
    if expected == 0.0:
        expected = -pairs.get((tag_b, tag_a), 0.0)

    if tag_a in _DIAGONAL_TAGS and tag_b in _DIAGONAL_TAGS:
        # both diagonal: compose the diagonals first, so AB and BA are the
        # same elementwise product and the residual is exactly zero
        da = wf.grid.xs[:, None] if tag_a is ObservableTag.POSITION else wf.grid.vs[None, :]
        db = wf.grid.xs[:, None] if tag_b is ObservableTag.POSITION else wf.grid.vs[None, :]
        field = ((da * db) - (db * da)) * wf.amps
        return WaveFunction2D(wf.grid, field, wf.constants), complex(expected)

    ab = apply_operator(tag_a, apply_operator(tag_b, wf))
    ba = apply_operator(tag_b, apply_operator(tag_a, wf))
    return WaveFunction2D(wf.grid, ab.amps - ba.amps, wf.constants), complex(expected)


def _phase_x(wf: WaveFunction2D, mu: float) -> WaveFunction2D:
    """exp(-i mu x / hbar), diagonal in position."""
    ph = np.exp(-1j * mu * wf.grid.xs / wf.constants.hbar)
    return WaveFunction2D(wf.grid, ph[:, None] * wf.amps, wf.constants)


def _phase_v(wf: WaveFunction2D, beta: float) -> WaveFunction2D:
    """exp(-i beta v / hbar), diagonal in velocity."""
    ph = np.exp(-1j * beta * wf.grid.vs / wf.constants.hbar)
    return WaveFunction2D(wf.grid, ph[None, :] * wf.amps, wf.constants)


def weyl_residual(kind: str, wf: WaveFunction2D, shift: float, phase_param: float) -> float:
    """Max-norm residual of a Weyl exchange relation on the given state.

    ``kind="xp"`` checks  T(xi) M(mu) = exp(i xi mu / hbar) M(mu) T(xi)
    with T the x translation and M the x phase; ``kind="va"`` checks the
    (boost, v-phase) analog with parameters (alpha, beta).  Returns
    max |lhs - rhs| over the grid.
    """
    hbar = wf.constants.hbar
    if kind == "xp":
        xi, mu = shift, phase_param
        lhs = translate_x(_phase_x(wf, mu), xi)
        rhs = _phase_x(translate_x(wf, xi), mu)
        phase = np.exp(1j * xi * mu / hbar)
    elif kind == "va":
        alpha, beta = shift, phase_param
        lhs = boost_v(_phase_v(wf, beta), alpha)
        rhs = _phase_v(boost_v(wf, alpha), beta)
        phase = np.exp(1j * alpha * beta / hbar)
    else:
        raise ArgumentError(f"weyl_residual kind must be 'xp' or 'va', got {kind!r}")
    return float(np.max(np.abs(lhs.amps - phase * rhs.amps)))
