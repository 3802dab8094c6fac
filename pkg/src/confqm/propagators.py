r"""Time evolution engines.

The central engine advances the transport equation

    dpsi/dt = -(v dpsi/dx + f(x) dpsi/dv)

by Strang splitting between two exactly-solvable advections: the x shift
``psi(x, v) -> psi(x - v tau, v)`` applied as a spectral phase per velocity
row, and the v shift ``psi(x, v) -> psi(x, v - f(x) tau)`` per position
column.  Every substep is a unitary phase multiplication in a transformed
representation, so the composite conserves the norm to rounding and carries
an O(dt^2) splitting error.  Interior half steps are fused into full steps
between record times.

A characteristics solver provides the independent reference: it traces each
node backward through the classical flow with sub-stepped RK4 and samples
the initial state by trigonometric interpolation.

Runs refuse to start when the 5-sigma support, transported along the
classical trajectory of the packet center (with a linearized estimate of
width growth), would touch a periodic boundary.  Photon advection is the
exception: it is a pure shift and may wrap by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import ArgumentError, ConfigurationError, NormalizationError, NumericError, SupportError
from .grids import (
    ClassicalState,
    ForceField,
    WaveFunction1D,
    WaveFunction2D,
    norm,
    v_moments,
    x_moments,
)
from .observables import ObservableSeries, record_1d, snapshot_record
from .operators import workspace_for

__all__ = [
    "EvolveSpec",
    "Trajectory",
    "SupportBudget",
    "classical_trajectory",
    "evolve_config_space",
    "evolve_characteristics",
    "evolve_basic_qm",
    "evolve_photon",
]


@dataclass(frozen=True)
class EvolveSpec:
    """How to advance: step size, horizon, method, and recording cadence."""

    dt: float
    n_steps: int
    method: str = "strang"
    record_every: int = 1

    def __post_init__(self):
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ConfigurationError(f"dt must be positive and finite, got {self.dt}")
        if self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.method not in ("strang", "characteristics"):
            raise ConfigurationError(
                f"method must be 'strang' or 'characteristics', got {self.method!r}"
            )
        if self.record_every < 1 or self.n_steps % self.record_every != 0:
            raise ConfigurationError(
                f"record_every = {self.record_every} must be >= 1 and divide n_steps = {self.n_steps}"
            )


@dataclass(frozen=True)
class Trajectory:
    """A classical trajectory sampled at uniform times."""

    times: np.ndarray
    xs: np.ndarray
    vs: np.ndarray

    def __post_init__(self):
        for arr in (self.times, self.xs, self.vs):
            arr.flags.writeable = False

    @property
    def states(self) -> tuple[ClassicalState, ...]:
        return tuple(ClassicalState(float(x), float(v)) for x, v in zip(self.xs, self.vs))


def _rk4_step(x, v, h, force: ForceField, sign: float = 1.0):
    """One RK4 step of dx/dt = sign*v, dv/dt = sign*f(x); vectorized."""
    k1x, k1v = sign * v, sign * force.force(x)
    k2x, k2v = sign * (v + 0.5 * h * k1v), sign * force.force(x + 0.5 * h * k1x)
    k3x, k3v = sign * (v + 0.5 * h * k2v), sign * force.force(x + 0.5 * h * k2x)
    k4x, k4v = sign * (v + h * k3v), sign * force.force(x + h * k3x)
    return (
        x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x),
        v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def classical_trajectory(state: ClassicalState, force: ForceField, dt: float, n_steps: int) -> Trajectory:
    """RK4 integration of dx/dt = v, dv/dt = f(x), recording every step."""
    if not (np.isfinite(dt) and dt > 0) or n_steps < 1:
        raise ConfigurationError(f"need dt > 0 and n_steps >= 1, got dt={dt}, n_steps={n_steps}")
    xs = np.empty(n_steps + 1)
    vs = np.empty(n_steps + 1)
    xs[0], vs[0] = state.x, state.v
    x, v = np.float64(state.x), np.float64(state.v)
    for i in range(1, n_steps + 1):
        x, v = _rk4_step(x, v, dt, force)
        xs[i], vs[i] = x, v
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
        raise NumericError("classical trajectory left the finite range (force blow-up?)")
    return Trajectory(times=dt * np.arange(n_steps + 1), xs=xs, vs=vs)


def _require_unit_norm(wf):
    n = norm(wf)
    if abs(n - 1.0) > 1e-8:
        raise NormalizationError(f"evolution needs a unit-norm state; got norm = {n!r}")


@dataclass(frozen=True)
class SupportBudget:
    """One packet's center and widths for the wrap-budget precheck."""

    x: float
    v: float
    sigma_x: float
    sigma_v: float


def check_wrap_budget(grid, force: ForceField, budgets, t_final: float):
    """Transport each budget's center and linearized widths; 5 sigma must stay interior.

    Width growth uses the tangent map J of the flow (dJ/dt = A J with
    A = [[0, 1], [f'(x), 0]]), which is exact for free/uniform/harmonic
    forces and a local estimate for polynomial ones.
    """
    n = min(2048, max(64, int(math.ceil(t_final / 1e-2))))
    h = t_final / n
    for b in budgets:
        x, v = b.x, b.v
        jac = np.eye(2)
        for step in range(n + 1):
            sx = 5.0 * math.sqrt(
                jac[0, 0] ** 2 * b.sigma_x**2 + jac[0, 1] ** 2 * b.sigma_v**2
            )
            sv = 5.0 * math.sqrt(
                jac[1, 0] ** 2 * b.sigma_x**2 + jac[1, 1] ** 2 * b.sigma_v**2
            )
            if x - sx < grid.x_min or x + sx > grid.x_max:
                raise SupportError(
                    f"wrap budget: packet support x = {x:.4g} +- {sx:.4g} leaves "
                    f"[{grid.x_min:g}, {grid.x_max:g}] near t = {step * h:.4g}"
                )
            if v - sv < grid.v_min or v + sv > grid.v_max:
                raise SupportError(
                    f"wrap budget: packet support v = {v:.4g} +- {sv:.4g} leaves "
                    f"[{grid.v_min:g}, {grid.v_max:g}] near t = {step * h:.4g}"
                )
            if step == n:
                break
            # advance center and tangent map together (RK4 on the pair)
            def rhs(xx, vv, jj):
                fp = float(force.force_prime(xx))
                a_mat = np.array([[0.0, 1.0], [fp, 0.0]])
                return float(vv), float(force.force(xx)), a_mat @ jj

            k1 = rhs(x, v, jac)
            k2 = rhs(x + 0.5 * h * k1[0], v + 0.5 * h * k1[1], jac + 0.5 * h * k1[2])
            k3 = rhs(x + 0.5 * h * k2[0], v + 0.5 * h * k2[1], jac + 0.5 * h * k2[2])
            k4 = rhs(x + h * k3[0], v + h * k3[1], jac + h * k3[2])
            x = x + (h / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            v = v + (h / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            jac = jac + (h / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])


def evolve_config_space(
    wf: WaveFunction2D,
    force: ForceField,
    spec: EvolveSpec,
    *,
    budgets: tuple[SupportBudget, ...] | None = None,
    snapshot_every: int = 0,
    workers: int = 1,
) -> tuple[WaveFunction2D, ObservableSeries]:
    """Advance the transport equation, recording observables as it goes.

    ``budgets`` overrides the wrap-budget precheck inputs (one entry per
    packet of a mixture); by default the state's own marginal moments are
    used.  ``snapshot_every`` stores every k-th recorded field in the series
    (0 disables snapshots).
    """
    grid = wf.grid
    _require_unit_norm(wf)
    if budgets is None:
        mx, sx = x_moments(wf)
        mv, sv = v_moments(wf)
        budgets = (SupportBudget(mx, mv, sx, sv),)
    check_wrap_budget(grid, force, budgets, spec.dt * spec.n_steps)

    if spec.method == "characteristics":
        return _evolve_by_characteristics(wf, force, spec, snapshot_every, workers)

    ws = workspace_for(grid)
    half_x = np.exp(-0.5j * spec.dt * np.outer(ws.kx_shift, grid.vs))
    full_x = np.exp(-1.0j * spec.dt * np.outer(ws.kx_shift, grid.vs))
    full_v = np.exp(-1.0j * spec.dt * np.outer(force.force(grid.xs), ws.kv_shift))

    def shift_x(a, phase):
        ft = sfft.fft(a, axis=0, workers=workers)
        ft *= phase
        return sfft.ifft(ft, axis=0, workers=workers)

    def shift_v(a):
        ft = sfft.fft(a, axis=1, workers=workers)
        ft *= full_v
        return sfft.ifft(ft, axis=1, workers=workers)

    records = []
    snaps = []

    def record(step: int, a: np.ndarray):
        state = WaveFunction2D(grid, a, wf.constants)
        records.append(snapshot_record(state, force, step * spec.dt))
        idx = len(records) - 1
        if snapshot_every > 0 and idx % snapshot_every == 0:
            snaps.append((idx, state))

    amps = np.array(wf.amps, copy=True)
    record(0, amps)
    amps = shift_x(amps, half_x)
    for step in range(1, spec.n_steps + 1):
        amps = shift_v(amps)
        if step % spec.record_every == 0:
            amps = shift_x(amps, half_x)
            record(step, amps)
            if step < spec.n_steps:
                amps = shift_x(amps, half_x)
        else:
            amps = shift_x(amps, full_x)

    final = WaveFunction2D(grid, amps, wf.constants)
    series = ObservableSeries(
        records=tuple(records),
        scenario="",
        grid_summary=_grid_summary(grid),
        dt=spec.dt,
        record_every=spec.record_every,
        snapshots=tuple(snaps),
    )
    return final, series


def _evolve_by_characteristics(wf, force, spec, snapshot_every, workers):
    records = []
    snaps = []
    final = wf
    for step in range(0, spec.n_steps + 1, spec.record_every):
        state = evolve_characteristics(wf, force, step * spec.dt, workers=workers)
        records.append(snapshot_record(state, force, step * spec.dt))
        idx = len(records) - 1
        if snapshot_every > 0 and idx % snapshot_every == 0:
            snaps.append((idx, state))
        final = state
    series = ObservableSeries(
        records=tuple(records), scenario="", grid_summary=_grid_summary(wf.grid),
        dt=spec.dt, record_every=spec.record_every, snapshots=tuple(snaps),
    )
    return final, series


def _grid_summary(grid) -> str:
    return (
        f"x:[{grid.x_min:g},{grid.x_max:g}]x{grid.n_x} "
        f"v:[{grid.v_min:g},{grid.v_max:g}]x{grid.n_v}"
    )


def evolve_characteristics(
    wf: WaveFunction2D, force: ForceField, t: float, *, dt_max: float = 1e-3, workers: int = 1
) -> WaveFunction2D:
    """Reference transport: backward flow map plus trigonometric interpolation.

    Each grid node is traced backward through the classical flow with RK4
    sub-steps no longer than ``dt_max``; the initial state is then sampled at
    the preimages from its full Fourier interpolant (periodic in both axes).
    Exact on the grid at t = 0.

    Preimages that leave the box sample the periodic extension of the
    initial state.  That is the right answer for forces that respect the
    periodic boundary (free, uniform), but for a non-periodic force the
    imported amplitude is the packet's wrapped tail: for reference-grade
    accuracy, enlarge the domain until those tails are below the target.
    """
    if t < 0 or not np.isfinite(t):
        raise ArgumentError(f"need a finite t >= 0, got {t}")
    if t == 0.0:
        return wf
    grid = wf.grid
    ws = workspace_for(grid)
    n_sub = max(1, int(math.ceil(t / dt_max)))
    h = t / n_sub

    xq = np.repeat(grid.xs, grid.n_v)
    vq = np.tile(grid.vs, grid.n_x)
    for _ in range(n_sub):
        xq, vq = _rk4_step(xq, vq, h, force, sign=-1.0)

    coeff = sfft.fft2(wf.amps, workers=workers) / (grid.n_x * grid.n_v)
    out = np.empty(xq.size, dtype=np.complex128)
    chunk = 8192
    for start in range(0, xq.size, chunk):
        sl = slice(start, min(start + chunk, xq.size))
        ex = np.exp(1j * np.outer(xq[sl] - grid.x_min, ws.kx_shift))
        ev = np.exp(1j * np.outer(vq[sl] - grid.v_min, ws.kv_shift))
        out[sl] = np.einsum("ml,ml->m", ex @ coeff, ev)
    return WaveFunction2D(grid, out.reshape(grid.shape), wf.constants)


def _bqm_sigma_bound(force: ForceField, sigma_x: float, hbar: float, t: float) -> float:
    """Upper bound for the width of a Gaussian under wave mechanics."""
    m = force.mass
    if force.kind == "harmonic":
        return max(sigma_x, hbar / (2.0 * m * force.omega * sigma_x))
    return math.sqrt(sigma_x**2 + (hbar * t / (2.0 * m * sigma_x)) ** 2)


def check_wrap_budget_1d(
    x_min: float,
    x_max: float,
    mean_x: float,
    sigma_x: float,
    mean_v: float,
    force: ForceField,
    hbar: float,
    t_final: float,
):
    """1-D wrap budget: transport the center classically, bound the width.

    The width bound is the free-spreading law (exact for free and uniform
    forces, an upper bound for harmonic ones); 5 sigma must stay interior.
    """
    n = min(2048, max(64, int(math.ceil(t_final / 1e-2))))
    h = t_final / n
    x, v = mean_x, mean_v
    for step in range(n + 1):
        s = 5.0 * _bqm_sigma_bound(force, sigma_x, hbar, step * h)
        if x - s < x_min or x + s > x_max:
            raise SupportError(
                f"wrap budget: packet support x = {x:.4g} +- {s:.4g} leaves "
                f"[{x_min:g}, {x_max:g}] near t = {step * h:.4g}"
            )
        if step < n:
            x, v = _rk4_step(x, v, h, force)


def evolve_basic_qm(
    wf: WaveFunction1D, force: ForceField, spec: EvolveSpec, *, workers: int = 1
) -> tuple[WaveFunction1D, ObservableSeries]:
    """Standard 1-D wave mechanics via split-step: half-V, kinetic, half-V.

    The kinetic phase is exp(-i hbar k^2 dt / 2m); the recorded velocity
    columns hold p/m (the fixed-mass slice).  The wrap budget transports the
    center classically and bounds the width with the free-spreading law
    (exact for free/uniform, an upper bound for harmonic).
    """
    if spec.method != "strang":
        raise ConfigurationError("the 1-D wave-mechanics engine only supports the strang method")
    _require_unit_norm(wf)
    hbar = wf.constants.hbar
    m = force.mass
    t_final = spec.dt * spec.n_steps
    mean_x, sigma_x, mean_p, _ = _wf1d_moments(wf)
    check_wrap_budget_1d(wf.x_min, wf.x_max, mean_x, sigma_x, mean_p / m, force, hbar, t_final)

    k = 2.0 * np.pi * np.fft.fftfreq(wf.n_x, d=wf.dx)
    kinetic = np.exp(-0.5j * hbar * k**2 * spec.dt / m)
    v_half = np.exp(-0.5j * force.potential(wf.xs) * spec.dt / hbar)
    v_full = v_half * v_half

    records = []

    def record(step, a):
        state = WaveFunction1D(wf.x_min, wf.x_max, wf.n_x, a, wf.constants)
        records.append(record_1d(state, step * spec.dt, mass=m, potential=force.potential))
        return state

    amps = np.array(wf.amps, copy=True)
    record(0, amps)
    amps = amps * v_half
    for step in range(1, spec.n_steps + 1):
        amps = sfft.ifft(kinetic * sfft.fft(amps, workers=workers), workers=workers)
        if step % spec.record_every == 0:
            amps = amps * v_half
            state = record(step, amps)
            if step < spec.n_steps:
                amps = amps * v_half
        else:
            amps = amps * v_full
    series = ObservableSeries(
        records=tuple(records), scenario="",
        grid_summary=f"x:[{wf.x_min:g},{wf.x_max:g}]x{wf.n_x}",
        dt=spec.dt, record_every=spec.record_every,
    )
    return state, series


def _wf1d_moments(wf: WaveFunction1D):
    dens = np.abs(wf.amps) ** 2
    total = dens.sum()
    mean_x = float((dens * wf.xs).sum() / total)
    sigma_x = float(np.sqrt(max(((wf.xs - mean_x) ** 2 * dens).sum() / total, 0.0)))
    k = 2.0 * np.pi * np.fft.fftfreq(wf.n_x, d=wf.dx)
    k[wf.n_x // 2] = 0.0
    spec = np.abs(np.fft.fft(wf.amps)) ** 2
    mean_p = float(wf.constants.hbar * (spec * k).sum() / spec.sum())
    return mean_x, sigma_x, mean_p, spec


def evolve_photon(
    wf: WaveFunction1D, s: int, c: float, spec: EvolveSpec, *, workers: int = 1
) -> tuple[WaveFunction1D, ObservableSeries]:
    """Dispersionless advection at signed speed s*c: psi(x, t) = psi0(x - s c t).

    The propagator is the exact spectral phase exp(-i k s c t) applied to the
    initial spectrum, so phase errors never accumulate across steps.  The
    packet may wrap around the periodic boundary by design.
    """
    if s not in (-1, 1):
        raise ConfigurationError(f"propagation direction s must be +1 or -1, got {s}")
    if not (np.isfinite(c) and c > 0):
        raise ConfigurationError(f"speed c must be positive, got {c}")
    if spec.method != "strang":
        raise ConfigurationError("the photon engine only supports the strang method")
    _require_unit_norm(wf)
    k = 2.0 * np.pi * np.fft.fftfreq(wf.n_x, d=wf.dx)

    records = []

    def record(step, ft0):
        t = step * spec.dt
        a = sfft.ifft(ft0 * np.exp(-1j * k * s * c * t), workers=workers)
        state = WaveFunction1D(wf.x_min, wf.x_max, wf.n_x, a, wf.constants)
        records.append(record_1d(state, t, carrier_velocity=float(s * c)))
        return state

    ft0 = sfft.fft(np.array(wf.amps, copy=True), workers=workers)
    state = record(0, ft0)
    for step in range(spec.record_every, spec.n_steps + 1, spec.record_every):
        state = record(step, ft0)
    series = ObservableSeries(
        records=tuple(records), scenario="",
        grid_summary=f"x:[{wf.x_min:g},{wf.x_max:g}]x{wf.n_x}",
        dt=spec.dt, record_every=spec.record_every,
    )
    return state, series
