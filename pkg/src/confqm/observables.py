"""Expectation values, uncertainties, recorded series, and identity checks.

``expect`` and ``uncertainty`` are the single source of truth for scalar
observables; evolution engines build their records through
:func:`snapshot_record` so a value stored in a series and one computed
directly from the same field can never disagree.

The expectation-value identities checked by :func:`ehrenfest_residuals` are

    d<x>/dt = <v>          d<v>/dt = <f(x)>
    d<p>/dt = -<f'(x) a>   d<a>/dt = -<p>

with time derivatives taken as central differences at the recording
cadence, so residuals carry an O(record_dt^2) floor in addition to the
propagator's own error.  The force-dependent right-hand sides are evaluated
from stored field snapshots, keeping the check independent of anything the
propagator claims.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .errors import ArgumentError, NormalizationError, NumericError
from .grids import (
    ForceField,
    WaveFunction1D,
    WaveFunction2D,
    inner_product,
    norm,
)
from .operators import ObservableTag, apply_operator

__all__ = [
    "expect",
    "uncertainty",
    "ObservableRecord",
    "ObservableSeries",
    "snapshot_record",
    "record_1d",
    "EhrenfestReport",
    "ehrenfest_residuals",
    "MixtureReference",
    "mixture_reference",
]

_NORM_TOL = 1e-8
_HERMITICITY_TOL = 1e-10


def _require_normalized(wf):
    n = norm(wf)
    if abs(n - 1.0) > _NORM_TOL:
        raise NormalizationError(
            f"expectation values need a unit-norm state; got norm = {n!r}"
        )


def _real_part(value: complex, what: str) -> float:
    if abs(value.imag) > _HERMITICITY_TOL:
        raise NumericError(
            f"lost Hermiticity: Im {what} = {value.imag:.3e} exceeds {_HERMITICITY_TOL:g}"
        )
    return value.real


def expect(wf: WaveFunction2D, tag: ObservableTag, force: ForceField | None = None) -> float:
    """<psi| A |psi> for a unit-norm state; the imaginary part is a
    Hermiticity diagnostic and must stay below 1e-10."""
    _require_normalized(wf)
    return _real_part(inner_product(wf, apply_operator(tag, wf, force)), f"<{tag.value}>")


def uncertainty(wf: WaveFunction2D, tag: ObservableTag, force: ForceField | None = None) -> float:
    """sqrt(<A^2> - <A>^2), using <A psi|A psi> for the second moment."""
    _require_normalized(wf)
    a_wf = apply_operator(tag, wf, force)
    mean = _real_part(inner_product(wf, a_wf), f"<{tag.value}>")
    second = inner_product(a_wf, a_wf).real
    var = second - mean * mean
    if var < -1e-12:
        raise NumericError(f"negative variance {var:.3e} for {tag.value}")
    return float(np.sqrt(max(var, 0.0)))


@dataclass(frozen=True)
class ObservableRecord:
    """One recorded step.  Fields a 1-D engine cannot define are None."""

    t: float
    mean_x: float
    mean_v: float
    mean_p: float
    mean_a: float | None
    std_x: float
    std_v: float
    std_p: float
    std_a: float | None
    energy_class: float | None
    norm: float

    def __post_init__(self):
        for name in ("std_x", "std_v", "std_p", "std_a"):
            val = getattr(self, name)
            if val is not None and not val >= 0.0:
                raise NumericError(f"{name} = {val!r} must be non-negative")
        if not (0.0 < self.norm <= 1.0 + 1e-9):
            raise NumericError(f"recorded norm {self.norm!r} outside (0, 1 + 1e-9]")


_CSV_COLUMNS = (
    "t", "mean_x", "mean_v", "mean_p", "mean_a",
    "std_x", "std_v", "std_p", "std_a", "energy_class", "norm",
)


@dataclass(frozen=True)
class ObservableSeries:
    """Records at a fixed cadence, plus optional sparse field snapshots.

    ``snapshots`` holds (record_index, state) pairs; the snapshot cadence may
    be sparser than the record cadence but always lands on record times.
    """

    records: tuple[ObservableRecord, ...]
    scenario: str
    grid_summary: str
    dt: float
    record_every: int
    snapshots: tuple[tuple[int, WaveFunction2D], ...] = field(default=())

    def __post_init__(self):
        ts = [r.t for r in self.records]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ArgumentError("record times must be strictly increasing")

    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def column(self, name: str) -> np.ndarray:
        if name not in _CSV_COLUMNS:
            raise ArgumentError(f"unknown series column {name!r}")
        vals = [getattr(r, name) for r in self.records]
        return np.array([np.nan if v is None else v for v in vals])

    def __len__(self) -> int:
        return len(self.records)


def snapshot_record(wf: WaveFunction2D, force: ForceField, t: float) -> ObservableRecord:
    """Full record for a 2-D state, computing each operator application once."""
    n = norm(wf)
    if abs(n - 1.0) > 1e-6:
        raise NumericError(f"state norm drifted to {n!r} at t = {t!r}")
    means, stds = {}, {}
    for tag in (ObservableTag.POSITION, ObservableTag.VELOCITY,
                ObservableTag.MOMENTUM, ObservableTag.ACCELERATUM):
        a_wf = apply_operator(tag, wf)
        mean = _real_part(inner_product(wf, a_wf), f"<{tag.value}>")
        var = inner_product(a_wf, a_wf).real - mean * mean
        means[tag], stds[tag] = mean, float(np.sqrt(max(var, 0.0)))
    e_wf = apply_operator(ObservableTag.CLASSICAL_ENERGY, wf, force)
    energy = _real_part(inner_product(wf, e_wf), "<classical energy>")
    return ObservableRecord(
        t=t,
        mean_x=means[ObservableTag.POSITION],
        mean_v=means[ObservableTag.VELOCITY],
        mean_p=means[ObservableTag.MOMENTUM],
        mean_a=means[ObservableTag.ACCELERATUM],
        std_x=stds[ObservableTag.POSITION],
        std_v=stds[ObservableTag.VELOCITY],
        std_p=stds[ObservableTag.MOMENTUM],
        std_a=stds[ObservableTag.ACCELERATUM],
        energy_class=energy,
        norm=n,
    )


def _moments_1d(wf: WaveFunction1D):
    """(mean_x, std_x, mean_p, std_p) by density and spectral quadrature."""
    dens = np.abs(wf.amps) ** 2
    total = float(dens.sum())
    xs = wf.xs
    mean_x = float((dens * xs).sum() / total)
    std_x = float(np.sqrt(max((dens * (xs - mean_x) ** 2).sum() / total, 0.0)))
    k = 2.0 * np.pi * np.fft.fftfreq(wf.n_x, d=wf.dx)
    k[wf.n_x // 2] = 0.0
    p = wf.constants.hbar * k
    spec = np.abs(sfft.fft(wf.amps)) ** 2
    stot = float(spec.sum())
    mean_p = float((spec * p).sum() / stot)
    std_p = float(np.sqrt(max((spec * (p - mean_p) ** 2).sum() / stot, 0.0)))
    return mean_x, std_x, mean_p, std_p


def record_1d(
    wf: WaveFunction1D,
    t: float,
    *,
    mass: float | None = None,
    potential=None,
    carrier_velocity: float | None = None,
) -> ObservableRecord:
    """Record for a 1-D engine.

    With ``mass`` (wave mechanics on the fixed-mass slice p = m v) the
    velocity columns hold p/m and the energy is <p^2/2m + V>.  With
    ``carrier_velocity`` (dispersionless advection) the velocity is that
    constant with zero spread and no mass-dependent columns exist.
    """
    mean_x, std_x, mean_p, std_p = _moments_1d(wf)
    n = norm(wf)
    if mass is not None:
        hbar = wf.constants.hbar
        k = 2.0 * np.pi * np.fft.fftfreq(wf.n_x, d=wf.dx)
        k[wf.n_x // 2] = 0.0
        spec = np.abs(sfft.fft(wf.amps)) ** 2
        kin = float((spec * (hbar * k) ** 2).sum() / spec.sum()) / (2.0 * mass)
        dens = np.abs(wf.amps) ** 2
        pot = float((dens * potential(wf.xs)).sum() / dens.sum()) if potential is not None else 0.0
        return ObservableRecord(
            t=t, mean_x=mean_x, mean_v=mean_p / mass, mean_p=mean_p, mean_a=None,
            std_x=std_x, std_v=std_p / mass, std_p=std_p, std_a=None,
            energy_class=kin + pot, norm=n,
        )
    if carrier_velocity is None:
        raise ArgumentError("record_1d needs either a mass or a carrier velocity")
    return ObservableRecord(
        t=t, mean_x=mean_x, mean_v=carrier_velocity, mean_p=mean_p, mean_a=None,
        std_x=std_x, std_v=0.0, std_p=std_p, std_a=None,
        energy_class=None, norm=n,
    )


@dataclass(frozen=True)
class EhrenfestReport:
    """Max-abs residuals of the four expectation-value identities."""

    residual_x: float
    residual_v: float
    residual_p: float
    residual_a: float
    record_dt: float
    checked_means: int
    checked_forces: int

    @property
    def max_residual(self) -> float:
        return max(self.residual_x, self.residual_v, self.residual_p, self.residual_a)


def ehrenfest_residuals(series: ObservableSeries, force: ForceField) -> EhrenfestReport:
    """Check the four identities against the recorded series.

    d<x>/dt vs <v> and d<a>/dt vs -<p> use the records alone; d<v>/dt vs
    <f(x)> and d<p>/dt vs -<f'(x) a> additionally need field snapshots at
    interior record times.
    """
    if len(series.records) < 5:
        raise ArgumentError("need at least five records for central differences")
    h = series.dt * series.record_every
    t = series.times()
    steps = np.diff(t)
    if not np.allclose(steps, h, rtol=1e-9, atol=1e-12):
        raise ArgumentError("records are not equally spaced; cannot difference them")

    mean_x = series.column("mean_x")
    mean_v = series.column("mean_v")
    mean_p = series.column("mean_p")
    mean_a = series.column("mean_a")

    d_x = (mean_x[2:] - mean_x[:-2]) / (2 * h)
    d_v = (mean_v[2:] - mean_v[:-2]) / (2 * h)
    d_p = (mean_p[2:] - mean_p[:-2]) / (2 * h)
    d_a = (mean_a[2:] - mean_a[:-2]) / (2 * h)

    res_x = float(np.max(np.abs(d_x - mean_v[1:-1])))
    res_a = float(np.max(np.abs(d_a + mean_p[1:-1])))

    interior = [(idx, wf) for idx, wf in series.snapshots if 0 < idx < len(series.records) - 1]
    if not interior:
        raise ArgumentError(
            "series carries no interior snapshots; record with a snapshot cadence "
            "to check the force-dependent identities"
        )
    res_v = 0.0
    res_p = 0.0
    for idx, wf in interior:
        dens_x = (np.abs(wf.amps) ** 2).sum(axis=1) * wf.grid.cell
        mean_f = float(np.sum(dens_x * force.force(wf.grid.xs)))
        a_wf = apply_operator(ObservableTag.ACCELERATUM, wf)
        fpa = WaveFunction2D(wf.grid, force.force_prime(wf.grid.xs)[:, None] * a_wf.amps, wf.constants)
        mean_fpa = _real_part(inner_product(wf, fpa), "<f'(x) a>")
        res_v = max(res_v, abs(d_v[idx - 1] - mean_f))
        res_p = max(res_p, abs(d_p[idx - 1] + mean_fpa))

    return EhrenfestReport(
        residual_x=res_x, residual_v=float(res_v), residual_p=float(res_p),
        residual_a=res_a, record_dt=h,
        checked_means=len(series.records) - 2, checked_forces=len(interior),
    )


@dataclass(frozen=True)
class MixtureReference:
    """Weighted classical means for a statistical mixture of packets."""

    times: np.ndarray
    mean_x: np.ndarray
    mean_v: np.ndarray


def mixture_reference(weights, trajectories) -> MixtureReference:
    """P_n-weighted mean of classical trajectories sharing one time axis."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(trajectories) or len(weights) == 0:
        raise ArgumentError("need one weight per trajectory")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ArgumentError(f"weights must sum to 1, got {weights.sum()!r}")
    times = trajectories[0].times
    for traj in trajectories[1:]:
        if traj.times.shape != times.shape or not np.allclose(traj.times, times, atol=1e-12):
            raise ArgumentError("trajectories do not share a time axis")
    xs = np.stack([traj.xs for traj in trajectories])
    vs = np.stack([traj.vs for traj in trajectories])
    return MixtureReference(
        times=times.copy(),
        mean_x=weights @ xs,
        mean_v=weights @ vs,
    )
