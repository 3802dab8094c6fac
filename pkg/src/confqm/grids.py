"""Grids, wave functions, and force fields on position-velocity space.

States live on uniform periodic grids.  Nodes are ``x_i = x_min + i*dx``
with ``dx = (x_max - x_min)/n_x`` (and likewise for v); the right edge is
the wrap point and is not itself a node.  A two-dimensional state is a
complex amplitude array indexed ``[i_x, j_v]`` with norm
``sqrt(sum |psi|^2 * dx * dv)``.

Gaussian packets use the amplitude convention ``exp(-(x-x0)^2/(4 sigma^2))``
so that the standard deviation of the *density* equals sigma exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ArgumentError,
    ConfigurationError,
    DataError,
    GridMismatchError,
    ResolutionError,
    SupportError,
)

__all__ = [
    "PhysicalConstants",
    "Grid2D",
    "WaveFunction2D",
    "WaveFunction1D",
    "ForceField",
    "ClassicalState",
    "make_grid",
    "gaussian_packet",
    "gaussian_packet_1d",
    "norm",
    "inner_product",
    "x_moments",
    "v_moments",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants in natural units; hbar defaults to 1."""

    hbar: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise ConfigurationError(f"hbar must be positive and finite, got {self.hbar}")


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid over position x (axis 0) and velocity v (axis 1)."""

    x_min: float
    x_max: float
    n_x: int
    v_min: float
    v_max: float
    n_v: int

    def __post_init__(self):
        for name, n in (("n_x", self.n_x), ("n_v", self.n_v)):
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise ConfigurationError(f"{name} must be an integer, got {n!r}")
            if n < 4 or n % 2 != 0:
                raise ConfigurationError(f"{name} must be an even integer >= 4, got {n}")
        for lo_name, lo, hi_name, hi in (
            ("x_min", self.x_min, "x_max", self.x_max),
            ("v_min", self.v_min, "v_max", self.v_max),
        ):
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise ConfigurationError(f"{lo_name}/{hi_name} must be finite")
            if not hi > lo:
                raise ConfigurationError(f"{hi_name} must exceed {lo_name}, got [{lo}, {hi}]")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def dv(self) -> float:
        return (self.v_max - self.v_min) / self.n_v

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)

    @property
    def vs(self) -> np.ndarray:
        return self.v_min + self.dv * np.arange(self.n_v)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_v)

    @property
    def cell(self) -> float:
        """Phase-space cell area dx*dv."""
        return self.dx * self.dv


def make_grid(x_min, x_max, n_x, v_min, v_max, n_v) -> Grid2D:
    """Construct a validated Grid2D."""
    return Grid2D(float(x_min), float(x_max), int(n_x), float(v_min), float(v_max), int(n_v))


def _own_amps(amps, shape) -> np.ndarray:
    out = np.array(amps, dtype=np.complex128, order="C", copy=True)
    if out.shape != shape:
        raise GridMismatchError(f"amplitude shape {out.shape} does not match grid shape {shape}")
    if not np.all(np.isfinite(out.view(np.float64))):
        raise DataError("amplitudes contain non-finite entries")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class WaveFunction2D:
    """Immutable complex amplitudes on a Grid2D, indexed [i_x, j_v]."""

    grid: Grid2D
    amps: np.ndarray
    constants: PhysicalConstants = PhysicalConstants()

    def __post_init__(self):
        object.__setattr__(self, "amps", _own_amps(self.amps, self.grid.shape))


@dataclass(frozen=True)
class WaveFunction1D:
    """Immutable complex amplitudes on a 1-D periodic position grid."""

    x_min: float
    x_max: float
    n_x: int
    amps: np.ndarray
    constants: PhysicalConstants = PhysicalConstants()

    def __post_init__(self):
        if self.n_x < 4 or self.n_x % 2 != 0:
            raise ConfigurationError(f"n_x must be an even integer >= 4, got {self.n_x}")
        if not self.x_max > self.x_min:
            raise ConfigurationError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        object.__setattr__(self, "amps", _own_amps(self.amps, (self.n_x,)))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_x)


@dataclass(frozen=True)
class ClassicalState:
    """A point (x, v) in position-velocity space."""

    x: float
    v: float


@dataclass(frozen=True)
class ForceField:
    """Force per unit mass f(x), its derivative, and a consistent potential.

    The field is specified by the force, not the potential: ``potential``
    is the antiderivative satisfying f(x) = -V'(x)/m.  Supported kinds:

    - ``free``:        f = 0,        V = 0
    - ``uniform``:     f = g,        V = -m*g*x
    - ``harmonic``:    f = -omega^2 x,  V = m*omega^2 x^2 / 2
    - ``polynomial``:  f = sum c_n x^n (degree <= 8), V = -m * int f
    """

    kind: str
    mass: float = 1.0
    g: float = 0.0
    omega: float = 0.0
    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("free", "uniform", "harmonic", "polynomial"):
            raise ConfigurationError(f"unknown force kind {self.kind!r}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ConfigurationError(f"mass must be positive and finite, got {self.mass}")
        if self.kind == "harmonic" and not (np.isfinite(self.omega) and self.omega > 0):
            raise ConfigurationError(f"harmonic force needs omega > 0, got {self.omega}")
        if self.kind == "uniform" and not np.isfinite(self.g):
            raise ConfigurationError(f"uniform force needs finite g, got {self.g}")
        if self.kind == "polynomial":
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
            if len(self.coeffs) == 0:
                raise ConfigurationError("polynomial force needs at least one coefficient")
            if len(self.coeffs) > 9:
                raise ConfigurationError(
                    f"polynomial force degree is capped at 8, got degree {len(self.coeffs) - 1}"
                )
            if not all(np.isfinite(c) for c in self.coeffs):
                raise ConfigurationError("polynomial coefficients must be finite")

    @classmethod
    def free(cls, mass: float = 1.0) -> "ForceField":
        return cls(kind="free", mass=mass)

    @classmethod
    def uniform(cls, g: float, mass: float = 1.0) -> "ForceField":
        return cls(kind="uniform", mass=mass, g=g)

    @classmethod
    def harmonic(cls, omega: float, mass: float = 1.0) -> "ForceField":
        return cls(kind="harmonic", mass=mass, omega=omega)

    @classmethod
    def polynomial(cls, coeffs, mass: float = 1.0) -> "ForceField":
        return cls(kind="polynomial", mass=mass, coeffs=tuple(coeffs))

    def force(self, x):
        """f(x), vectorized over x."""
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "uniform":
            return np.full_like(x, self.g)
        if self.kind == "harmonic":
            return -self.omega**2 * x
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def force_prime(self, x):
        """f'(x), vectorized over x."""
        x = np.asarray(x, dtype=float)
        if self.kind in ("free", "uniform"):
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return np.full_like(x, -self.omega**2)
        dcoeffs = np.polynomial.polynomial.polyder(self.coeffs)
        return np.polynomial.polynomial.polyval(x, dcoeffs)

    def potential(self, x):
        """V(x) with V'(x) = -m f(x) and V(0) = 0."""
        x = np.asarray(x, dtype=float)
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "uniform":
            return -self.mass * self.g * x
        if self.kind == "harmonic":
            return 0.5 * self.mass * self.omega**2 * x**2
        icoeffs = np.polynomial.polynomial.polyint(self.coeffs)
        return -self.mass * np.polynomial.polynomial.polyval(x, icoeffs)


def _packet_axis_checks(axis: str, lo, hi, d, center, sigma):
    if not np.isfinite(sigma) or sigma <= 0:
        raise ConfigurationError(f"sigma_{axis} must be positive, got {sigma}")
    if sigma < 3.0 * d:
        raise ResolutionError(
            f"sigma_{axis} = {sigma:g} is under-resolved: needs at least 3 cells (3*d{axis} = {3 * d:g})"
        )
    if center - 5.0 * sigma < lo or center + 5.0 * sigma > hi:
        raise SupportError(
            f"packet center {axis}0 = {center:g} is closer than 5*sigma_{axis} = {5 * sigma:g} "
            f"to the boundary of [{lo:g}, {hi:g}]"
        )


def gaussian_packet(
    grid: Grid2D,
    x0: float,
    v0: float,
    sigma_x: float,
    sigma_v: float,
    p0: float = 0.0,
    constants: PhysicalConstants = PhysicalConstants(),
) -> WaveFunction2D:
    """Normalized product Gaussian centered at (x0, v0) with carrier momentum p0.

    Amplitude ``exp(-(x-x0)^2/(4 sx^2) - (v-v0)^2/(4 sv^2) + i p0 x / hbar)``,
    normalized on the grid, so the density widths are Delta x = sigma_x and
    Delta v = sigma_v.  Widths must span at least 3 cells and the center must
    sit at least 5 sigma from every boundary.
    """
    _packet_axis_checks("x", grid.x_min, grid.x_max, grid.dx, x0, sigma_x)
    _packet_axis_checks("v", grid.v_min, grid.v_max, grid.dv, v0, sigma_v)
    xs, vs = grid.xs, grid.vs
    gx = np.exp(-((xs - x0) ** 2) / (4.0 * sigma_x**2) + 1j * p0 * xs / constants.hbar)
    gv = np.exp(-((vs - v0) ** 2) / (4.0 * sigma_v**2))
    amps = np.outer(gx, gv)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2) * grid.cell)
    return WaveFunction2D(grid, amps, constants)


def gaussian_packet_1d(
    x_min: float,
    x_max: float,
    n_x: int,
    x0: float,
    sigma_x: float,
    p0: float = 0.0,
    constants: PhysicalConstants = PhysicalConstants(),
) -> WaveFunction1D:
    """1-D analog of :func:`gaussian_packet` on a periodic position grid."""
    dx = (x_max - x_min) / n_x
    _packet_axis_checks("x", x_min, x_max, dx, x0, sigma_x)
    xs = x_min + dx * np.arange(n_x)
    amps = np.exp(-((xs - x0) ** 2) / (4.0 * sigma_x**2) + 1j * p0 * xs / constants.hbar)
    amps /= np.sqrt(np.sum(np.abs(amps) ** 2) * dx)
    return WaveFunction1D(x_min, x_max, n_x, amps, constants)


def _measure(wf) -> float:
    if isinstance(wf, WaveFunction2D):
        return wf.grid.cell
    if isinstance(wf, WaveFunction1D):
        return wf.dx
    raise ArgumentError(f"expected a wave function, got {type(wf).__name__}")


def _same_grid(a, b):
    if isinstance(a, WaveFunction2D) and isinstance(b, WaveFunction2D):
        if a.grid != b.grid:
            raise GridMismatchError("wave functions live on different grids")
    elif isinstance(a, WaveFunction1D) and isinstance(b, WaveFunction1D):
        if (a.x_min, a.x_max, a.n_x) != (b.x_min, b.x_max, b.n_x):
            raise GridMismatchError("wave functions live on different grids")
    else:
        raise GridMismatchError(
            f"cannot combine {type(a).__name__} with {type(b).__name__}"
        )


def norm(wf) -> float:
    """L2 norm sqrt(sum |psi|^2 * measure)."""
    return float(np.sqrt(np.sum(np.abs(wf.amps) ** 2) * _measure(wf)))


def inner_product(a, b) -> complex:
    """<a|b> = sum conj(a) * b * measure, conjugate-linear in the first slot."""
    _same_grid(a, b)
    return complex(np.vdot(a.amps, b.amps) * _measure(a))


def _axis_moments(weights: np.ndarray, coords: np.ndarray) -> tuple[float, float]:
    total = float(np.sum(weights))
    if total <= 0:
        raise DataError("cannot take moments of a zero-density state")
    mean = float(np.sum(weights * coords) / total)
    var = float(np.sum(weights * (coords - mean) ** 2) / total)
    return mean, np.sqrt(max(var, 0.0))


def x_moments(wf) -> tuple[float, float]:
    """(mean, std) of the position marginal density."""
    dens = np.abs(wf.amps) ** 2
    if isinstance(wf, WaveFunction2D):
        return _axis_moments(dens.sum(axis=1), wf.grid.xs)
    return _axis_moments(dens, wf.xs)


def v_moments(wf: WaveFunction2D) -> tuple[float, float]:
    """(mean, std) of the velocity marginal density."""
    if not isinstance(wf, WaveFunction2D):
        raise ArgumentError("v_moments needs a two-dimensional wave function")
    dens = np.abs(wf.amps) ** 2
    return _axis_moments(dens.sum(axis=0), wf.grid.vs)
