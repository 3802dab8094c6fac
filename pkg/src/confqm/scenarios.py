"""Declarative scenario configs, builtin scenarios, runners, and writers.

A scenario is a TOML document naming a grid, a force, one or more Gaussian
packets, an evolution spec, and requested outputs.  Four kinds exist:

- ``config_space``: the 2-D transport engine, optionally compared against
  classical trajectories or the characteristics integrator;
- ``photon``: 1-D dispersionless advection, compared against the shifted
  initial packet;
- ``emergence``: the same packet evolved by the 2-D engine and by standard
  1-D wave mechanics on the fixed-mass slice p = m v, with the mean maps
  <x> vs <x> and <p> vs m <v> reported;
- ``dispersion``: a velocity-narrow packet in the 2-D engine against a 1-D
  wave-mechanics packet of equal position width, contrasting the shear law
  with hbar-driven spreading.

Configs round-trip: ``parse -> serialize -> parse`` yields an equal config.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
import scipy.fft as sfft

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import (
    ArgumentError,
    ConfigurationError,
    DataError,
    OutputError,
    UnknownScenarioError,
)
from .grids import (
    ClassicalState,
    ForceField,
    Grid2D,
    PhysicalConstants,
    WaveFunction1D,
    WaveFunction2D,
    gaussian_packet,
    gaussian_packet_1d,
    make_grid,
)
from .observables import (
    _CSV_COLUMNS,
    ObservableSeries,
    mixture_reference,
)
from .propagators import (
    EvolveSpec,
    SupportBudget,
    check_wrap_budget,
    check_wrap_budget_1d,
    classical_trajectory,
    evolve_basic_qm,
    evolve_characteristics,
    evolve_config_space,
    evolve_photon,
)
from .spectra import build_hdyn_matrix, spectrum

SCENARIO_KINDS = ("config_space", "photon", "emergence", "dispersion")

_COMPARISONS_BY_KIND = {
    "config_space": ("classical", "characteristics"),
    "photon": ("photon",),
    "emergence": ("basic_qm",),
    "dispersion": ("basic_qm",),
}

SNAPSHOT_MAGIC = b"CFGQM1\x00\x00"


# ---------------------------------------------------------------------------
# config model


@dataclass(frozen=True)
class PacketSpec:
    """One Gaussian packet of a scenario's initial state."""

    x0: float
    v0: float
    sigma_x: float
    sigma_v: float
    p0: float = 0.0
    weight: float = 1.0


@dataclass(frozen=True)
class Axis1D:
    """Periodic position axis for the 1-D photon scenario."""

    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if self.n_x < 4 or self.n_x % 2 != 0:
            raise ConfigurationError(f"n_x must be an even integer >= 4, got {self.n_x}")
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_max > self.x_min):
            raise ConfigurationError(
                f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully validated scenario: everything a run needs except the out dir."""

    name: str
    kind: str
    constants: PhysicalConstants
    grid: Grid2D | None
    axis: Axis1D | None
    force: ForceField | None
    packets: tuple[PacketSpec, ...]
    evolve: EvolveSpec
    comparisons: tuple[str, ...]
    series_name: str
    snapshot_every: int
    spectrum: bool
    photon_s: int = 1
    photon_c: float = 1.0

    @property
    def t_final(self) -> float:
        return self.evolve.dt * self.evolve.n_steps


# ---------------------------------------------------------------------------
# parsing and validation


def _take(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigurationError(f"missing key {key!r} in {where}")
    return section.pop(key)


def _reject_leftovers(section: dict, where: str):
    if section:
        extra = ", ".join(sorted(repr(k) for k in section))
        raise ConfigurationError(f"unknown key(s) {extra} in {where}")


def _as_float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{where} must be a number, got {value!r}")
    return float(value)


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigurationError(f"{where} must be an integer, got {value!r}")
    return value


def _as_bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigurationError(f"{where} must be true or false, got {value!r}")
    return value


def _as_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise ConfigurationError(f"{where} must be a string, got {value!r}")
    return value


def _parse_force(section, where: str) -> ForceField:
    if not isinstance(section, dict):
        raise ConfigurationError(f"{where} must be a table")
    section = dict(section)
    kind = _as_str(_take(section, "kind", where), f"{where}.kind")
    mass = _as_float(section.pop("mass", 1.0), f"{where}.mass")
    if kind == "free":
        _reject_leftovers(section, where)
        return ForceField.free(mass=mass)
    if kind == "uniform":
        g = _as_float(_take(section, "g", where), f"{where}.g")
        _reject_leftovers(section, where)
        return ForceField.uniform(g, mass=mass)
    if kind == "harmonic":
        omega = _as_float(_take(section, "omega", where), f"{where}.omega")
        _reject_leftovers(section, where)
        return ForceField.harmonic(omega, mass=mass)
    if kind == "polynomial":
        coeffs = _take(section, "coeffs", where)
        if not isinstance(coeffs, list):
            raise ConfigurationError(f"{where}.coeffs must be an array of numbers")
        _reject_leftovers(section, where)
        return ForceField.polynomial(
            [_as_float(c, f"{where}.coeffs[{i}]") for i, c in enumerate(coeffs)], mass=mass
        )
    raise ConfigurationError(f"unknown force kind {kind!r} in {where}")


def _parse_packet(section, where: str, kind: str) -> PacketSpec:
    if not isinstance(section, dict):
        raise ConfigurationError(f"{where} must be a table")
    section = dict(section)
    x0 = _as_float(_take(section, "x0", where), f"{where}.x0")
    sigma_x = _as_float(_take(section, "sigma_x", where), f"{where}.sigma_x")
    p0 = _as_float(section.pop("p0", 0.0), f"{where}.p0")
    weight = _as_float(section.pop("weight", 1.0), f"{where}.weight")
    if kind == "photon":
        v0, sigma_v = 0.0, 0.0
    else:
        v0 = _as_float(_take(section, "v0", where), f"{where}.v0")
        sigma_v = _as_float(_take(section, "sigma_v", where), f"{where}.sigma_v")
    _reject_leftovers(section, where)
    if not weight > 0:
        raise ConfigurationError(f"{where}.weight must be positive, got {weight}")
    return PacketSpec(x0=x0, v0=v0, sigma_x=sigma_x, sigma_v=sigma_v, p0=p0, weight=weight)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario from TOML text."""
    return config_from_mapping(tomllib.loads(text))


def config_from_mapping(mapping: dict) -> ScenarioConfig:
    """Build a validated :class:`ScenarioConfig` from a parsed TOML mapping."""
    if not isinstance(mapping, dict):
        raise ConfigurationError("scenario config must be a TOML table")
    top = dict(mapping)

    name = _as_str(_take(top, "name", "config"), "name")
    if not name or not all(c.isalnum() or c in "-_" for c in name) or name[0] in "-_":
        raise ConfigurationError(
            f"scenario name must be alphanumeric with interior '-'/'_', got {name!r}"
        )
    kind = _as_str(_take(top, "kind", "config"), "kind")
    if kind not in SCENARIO_KINDS:
        raise UnknownScenarioError(
            f"unknown scenario kind {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}"
        )
    constants = PhysicalConstants(hbar=_as_float(top.pop("hbar", 1.0), "hbar"))

    comparisons_raw = top.pop("comparisons", [])
    if not isinstance(comparisons_raw, list):
        raise ConfigurationError("comparisons must be an array of strings")
    comparisons = tuple(_as_str(c, "comparisons entry") for c in comparisons_raw)
    allowed = _COMPARISONS_BY_KIND[kind]
    for c in comparisons:
        if c not in allowed:
            raise ConfigurationError(
                f"comparison {c!r} is not available for kind {kind!r} "
                f"(allowed: {', '.join(allowed) or 'none'})"
            )
    if len(set(comparisons)) != len(comparisons):
        raise ConfigurationError("comparisons must not repeat")

    grid_sec = _take(top, "grid", "config")
    if not isinstance(grid_sec, dict):
        raise ConfigurationError("[grid] must be a table")
    grid_sec = dict(grid_sec)
    x_min = _as_float(_take(grid_sec, "x_min", "[grid]"), "grid.x_min")
    x_max = _as_float(_take(grid_sec, "x_max", "[grid]"), "grid.x_max")
    n_x = _as_int(_take(grid_sec, "n_x", "[grid]"), "grid.n_x")
    grid: Grid2D | None = None
    axis: Axis1D | None = None
    if kind == "photon":
        _reject_leftovers(grid_sec, "[grid] (the photon scenario has no velocity axis)")
        axis = Axis1D(x_min, x_max, n_x)
    else:
        v_min = _as_float(_take(grid_sec, "v_min", "[grid]"), "grid.v_min")
        v_max = _as_float(_take(grid_sec, "v_max", "[grid]"), "grid.v_max")
        n_v = _as_int(_take(grid_sec, "n_v", "[grid]"), "grid.n_v")
        _reject_leftovers(grid_sec, "[grid]")
        grid = make_grid(x_min, x_max, n_x, v_min, v_max, n_v)

    force: ForceField | None = None
    if kind == "photon":
        if "force" in top:
            raise ConfigurationError("the photon scenario takes no [force] section")
        s_sec = _take(top, "photon", "config")
        if not isinstance(s_sec, dict):
            raise ConfigurationError("[photon] must be a table")
        s_sec = dict(s_sec)
        photon_s = _as_int(_take(s_sec, "s", "[photon]"), "photon.s")
        photon_c = _as_float(s_sec.pop("c", 1.0), "photon.c")
        _reject_leftovers(s_sec, "[photon]")
        if photon_s not in (-1, 1):
            raise ConfigurationError(f"photon.s must be +1 or -1, got {photon_s}")
        if not (np.isfinite(photon_c) and photon_c > 0):
            raise ConfigurationError(f"photon.c must be positive, got {photon_c}")
    else:
        if "photon" in top:
            raise ConfigurationError(f"[photon] only applies to the photon kind, not {kind!r}")
        photon_s, photon_c = 1, 1.0
        force = _parse_force(_take(top, "force", "config"), "[force]")
        if kind == "dispersion" and force.kind != "free":
            raise ConfigurationError(
                "the dispersion scenario contrasts shear with free spreading; "
                f"[force] must be free, got {force.kind!r}"
            )

    ev_sec = _take(top, "evolve", "config")
    if not isinstance(ev_sec, dict):
        raise ConfigurationError("[evolve] must be a table")
    ev_sec = dict(ev_sec)
    dt = _as_float(_take(ev_sec, "dt", "[evolve]"), "evolve.dt")
    n_steps = _as_int(_take(ev_sec, "n_steps", "[evolve]"), "evolve.n_steps")
    method = _as_str(ev_sec.pop("method", "strang"), "evolve.method")
    record_every = _as_int(ev_sec.pop("record_every", 1), "evolve.record_every")
    _reject_leftovers(ev_sec, "[evolve]")
    evolve = EvolveSpec(dt=dt, n_steps=n_steps, method=method, record_every=record_every)
    if kind != "config_space" and evolve.method != "strang":
        raise ConfigurationError(f"the {kind} scenario only supports the strang method")

    out_sec = top.pop("outputs", {})
    if not isinstance(out_sec, dict):
        raise ConfigurationError("[outputs] must be a table")
    out_sec = dict(out_sec)
    series_name = _as_str(out_sec.pop("series", f"{name}_series.csv"), "outputs.series")
    if not series_name or any(sep in series_name for sep in "/\\"):
        raise ConfigurationError(
            f"outputs.series must be a bare file name, got {series_name!r}"
        )
    snapshot_every = _as_int(out_sec.pop("snapshot_every", 0), "outputs.snapshot_every")
    spectrum_flag = _as_bool(out_sec.pop("spectrum", False), "outputs.spectrum")
    _reject_leftovers(out_sec, "[outputs]")
    if snapshot_every < 0:
        raise ConfigurationError(f"outputs.snapshot_every must be >= 0, got {snapshot_every}")
    if kind == "photon" and snapshot_every:
        raise ConfigurationError("field snapshots are only written by 2-D scenarios")
    if kind == "photon" and spectrum_flag:
        raise ConfigurationError("the energy spectrum needs a 2-D grid")

    pk_sec = _take(top, "packets", "config")
    if not isinstance(pk_sec, list) or not pk_sec:
        raise ConfigurationError("need at least one [[packets]] entry")
    packets = tuple(
        _parse_packet(p, f"[[packets]] entry {i}", kind) for i, p in enumerate(pk_sec)
    )
    _reject_leftovers(top, "config")

    total = sum(p.weight for p in packets)
    if abs(total - 1.0) > 1e-12:
        raise ConfigurationError(f"packet weights must sum to 1, got {total!r}")
    if kind in ("emergence", "dispersion"):
        if len(packets) != 1:
            raise ConfigurationError(f"the {kind} scenario compares a single packet")
        p = packets[0]
        assert force is not None
        if abs(p.p0 - force.mass * p.v0) > 1e-12:
            raise ConfigurationError(
                f"the {kind} scenario lives on the fixed-mass slice p = m v; "
                f"packet needs p0 = mass*v0 = {force.mass * p.v0!r}, got {p.p0!r}"
            )
    if kind == "photon" and len(packets) != 1:
        raise ConfigurationError("the photon scenario takes a single packet")

    return ScenarioConfig(
        name=name,
        kind=kind,
        constants=constants,
        grid=grid,
        axis=axis,
        force=force,
        packets=packets,
        evolve=evolve,
        comparisons=comparisons,
        series_name=series_name,
        snapshot_every=snapshot_every,
        spectrum=spectrum_flag,
        photon_s=photon_s,
        photon_c=photon_c,
    )


# ---------------------------------------------------------------------------
# serialization


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise ConfigurationError(f"cannot serialize {value!r} to TOML")


def config_to_mapping(config: ScenarioConfig) -> dict:
    """The canonical nested-dict form of a config (what TOML parses back to)."""
    out: dict = {
        "name": config.name,
        "kind": config.kind,
        "hbar": config.constants.hbar,
    }
    if config.comparisons:
        out["comparisons"] = list(config.comparisons)
    if config.kind == "photon":
        assert config.axis is not None
        out["grid"] = {
            "x_min": config.axis.x_min, "x_max": config.axis.x_max, "n_x": config.axis.n_x,
        }
        out["photon"] = {"s": config.photon_s, "c": config.photon_c}
    else:
        g = config.grid
        assert g is not None
        out["grid"] = {
            "x_min": g.x_min, "x_max": g.x_max, "n_x": g.n_x,
            "v_min": g.v_min, "v_max": g.v_max, "n_v": g.n_v,
        }
        f = config.force
        assert f is not None
        fsec: dict = {"kind": f.kind, "mass": f.mass}
        if f.kind == "uniform":
            fsec["g"] = f.g
        elif f.kind == "harmonic":
            fsec["omega"] = f.omega
        elif f.kind == "polynomial":
            fsec["coeffs"] = list(f.coeffs)
        out["force"] = fsec
    out["evolve"] = {
        "dt": config.evolve.dt,
        "n_steps": config.evolve.n_steps,
        "method": config.evolve.method,
        "record_every": config.evolve.record_every,
    }
    out["outputs"] = {
        "series": config.series_name,
        "snapshot_every": config.snapshot_every,
        "spectrum": config.spectrum,
    }
    pks = []
    for p in config.packets:
        if config.kind == "photon":
            pks.append({"x0": p.x0, "sigma_x": p.sigma_x, "p0": p.p0, "weight": p.weight})
        else:
            pks.append({
                "x0": p.x0, "v0": p.v0, "sigma_x": p.sigma_x, "sigma_v": p.sigma_v,
                "p0": p.p0, "weight": p.weight,
            })
    out["packets"] = pks
    return out


def serialize_config(config: ScenarioConfig) -> str:
    """Emit a config as TOML text; ``parse_config`` of the result is equal."""
    mapping = config_to_mapping(config)
    lines = []
    for key in ("name", "kind", "hbar", "comparisons"):
        if key in mapping:
            lines.append(f"{key} = {_toml_scalar(mapping[key])}")
    for section in ("grid", "force", "photon", "evolve", "outputs"):
        if section not in mapping:
            continue
        lines.append("")
        lines.append(f"[{section}]")
        for k, v in mapping[section].items():
            lines.append(f"{k} = {_toml_scalar(v)}")
    for packet in mapping["packets"]:
        lines.append("")
        lines.append("[[packets]]")
        for k, v in packet.items():
            lines.append(f"{k} = {_toml_scalar(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# overrides


def apply_override(mapping: dict, assignment: str) -> None:
    """Apply one ``dotted.key=value`` assignment to a parsed config mapping.

    The value is parsed as a TOML literal; integer path tokens index into
    arrays (``packets.0.x0=2.5``).  Intermediate tables are created as
    needed, but array indices must already exist.
    """
    key, sep, raw = assignment.partition("=")
    key, raw = key.strip(), raw.strip()
    if not sep or not key or not raw:
        raise ConfigurationError(f"override {assignment!r} must look like dotted.key=value")
    try:
        value = tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"override value {raw!r} is not a TOML literal: {exc}")
    path = key.split(".")
    node = mapping
    for i, token in enumerate(path):
        last = i == len(path) - 1
        if isinstance(node, list):
            if not token.isdigit() or int(token) >= len(node):
                raise ConfigurationError(
                    f"override path {key!r}: {token!r} is not an index into the array"
                )
            if last:
                node[int(token)] = value
            else:
                node = node[int(token)]
        elif isinstance(node, dict):
            if last:
                node[token] = value
            else:
                node = node.setdefault(token, {})
        else:
            raise ConfigurationError(f"override path {key!r} passes through a scalar at {token!r}")


def load_config(source, overrides=()) -> ScenarioConfig:
    """Load a scenario by builtin name or TOML file path, with overrides."""
    text = BUILTIN_SCENARIOS.get(str(source))
    if text is None:
        path = Path(source)
        if path.suffix != ".toml" and not path.exists():
            raise UnknownScenarioError(
                f"{source!r} is neither a builtin scenario "
                f"({', '.join(BUILTIN_SCENARIOS)}) nor a TOML file"
            )
        text = path.read_text()
    mapping = tomllib.loads(text)
    for assignment in overrides:
        apply_override(mapping, assignment)
    return config_from_mapping(mapping)


# ---------------------------------------------------------------------------
# initial states and prechecks


def build_initial_state(config: ScenarioConfig) -> WaveFunction2D:
    """The (possibly mixed) 2-D initial state of a scenario."""
    if config.grid is None:
        raise ArgumentError("the photon scenario has no 2-D state; use build_initial_state_1d")
    total = np.zeros(config.grid.shape, dtype=complex)
    for p in config.packets:
        part = gaussian_packet(
            config.grid, p.x0, p.v0, p.sigma_x, p.sigma_v, p0=p.p0, constants=config.constants
        )
        total += math.sqrt(p.weight) * part.amps
    total /= math.sqrt(np.sum(np.abs(total) ** 2) * config.grid.cell)
    return WaveFunction2D(config.grid, total, config.constants)


def build_initial_state_1d(config: ScenarioConfig) -> WaveFunction1D:
    """The 1-D initial state: the photon packet, or the fixed-mass slice twin."""
    p = config.packets[0]
    if config.kind == "photon":
        assert config.axis is not None
        return gaussian_packet_1d(
            config.axis.x_min, config.axis.x_max, config.axis.n_x,
            p.x0, p.sigma_x, p0=p.p0, constants=config.constants,
        )
    if config.kind in ("emergence", "dispersion"):
        grid = config.grid
        force = config.force
        assert grid is not None and force is not None
        return gaussian_packet_1d(
            grid.x_min, grid.x_max, grid.n_x,
            p.x0, p.sigma_x, p0=force.mass * p.v0, constants=config.constants,
        )
    raise ArgumentError(f"scenario kind {config.kind!r} has no 1-D state")


def budgets_for(config: ScenarioConfig) -> tuple[SupportBudget, ...]:
    """Per-packet wrap budgets from the nominal packet parameters."""
    return tuple(
        SupportBudget(p.x0, p.v0, p.sigma_x, p.sigma_v) for p in config.packets
    )


def check_scenario(config: ScenarioConfig) -> dict:
    """Build the initial state(s) and run the wrap-budget prechecks only."""
    summary = {
        "scenario": config.name,
        "kind": config.kind,
        "packets": len(config.packets),
        "t_final": config.t_final,
    }
    if config.kind == "photon":
        build_initial_state_1d(config)
        assert config.axis is not None
        summary["grid"] = f"x:[{config.axis.x_min:g},{config.axis.x_max:g}]x{config.axis.n_x}"
        summary["note"] = "periodic wrap is allowed for the photon scenario"
        return summary
    grid, force = config.grid, config.force
    assert grid is not None and force is not None
    build_initial_state(config)
    check_wrap_budget(grid, force, budgets_for(config), config.t_final)
    if config.kind in ("emergence", "dispersion"):
        wf1 = build_initial_state_1d(config)
        p = config.packets[0]
        check_wrap_budget_1d(
            wf1.x_min, wf1.x_max, p.x0, p.sigma_x, p.v0,
            force, config.constants.hbar, config.t_final,
        )
    summary["grid"] = (
        f"x:[{grid.x_min:g},{grid.x_max:g}]x{grid.n_x} "
        f"v:[{grid.v_min:g},{grid.v_max:g}]x{grid.n_v}"
    )
    return summary


# ---------------------------------------------------------------------------
# runners


@dataclass(frozen=True)
class RunReport:
    """Everything a scenario run produced."""

    config: ScenarioConfig
    series: ObservableSeries
    extra_series: dict
    summary: dict
    paths: tuple[Path, ...]


def _series_stats(series: ObservableSeries) -> dict:
    records = series.records
    final = {c: getattr(records[-1], c) for c in _CSV_COLUMNS}
    stats = {
        "grid": series.grid_summary,
        "dt": series.dt,
        "record_every": series.record_every,
        "records": len(records),
        "t_final": records[-1].t,
        "final": final,
        "norm_drift": max(abs(r.norm - 1.0) for r in records),
    }
    e0, e1 = records[0].energy_class, records[-1].energy_class
    stats["energy_drift"] = None if e0 is None else abs(e1 - e0)
    return stats


def _classical_comparison(config: ScenarioConfig, series: ObservableSeries) -> dict:
    force = config.force
    assert force is not None
    h = config.evolve.dt * config.evolve.record_every
    n = len(series.records) - 1
    trajectories = [
        classical_trajectory(ClassicalState(p.x0, p.v0), force, h, n)
        for p in config.packets
    ]
    mean_x = np.array([r.mean_x for r in series.records])
    mean_v = np.array([r.mean_v for r in series.records])
    if len(config.packets) == 1:
        traj = trajectories[0]
        return {
            "max_center_dev_x": float(np.max(np.abs(mean_x - traj.xs))),
            "max_center_dev_v": float(np.max(np.abs(mean_v - traj.vs))),
        }
    ref = mixture_reference([p.weight for p in config.packets], trajectories)
    xs = np.stack([t.xs for t in trajectories])
    vs = np.stack([t.vs for t in trajectories])
    min_sep = math.inf
    for i in range(len(trajectories)):
        for j in range(i + 1, len(trajectories)):
            d = np.sqrt((xs[i] - xs[j]) ** 2 + (vs[i] - vs[j]) ** 2)
            min_sep = min(min_sep, float(np.min(d)))
    width = max(max(p.sigma_x, p.sigma_v) for p in config.packets)
    return {
        "max_mixture_dev_x": float(np.max(np.abs(mean_x - ref.mean_x))),
        "max_mixture_dev_v": float(np.max(np.abs(mean_v - ref.mean_v))),
        "min_separation": min_sep,
        "min_separation_sigma": min_sep / width,
    }


def _characteristics_comparison(
    config: ScenarioConfig, wf0: WaveFunction2D, final: WaveFunction2D, workers: int
) -> dict:
    force = config.force
    assert force is not None
    ref = evolve_characteristics(wf0, force, config.t_final, workers=workers)
    l2 = math.sqrt(float(np.sum(np.abs(final.amps - ref.amps) ** 2)) * final.grid.cell)
    return {"l2_vs_characteristics": l2}


def _photon_comparison(
    config: ScenarioConfig, wf0: WaveFunction1D, final: WaveFunction1D
) -> dict:
    shift = config.photon_s * config.photon_c * config.t_final
    cells = shift / wf0.dx
    nearest = round(cells)
    if abs(cells - nearest) < 1e-9:
        ref = np.roll(wf0.amps, int(nearest) % wf0.n_x)
    else:
        k = 2.0 * np.pi * np.fft.fftfreq(wf0.n_x, d=wf0.dx)
        ref = sfft.ifft(sfft.fft(wf0.amps) * np.exp(-1j * k * shift))
    l2 = math.sqrt(float(np.sum(np.abs(final.amps - ref) ** 2)) * wf0.dx)
    return {"cells_shifted": float(cells), "l2_vs_shifted": l2}


def run_emergence_comparison(
    config: ScenarioConfig, *, workers: int = 1
) -> tuple[ObservableSeries, ObservableSeries, dict]:
    """Evolve the same packet in configuration space and in 1-D wave mechanics.

    Returns the two series (recorded on the same time axis) and a report of
    the mean maps: <x> against <x>, and <p> of the 1-D run against m <v> of
    the 2-D run.  For a uniform force the report also measures <p> = m g t
    growth on the 1-D side against the conserved <p> on the 2-D side.
    """
    if config.kind != "emergence":
        raise ArgumentError(f"run_emergence_comparison needs an emergence scenario, got {config.kind!r}")
    force = config.force
    assert force is not None
    wf2 = build_initial_state(config)
    _, series_cfg = evolve_config_space(
        wf2, force, config.evolve, budgets=budgets_for(config),
        snapshot_every=config.snapshot_every, workers=workers,
    )
    wf1 = build_initial_state_1d(config)
    _, series_bqm = evolve_basic_qm(wf1, force, config.evolve, workers=workers)
    series_cfg = replace(series_cfg, scenario=config.name)
    series_bqm = replace(series_bqm, scenario=f"{config.name}-basic-qm")

    m = force.mass
    t = np.array([r.t for r in series_cfg.records])
    x_cfg = np.array([r.mean_x for r in series_cfg.records])
    v_cfg = np.array([r.mean_v for r in series_cfg.records])
    p_cfg = np.array([r.mean_p for r in series_cfg.records])
    x_bqm = np.array([r.mean_x for r in series_bqm.records])
    p_bqm = np.array([r.mean_p for r in series_bqm.records])
    report = {
        "mass": m,
        "t_final": float(t[-1]),
        "max_mean_x_gap": float(np.max(np.abs(x_cfg - x_bqm))),
        "max_momentum_map_residual": float(np.max(np.abs(p_bqm - m * v_cfg))),
        "p_config_drift": float(np.max(np.abs(p_cfg - p_cfg[0]))),
        "p_bqm_drift": float(np.max(np.abs(p_bqm - p_bqm[0]))),
    }
    if force.kind == "uniform":
        report["p_bqm_linear_growth_residual"] = float(
            np.max(np.abs(p_bqm - p_bqm[0] - m * force.g * t))
        )
    return series_cfg, series_bqm, report


def run_dispersion_comparison(
    config: ScenarioConfig, *, workers: int = 1
) -> tuple[ObservableSeries, ObservableSeries, dict]:
    """Contrast transport shear with hbar-driven spreading for a free packet.

    The 2-D width must follow the shear law std_x(t)^2 = sx0^2 + (sv0 t)^2;
    the 1-D wave-mechanics width must follow the spreading law
    std_x(t)^2 = sx0^2 + (hbar t / (2 m sx0))^2.  Both laws are checked
    against the recorded t = 0 widths and reported with a 1e-4 gate.
    """
    if config.kind != "dispersion":
        raise ArgumentError(f"run_dispersion_comparison needs a dispersion scenario, got {config.kind!r}")
    force = config.force
    assert force is not None
    wf2 = build_initial_state(config)
    _, series_cfg = evolve_config_space(
        wf2, force, config.evolve, budgets=budgets_for(config),
        snapshot_every=config.snapshot_every, workers=workers,
    )
    wf1 = build_initial_state_1d(config)
    _, series_bqm = evolve_basic_qm(wf1, force, config.evolve, workers=workers)
    series_cfg = replace(series_cfg, scenario=config.name)
    series_bqm = replace(series_bqm, scenario=f"{config.name}-basic-qm")

    t = np.array([r.t for r in series_cfg.records])
    sx_cfg = np.array([r.std_x for r in series_cfg.records])
    sv0 = series_cfg.records[0].std_v
    shear = np.sqrt(sx_cfg[0] ** 2 + (sv0 * t) ** 2)
    sx_bqm = np.array([r.std_x for r in series_bqm.records])
    hbar, m = config.constants.hbar, force.mass
    spread = np.sqrt(sx_bqm[0] ** 2 + (hbar * t / (2.0 * m * sx_bqm[0])) ** 2)
    report = {
        "t_final": float(t[-1]),
        "sigma_v_cells": sv0 / (config.grid.dv if config.grid else 1.0),
        "std_x_config_final": float(sx_cfg[-1]),
        "std_x_bqm_final": float(sx_bqm[-1]),
        "max_shear_law_dev": float(np.max(np.abs(sx_cfg - shear))),
        "max_spreading_law_dev": float(np.max(np.abs(sx_bqm - spread))),
    }
    report["shear_law_ok"] = report["max_shear_law_dev"] <= 1e-4
    report["spreading_law_ok"] = report["max_spreading_law_dev"] <= 1e-4
    return series_cfg, series_bqm, report


def run_scenario(config: ScenarioConfig, out_dir=None, *, workers: int = 1) -> RunReport:
    """Run a scenario end to end; write outputs when ``out_dir`` is given."""
    extra_series: dict = {}
    comparisons: dict = {}
    spectrum_values = None

    if config.kind == "config_space":
        force = config.force
        assert force is not None
        wf0 = build_initial_state(config)
        final, series = evolve_config_space(
            wf0, force, config.evolve, budgets=budgets_for(config),
            snapshot_every=config.snapshot_every, workers=workers,
        )
        series = replace(series, scenario=config.name)
        if "classical" in config.comparisons:
            comparisons["classical"] = _classical_comparison(config, series)
        if "characteristics" in config.comparisons:
            comparisons["characteristics"] = _characteristics_comparison(
                config, wf0, final, workers
            )
    elif config.kind == "photon":
        wf0 = build_initial_state_1d(config)
        final, series = evolve_photon(
            wf0, config.photon_s, config.photon_c, config.evolve, workers=workers
        )
        series = replace(series, scenario=config.name)
        if "photon" in config.comparisons:
            comparisons["photon"] = _photon_comparison(config, wf0, final)
    elif config.kind == "emergence":
        series, series_bqm, report = run_emergence_comparison(config, workers=workers)
        extra_series["basic_qm"] = series_bqm
        comparisons["basic_qm"] = report
    else:  # dispersion
        series, series_bqm, report = run_dispersion_comparison(config, workers=workers)
        extra_series["basic_qm"] = series_bqm
        comparisons["basic_qm"] = report

    summary = {"scenario": config.name, "kind": config.kind}
    summary.update(_series_stats(series))
    if extra_series:
        summary["basic_qm"] = _series_stats(extra_series["basic_qm"])
    if comparisons:
        summary["comparisons"] = comparisons
    if config.spectrum:
        grid = config.grid
        assert grid is not None and config.force is not None
        op = build_hdyn_matrix(grid, config.force, constants=config.constants)
        spectrum_values = spectrum(op)
        summary["spectrum"] = {
            "dim": int(spectrum_values.size),
            "min": float(spectrum_values[0]),
            "max": float(spectrum_values[-1]),
        }

    paths: list[Path] = []
    if out_dir is not None:
        base = Path(out_dir)
        try:
            base.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise OutputError(f"cannot create output directory {base}: {exc}")
        series_path = base / config.series_name
        write_series_csv(series_path, series)
        paths.append(series_path)
        if extra_series:
            bqm_path = series_path.with_name(
                series_path.stem + "_bqm" + series_path.suffix
            )
            write_series_csv(bqm_path, extra_series["basic_qm"])
            paths.append(bqm_path)
        for index, state in series.snapshots:
            snap_path = base / f"{config.name}_snapshot_{index:06d}.snap"
            write_snapshot(snap_path, state, series.records[index].t)
            paths.append(snap_path)
        if spectrum_values is not None:
            spec_path = base / f"{config.name}_spectrum.csv"
            write_spectrum_csv(spec_path, spectrum_values)
            paths.append(spec_path)
        report_path = base / f"{config.name}_report.json"
        write_report_json(report_path, summary)
        paths.append(report_path)

    return RunReport(
        config=config, series=series, extra_series=extra_series,
        summary=summary, paths=tuple(paths),
    )


# ---------------------------------------------------------------------------
# writers


def format_float(value) -> str:
    """17-significant-digit decimal form; empty string for missing values."""
    return "" if value is None else "{:.17g}".format(value)


def _write_text(path, text: str):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}")


def write_series_csv(path, series: ObservableSeries):
    """Write a series as CSV with the fixed 11-column header."""
    lines = [",".join(_CSV_COLUMNS)]
    for r in series.records:
        lines.append(",".join(format_float(getattr(r, c)) for c in _CSV_COLUMNS))
    _write_text(path, "\n".join(lines) + "\n")


def write_spectrum_csv(path, eigenvalues):
    """Write sorted eigenvalues as ``index,eigenvalue`` rows."""
    lines = ["index,eigenvalue"]
    for i, ev in enumerate(np.asarray(eigenvalues, dtype=float)):
        lines.append(f"{i},{format_float(ev)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_report_json(path, summary: dict):
    """Write the run summary as stable, sorted JSON."""
    _write_text(path, json.dumps(summary, indent=2, sort_keys=True) + "\n")


def write_snapshot(path, wf: WaveFunction2D, t: float):
    """Write one field snapshot in the binary little-endian layout.

    Layout: magic ``CFGQM1\\x00\\x00``; u64 n_x, n_v; f64 x_min, x_max,
    v_min, v_max; f64 time; then n_x*n_v amplitudes as interleaved
    (re, im) f64 pairs, row-major over x then v.
    """
    g = wf.grid
    header = SNAPSHOT_MAGIC + struct.pack(
        "<QQ5d", g.n_x, g.n_v, g.x_min, g.x_max, g.v_min, g.v_max, float(t)
    )
    inter = np.empty((g.n_x, g.n_v, 2), dtype="<f8")
    inter[..., 0] = wf.amps.real
    inter[..., 1] = wf.amps.imag
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(inter.tobytes())
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}")


def read_snapshot(path, constants: PhysicalConstants = PhysicalConstants()):
    """Read a snapshot file back into a state and its time."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}")
    head = len(SNAPSHOT_MAGIC) + struct.calcsize("<QQ5d")
    if len(blob) < head or blob[: len(SNAPSHOT_MAGIC)] != SNAPSHOT_MAGIC:
        raise DataError(f"{path} is not a field snapshot (bad magic or truncated header)")
    n_x, n_v, x_min, x_max, v_min, v_max, t = struct.unpack(
        "<QQ5d", blob[len(SNAPSHOT_MAGIC):head]
    )
    expected = head + 16 * n_x * n_v
    if len(blob) != expected:
        raise DataError(f"{path} holds {len(blob)} bytes, expected {expected}")
    flat = np.frombuffer(blob, dtype="<f8", offset=head).reshape(n_x, n_v, 2)
    amps = flat[..., 0] + 1j * flat[..., 1]
    grid = make_grid(x_min, x_max, n_x, v_min, v_max, n_v)
    return WaveFunction2D(grid, amps, constants), float(t)


# ---------------------------------------------------------------------------
# builtin scenarios


BUILTIN_SCENARIOS = {
    "free": """\
name = "free"
kind = "config_space"
hbar = 1.0
comparisons = ["classical"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "free"
mass = 1.0

[evolve]
dt = 0.002
n_steps = 500
method = "strang"
record_every = 5

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 0.0
v0 = 2.0
sigma_x = 0.5
sigma_v = 0.5
p0 = 1.5
weight = 1.0
""",
    "free-fall": """\
name = "free-fall"
kind = "config_space"
hbar = 1.0
comparisons = ["classical"]

[grid]
x_min = -6.0
x_max = 12.0
n_x = 256
v_min = -4.0
v_max = 16.0
n_v = 256

[force]
kind = "uniform"
g = 9.81
mass = 1.0

[evolve]
dt = 0.002
n_steps = 500
method = "strang"
record_every = 5

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5
p0 = 0.0
weight = 1.0
""",
    "harmonic": """\
name = "harmonic"
kind = "config_space"
hbar = 1.0
comparisons = ["classical"]

[grid]
x_min = -6.0
x_max = 6.0
n_x = 256
v_min = -6.0
v_max = 6.0
n_v = 256

[force]
kind = "harmonic"
omega = 1.0
mass = 1.0

[evolve]
dt = 0.0010005072145190424
n_steps = 6280
method = "strang"
record_every = 10

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 1.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5
p0 = 1.5
weight = 1.0
""",
    "photon": """\
name = "photon"
kind = "photon"
hbar = 1.0
comparisons = ["photon"]

[grid]
x_min = -10.0
x_max = 10.0
n_x = 512

[photon]
s = 1
c = 1.0

[evolve]
dt = 0.001
n_steps = 10000
method = "strang"
record_every = 100

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = -5.0
sigma_x = 0.5
p0 = 0.0
weight = 1.0
""",
    "emergence": """\
name = "emergence"
kind = "emergence"
hbar = 1.0

[grid]
x_min = -6.0
x_max = 6.0
n_x = 256
v_min = -6.0
v_max = 6.0
n_v = 256

[force]
kind = "harmonic"
omega = 1.0
mass = 1.0

[evolve]
dt = 0.0010005072145190424
n_steps = 6280
method = "strang"
record_every = 10

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 1.0
v0 = 0.0
sigma_x = 0.7071067811865476
sigma_v = 0.5
p0 = 0.0
weight = 1.0
""",
    "mixture": """\
name = "mixture"
kind = "config_space"
hbar = 1.0
comparisons = ["classical"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 256
v_min = -8.0
v_max = 8.0
n_v = 256

[force]
kind = "harmonic"
omega = 1.0
mass = 1.0

[evolve]
dt = 0.001
n_steps = 1000
method = "strang"
record_every = 10

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 3.0
v0 = 0.0
sigma_x = 0.35
sigma_v = 0.35
p0 = 0.0
weight = 0.5

[[packets]]
x0 = -3.0
v0 = 0.0
sigma_x = 0.35
sigma_v = 0.35
p0 = 0.0
weight = 0.3

[[packets]]
x0 = 0.0
v0 = 3.0
sigma_x = 0.35
sigma_v = 0.35
p0 = 0.0
weight = 0.2
""",
    "dispersion-comparison": """\
name = "dispersion-comparison"
kind = "dispersion"
hbar = 1.0

[grid]
x_min = -10.0
x_max = 10.0
n_x = 256
v_min = -1.5
v_max = 1.5
n_v = 256

[force]
kind = "free"
mass = 1.0

[evolve]
dt = 0.002
n_steps = 500
method = "strang"
record_every = 50

[outputs]
snapshot_every = 0
spectrum = false

[[packets]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.03515625
p0 = 0.0
weight = 1.0
""",
}
