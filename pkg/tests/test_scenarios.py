"""Scenario configs: parsing, overrides, runners, and file writers."""

import json
import math
import struct

import numpy as np
import pytest

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from confqm.errors import (
    ArgumentError,
    ConfigurationError,
    DataError,
    ResourceError,
    SupportError,
    UnknownScenarioError,
)
from confqm.grids import PhysicalConstants, gaussian_packet, make_grid, norm, x_moments
from confqm.observables import ObservableRecord, ObservableSeries
from confqm.scenarios import (
    BUILTIN_SCENARIOS,
    apply_override,
    build_initial_state,
    build_initial_state_1d,
    check_scenario,
    config_to_mapping,
    load_config,
    parse_config,
    read_snapshot,
    run_dispersion_comparison,
    run_emergence_comparison,
    run_scenario,
    serialize_config,
    write_series_csv,
    write_snapshot,
    write_spectrum_csv,
)

SMALL_FREE = """
name = "smallfree"
kind = "config_space"
comparisons = ["classical", "characteristics"]

[grid]
x_min = -8.0
x_max = 8.0
n_x = 64
v_min = -8.0
v_max = 8.0
n_v = 64

[force]
kind = "free"

[evolve]
dt = 0.002
n_steps = 50
record_every = 10

[outputs]
snapshot_every = 2

[[packets]]
x0 = 0.0
v0 = 1.0
sigma_x = 0.8
sigma_v = 0.8
"""

EMERGENCE_FREE = """
name = "em-free"
kind = "emergence"

[grid]
x_min = -6.0
x_max = 6.0
n_x = 128
v_min = -6.0
v_max = 6.0
n_v = 128

[force]
kind = "free"
mass = 2.0

[evolve]
dt = 0.002
n_steps = 250
record_every = 25

[[packets]]
x0 = 0.0
v0 = 1.0
sigma_x = 0.5
sigma_v = 0.5
p0 = 2.0
"""

EMERGENCE_UNIFORM = """
name = "em-uniform"
kind = "emergence"

[grid]
x_min = -6.0
x_max = 8.0
n_x = 128
v_min = -4.0
v_max = 8.0
n_v = 128

[force]
kind = "uniform"
g = 3.0

[evolve]
dt = 0.002
n_steps = 250
record_every = 25

[[packets]]
x0 = 0.0
v0 = 0.0
sigma_x = 0.5
sigma_v = 0.5
"""


class TestParsing:
    def test_builtins_parse_and_round_trip(self):
        for name, text in BUILTIN_SCENARIOS.items():
            config = parse_config(text)
            assert config.name == name
            again = parse_config(serialize_config(config))
            assert again == config

    def test_defaults(self):
        config = parse_config(SMALL_FREE)
        assert config.constants == PhysicalConstants(hbar=1.0)
        assert config.evolve.method == "strang"
        assert config.series_name == "smallfree_series.csv"
        assert config.spectrum is False
        assert config.packets[0].p0 == 0.0
        assert config.packets[0].weight == 1.0
        assert config.t_final == pytest.approx(0.1)

    def test_unknown_top_key_rejected(self):
        with pytest.raises(ConfigurationError, match="wavelength"):
            parse_config(SMALL_FREE + "\nwavelength = 3.0\n")

    def test_unknown_kind(self):
        bad = SMALL_FREE.replace('kind = "config_space"', 'kind = "warpdrive"')
        with pytest.raises(UnknownScenarioError, match="warpdrive"):
            parse_config(bad)

    def test_missing_grid_key(self):
        bad = SMALL_FREE.replace("v_max = 8.0\n", "")
        with pytest.raises(ConfigurationError, match="v_max"):
            parse_config(bad)

    def test_bad_name(self):
        for name in ("", "two words", "-lead", "a/b"):
            bad = SMALL_FREE.replace('name = "smallfree"', f'name = "{name}"')
            with pytest.raises(ConfigurationError, match="name"):
                parse_config(bad)

    def test_photon_constraints(self):
        text = BUILTIN_SCENARIOS["photon"]
        with pytest.raises(ConfigurationError, match="velocity axis"):
            parse_config(text.replace("n_x = 512", "n_x = 512\nv_min = -1.0"))
        with pytest.raises(ConfigurationError, match="force"):
            parse_config(text.replace("[photon]", '[force]\nkind = "free"\n\n[photon]'))
        with pytest.raises(ConfigurationError, match="snapshot"):
            parse_config(text.replace("snapshot_every = 0", "snapshot_every = 1"))
        with pytest.raises(ConfigurationError, match="s must be"):
            parse_config(text.replace("s = 1", "s = 2"))

    def test_photon_section_only_for_photon(self):
        with pytest.raises(ConfigurationError, match="photon"):
            parse_config(SMALL_FREE + "\n[photon]\ns = 1\n")

    def test_comparisons_checked_per_kind(self):
        bad = SMALL_FREE.replace(
            'comparisons = ["classical", "characteristics"]',
            'comparisons = ["basic_qm"]',
        )
        with pytest.raises(ConfigurationError, match="basic_qm"):
            parse_config(bad)
        bad = SMALL_FREE.replace(
            'comparisons = ["classical", "characteristics"]',
            'comparisons = ["classical", "classical"]',
        )
        with pytest.raises(ConfigurationError, match="repeat"):
            parse_config(bad)

    def test_weights_must_sum_to_one(self):
        bad = SMALL_FREE + "\n[[packets]]\nx0 = 2.0\nv0 = 0.0\nsigma_x = 0.8\nsigma_v = 0.8\n"
        with pytest.raises(ConfigurationError, match="sum to 1"):
            parse_config(bad)
        bad = SMALL_FREE.replace("v0 = 1.0", "v0 = 1.0\nweight = -1.0")
        with pytest.raises(ConfigurationError, match="positive"):
            parse_config(bad)

    def test_emergence_needs_slice_carrier(self):
        bad = EMERGENCE_FREE.replace("p0 = 2.0", "p0 = 0.5")
        with pytest.raises(ConfigurationError, match="p0 = mass"):
            parse_config(bad)

    def test_emergence_single_packet(self):
        bad = EMERGENCE_FREE + (
            "\n[[packets]]\nx0 = 1.0\nv0 = 1.0\nsigma_x = 0.5\nsigma_v = 0.5\np0 = 2.0\n"
        )
        with pytest.raises(ConfigurationError, match="single packet|sum to 1"):
            parse_config(bad)

    def test_dispersion_needs_free_force(self):
        bad = BUILTIN_SCENARIOS["dispersion-comparison"].replace(
            'kind = "free"', 'kind = "harmonic"\nomega = 1.0'
        )
        with pytest.raises(ConfigurationError, match="free"):
            parse_config(bad)

    def test_record_every_must_divide(self):
        bad = SMALL_FREE.replace("record_every = 10", "record_every = 7")
        with pytest.raises(ConfigurationError, match="divide"):
            parse_config(bad)

    def test_bad_toml_surfaces(self):
        with pytest.raises(tomllib.TOMLDecodeError):
            parse_config("name = [")

    def test_mapping_matches_parse(self):
        config = parse_config(SMALL_FREE)
        mapping = config_to_mapping(config)
        assert mapping["evolve"]["dt"] == 0.002
        assert mapping["packets"][0]["sigma_v"] == 0.8


class TestOverrides:
    def test_scalar_override(self):
        config = load_config("free", overrides=["evolve.dt=0.004", "evolve.n_steps=250"])
        assert config.evolve.dt == 0.004
        assert config.evolve.n_steps == 250

    def test_packet_index_override(self):
        config = load_config("mixture", overrides=["packets.1.x0=-2.5"])
        assert config.packets[1].x0 == -2.5

    def test_override_creates_missing_table(self):
        mapping = tomllib.loads(EMERGENCE_FREE)
        assert "outputs" not in mapping
        apply_override(mapping, "outputs.snapshot_every=3")
        assert mapping["outputs"]["snapshot_every"] == 3

    def test_bad_overrides(self):
        mapping = tomllib.loads(SMALL_FREE)
        with pytest.raises(ConfigurationError, match="index"):
            apply_override(mapping, "packets.5.x0=1.0")
        with pytest.raises(ConfigurationError, match="TOML literal"):
            apply_override(mapping, "evolve.dt=forty")
        with pytest.raises(ConfigurationError, match="dotted.key=value"):
            apply_override(mapping, "evolve.dt")
        with pytest.raises(ConfigurationError, match="scalar"):
            apply_override(mapping, "name.sub=1")

    def test_string_values_need_quotes(self):
        config = load_config("free", overrides=['evolve.method="characteristics"'])
        assert config.evolve.method == "characteristics"


class TestLoadConfig:
    def test_builtin_names(self):
        for name in BUILTIN_SCENARIOS:
            assert load_config(name).name == name

    def test_path_load(self, tmp_path):
        path = tmp_path / "custom.toml"
        path.write_text(SMALL_FREE)
        assert load_config(path).name == "smallfree"
        assert load_config(str(path)).name == "smallfree"

    def test_unknown_source(self):
        with pytest.raises(UnknownScenarioError, match="builtin"):
            load_config("not-a-scenario")

    def test_missing_toml_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / "missing.toml")


class TestInitialStates:
    def test_single_packet_matches_gaussian(self):
        config = parse_config(SMALL_FREE)
        wf = build_initial_state(config)
        direct = gaussian_packet(config.grid, 0.0, 1.0, 0.8, 0.8)
        np.testing.assert_allclose(wf.amps, direct.amps, atol=1e-15)

    def test_mixture_mean(self):
        config = load_config("mixture")
        wf = build_initial_state(config)
        assert norm(wf) == pytest.approx(1.0, abs=1e-12)
        mean_x, _ = x_moments(wf)
        assert mean_x == pytest.approx(0.5 * 3.0 - 0.3 * 3.0, abs=1e-6)

    def test_emergence_slice_state(self):
        config = parse_config(EMERGENCE_FREE)
        wf1 = build_initial_state_1d(config)
        dens = np.abs(wf1.amps) ** 2
        assert float(dens.sum() * wf1.dx) == pytest.approx(1.0, abs=1e-12)
        k = 2.0 * np.pi * np.fft.fftfreq(wf1.n_x, d=wf1.dx)
        k[wf1.n_x // 2] = 0.0
        power = np.abs(np.fft.fft(wf1.amps)) ** 2
        mean_p = float((power * k).sum() / power.sum())
        assert mean_p == pytest.approx(2.0, abs=1e-9)

    def test_photon_state_is_1d_only(self):
        config = load_config("photon")
        with pytest.raises(ArgumentError, match="1d"):
            build_initial_state(config)


class TestCheckScenario:
    def test_all_builtins_pass(self):
        for name in BUILTIN_SCENARIOS:
            summary = check_scenario(load_config(name))
            assert summary["scenario"] == name

    def test_budget_violation_caught(self):
        # the packet starts legally but drifts off the grid by t = 2
        config = load_config(
            "free", overrides=["packets.0.v0=3.0", "evolve.n_steps=1000"]
        )
        with pytest.raises(SupportError, match="support x"):
            check_scenario(config)

    def test_photon_wrap_note(self):
        summary = check_scenario(load_config("photon"))
        assert "wrap" in summary["note"]


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("smallfree")
    report = run_scenario(parse_config(SMALL_FREE), out_dir=out)
    return report, out


class TestRunScenario:
    def test_records_and_snapshots(self, small_run):
        report, _ = small_run
        series = report.series
        assert len(series.records) == 6
        assert [idx for idx, _ in series.snapshots] == [0, 2, 4]
        assert series.scenario == "smallfree"

    def test_comparisons_present(self, small_run):
        report, _ = small_run
        comps = report.summary["comparisons"]
        assert comps["classical"]["max_center_dev_x"] < 1e-10
        assert comps["characteristics"]["l2_vs_characteristics"] < 1e-9

    def test_files_written(self, small_run):
        report, out = small_run
        names = sorted(p.name for p in report.paths)
        assert names == [
            "smallfree_report.json",
            "smallfree_series.csv",
            "smallfree_snapshot_000000.snap",
            "smallfree_snapshot_000002.snap",
            "smallfree_snapshot_000004.snap",
        ]
        for p in report.paths:
            assert p.exists() and p.stat().st_size > 0

    def test_csv_shape(self, small_run):
        report, out = small_run
        lines = (out / "smallfree_series.csv").read_text().splitlines()
        assert lines[0] == "t,mean_x,mean_v,mean_p,mean_a,std_x,std_v,std_p,std_a,energy_class,norm"
        assert len(lines) == 7
        row = lines[1].split(",")
        assert float(row[0]) == 0.0
        assert float(row[2]) == pytest.approx(1.0, abs=1e-12)
        assert all(cell for cell in row)  # 2-D records populate every column

    def test_report_json(self, small_run):
        _, out = small_run
        summary = json.loads((out / "smallfree_report.json").read_text())
        assert summary["scenario"] == "smallfree"
        assert summary["records"] == 6
        assert summary["norm_drift"] < 1e-12

    def test_snapshot_round_trip(self, small_run):
        report, out = small_run
        wf, t = read_snapshot(out / "smallfree_snapshot_000002.snap")
        idx = dict(report.series.snapshots)
        np.testing.assert_array_equal(wf.amps, idx[2].amps)
        assert t == report.series.records[2].t
        assert wf.grid == idx[2].grid

    def test_no_out_dir_writes_nothing(self):
        report = run_scenario(parse_config(SMALL_FREE))
        assert report.paths == ()


class TestRunPhoton:
    def test_fractional_cell_shift(self):
        config = load_config(
            "photon", overrides=["evolve.n_steps=1000", "evolve.record_every=100"]
        )
        report = run_scenario(config)
        comp = report.summary["comparisons"]["photon"]
        assert comp["cells_shifted"] == pytest.approx(25.6)
        assert comp["l2_vs_shifted"] < 1e-12
        final = report.summary["final"]
        assert final["mean_v"] == 1.0
        assert final["mean_a"] is None
        assert final["energy_class"] is None

    def test_photon_csv_has_empty_cells(self, tmp_path):
        config = load_config(
            "photon", overrides=["evolve.n_steps=200", "evolve.record_every=100"]
        )
        run_scenario(config, out_dir=tmp_path)
        lines = (tmp_path / "photon_series.csv").read_text().splitlines()
        row = lines[1].split(",")
        assert row[4] == "" and row[8] == "" and row[9] == ""  # mean_a, std_a, energy
        assert float(row[2]) == 1.0  # carrier velocity column


class TestEmergenceRunner:
    def test_free_mass_two_maps_agree(self):
        config = parse_config(EMERGENCE_FREE)
        series_cfg, series_bqm, report = run_emergence_comparison(config)
        assert report["mass"] == 2.0
        assert report["max_mean_x_gap"] < 1e-8
        assert report["max_momentum_map_residual"] < 1e-8
        assert series_bqm.records[-1].mean_p == pytest.approx(2.0, abs=1e-9)
        assert series_cfg.records[-1].mean_v == pytest.approx(1.0, abs=1e-9)

    def test_uniform_force_splits_the_momenta(self):
        config = parse_config(EMERGENCE_UNIFORM)
        _, series_bqm, report = run_emergence_comparison(config)
        # transport conserves <p>; wave mechanics grows it as m g t
        assert report["p_config_drift"] < 1e-8
        assert report["p_bqm_drift"] == pytest.approx(3.0 * 0.5, abs=1e-8)
        assert report["p_bqm_linear_growth_residual"] < 1e-8
        assert report["max_mean_x_gap"] < 1e-6

    def test_kind_guard(self):
        with pytest.raises(ArgumentError, match="emergence"):
            run_emergence_comparison(load_config("free"))


class TestDispersionRunner:
    def test_builtin_laws_hold(self):
        config = load_config("dispersion-comparison")
        series_cfg, series_bqm, report = run_dispersion_comparison(config)
        assert report["shear_law_ok"] and report["spreading_law_ok"]
        assert report["max_shear_law_dev"] < 1e-10
        assert report["max_spreading_law_dev"] < 1e-10
        # same initial width, visibly different growth
        assert series_cfg.records[0].std_x == pytest.approx(
            series_bqm.records[0].std_x, abs=1e-9
        )
        assert report["std_x_bqm_final"] > 2.0 * report["std_x_config_final"]
        assert report["std_x_bqm_final"] == pytest.approx(math.sqrt(1.25), abs=1e-6)

    def test_kind_guard(self):
        with pytest.raises(ArgumentError, match="dispersion"):
            run_dispersion_comparison(load_config("mixture"))


class TestSpectrumOutput:
    SPEC32 = """
name = "spec32"
kind = "config_space"

[grid]
x_min = -8.0
x_max = 8.0
n_x = 32
v_min = -8.0
v_max = 8.0
n_v = 32

[force]
kind = "harmonic"
omega = 1.0

[evolve]
dt = 0.01
n_steps = 10
record_every = 5

[outputs]
spectrum = true

[[packets]]
x0 = 0.0
v0 = 0.0
sigma_x = 1.5
sigma_v = 1.5
"""

    def test_spectrum_written(self, tmp_path):
        report = run_scenario(parse_config(self.SPEC32), out_dir=tmp_path)
        info = report.summary["spectrum"]
        assert info["dim"] == 1024
        assert info["min"] <= info["max"]
        lines = (tmp_path / "spec32_spectrum.csv").read_text().splitlines()
        assert lines[0] == "index,eigenvalue"
        assert len(lines) == 1025
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert values == sorted(values)

    def test_spectrum_dim_cap(self):
        text = (
            self.SPEC32.replace("n_x = 32", "n_x = 128")
            .replace("n_v = 32", "n_v = 64")
            .replace("sigma_x = 1.5", "sigma_x = 0.5")
        )
        with pytest.raises(ResourceError, match="4096"):
            run_scenario(parse_config(text))


class TestWriters:
    def _series(self):
        r0 = ObservableRecord(
            t=0.0, mean_x=1 / 3, mean_v=1.0, mean_p=-0.25, mean_a=None,
            std_x=0.5, std_v=0.5, std_p=1.0, std_a=None, energy_class=None, norm=1.0,
        )
        r1 = ObservableRecord(
            t=0.5, mean_x=2.0, mean_v=1.0, mean_p=-0.25, mean_a=0.125,
            std_x=0.5, std_v=0.5, std_p=1.0, std_a=2.0, energy_class=0.75, norm=1.0,
        )
        return ObservableSeries(
            records=(r0, r1), scenario="hand", grid_summary="x:[-1,1]x4", dt=0.5,
            record_every=1,
        )

    def test_csv_bytes_exact(self, tmp_path):
        path = tmp_path / "hand.csv"
        write_series_csv(path, self._series())
        expected = (
            "t,mean_x,mean_v,mean_p,mean_a,std_x,std_v,std_p,std_a,energy_class,norm\n"
            "0,0.33333333333333331,1,-0.25,,0.5,0.5,1,,,1\n"
            "0.5,2,1,-0.25,0.125,0.5,0.5,1,2,0.75,1\n"
        )
        assert path.read_text() == expected

    def test_seventeen_digits_round_trip(self, tmp_path):
        values = [math.pi, 1 / 3, 2 ** 0.5, 6.02e23, 1e-300]
        path = tmp_path / "spectrum.csv"
        write_spectrum_csv(path, values)
        back = [float(line.split(",")[1]) for line in path.read_text().splitlines()[1:]]
        assert back == values

    def test_snapshot_layout(self, tmp_path):
        grid = make_grid(-2.0, 2.0, 8, -1.0, 3.0, 4)
        rng = np.random.default_rng(5)
        amps = rng.standard_normal((8, 4)) + 1j * rng.standard_normal((8, 4))
        from confqm.grids import WaveFunction2D

        amps /= math.sqrt(np.sum(np.abs(amps) ** 2) * grid.cell)
        wf = WaveFunction2D(grid, amps)
        path = tmp_path / "one.snap"
        write_snapshot(path, wf, 0.25)
        blob = path.read_bytes()
        assert blob[:8] == b"CFGQM1\x00\x00"
        n_x, n_v = struct.unpack("<QQ", blob[8:24])
        assert (n_x, n_v) == (8, 4)
        bounds_and_t = struct.unpack("<5d", blob[24:64])
        assert bounds_and_t == (-2.0, 2.0, -1.0, 3.0, 0.25)
        assert len(blob) == 64 + 16 * 8 * 4
        first = struct.unpack("<2d", blob[64:80])
        assert first == (wf.amps[0, 0].real, wf.amps[0, 0].imag)

        back, t = read_snapshot(path)
        assert t == 0.25
        np.testing.assert_array_equal(back.amps, wf.amps)

    def test_snapshot_rejects_garbage(self, tmp_path):
        bad = tmp_path / "bad.snap"
        bad.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
        with pytest.raises(DataError, match="magic|truncated"):
            read_snapshot(bad)
        short = tmp_path / "short.snap"
        short.write_bytes(
            b"CFGQM1\x00\x00" + struct.pack("<QQ5d", 8, 4, -2.0, 2.0, -1.0, 3.0, 0.0)
        )
        with pytest.raises(DataError, match="bytes"):
            read_snapshot(short)


class TestDeterminism:
    def test_reruns_and_workers_are_byte_identical(self, tmp_path):
        config = parse_config(SMALL_FREE)
        out1, out2, out4 = tmp_path / "a", tmp_path / "b", tmp_path / "w4"
        run_scenario(config, out_dir=out1)
        run_scenario(config, out_dir=out2)
        run_scenario(config, out_dir=out4, workers=4)
        for name in ("smallfree_series.csv", "smallfree_report.json",
                     "smallfree_snapshot_000004.snap"):
            ref = (out1 / name).read_bytes()
            assert (out2 / name).read_bytes() == ref
            assert (out4 / name).read_bytes() == ref
