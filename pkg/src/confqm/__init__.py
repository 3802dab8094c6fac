"""Quantum mechanics on position-velocity configuration space.

Wave functions live on a periodic 2-D grid over (x, v).  Position and
velocity act pointwise; momentum and acceleratum are the conjugate spectral
derivatives -i hbar d/dx and -i hbar d/dv.  Evolution is the classical
transport flow dx/dt = v, dv/dt = f(x) applied to the amplitudes, realized
by Strang-split spectral shifts or by integration along characteristics.
Companion 1-D engines (standard wave mechanics on the fixed-mass slice
p = m v, and dispersionless photon advection) support the comparison
scenarios, and a dense-matrix path exposes spectra on small grids.
"""

from .errors import (
    ArgumentError,
    ConfigurationError,
    ConfqmError,
    DataError,
    GridMismatchError,
    NormalizationError,
    NumericError,
    OutputError,
    ResolutionError,
    ResourceError,
    SupportError,
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
    inner_product,
    make_grid,
    norm,
    v_moments,
    x_moments,
)
from .observables import (
    EhrenfestReport,
    MixtureReference,
    ObservableRecord,
    ObservableSeries,
    ehrenfest_residuals,
    expect,
    mixture_reference,
    record_1d,
    snapshot_record,
    uncertainty,
)
from .operators import (
    ObservableTag,
    apply_hdyn,
    apply_operator,
    boost_v,
    commutator_residual,
    from_momentum_rep,
    to_momentum_rep,
    translate_x,
    weyl_residual,
)
from .propagators import (
    EvolveSpec,
    SupportBudget,
    Trajectory,
    check_wrap_budget,
    check_wrap_budget_1d,
    classical_trajectory,
    evolve_basic_qm,
    evolve_characteristics,
    evolve_config_space,
    evolve_photon,
)
from .scenarios import (
    BUILTIN_SCENARIOS,
    Axis1D,
    PacketSpec,
    RunReport,
    ScenarioConfig,
    apply_override,
    budgets_for,
    build_initial_state,
    build_initial_state_1d,
    check_scenario,
    load_config,
    parse_config,
    read_snapshot,
    run_dispersion_comparison,
    run_emergence_comparison,
    run_scenario,
    serialize_config,
    write_series_csv,
    write_snapshot,
)
from .spectra import (
    DenseOperator,
    EnergyCommutationReport,
    build_hdyn_matrix,
    energy_commutation_check,
    energy_observable,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError", "ConfigurationError", "ConfqmError", "DataError",
    "GridMismatchError", "NormalizationError", "NumericError", "OutputError",
    "ResolutionError", "ResourceError", "SupportError", "UnknownScenarioError",
    "ClassicalState", "ForceField", "Grid2D", "PhysicalConstants",
    "WaveFunction1D", "WaveFunction2D", "gaussian_packet", "gaussian_packet_1d",
    "inner_product", "make_grid", "norm", "v_moments", "x_moments",
    "EhrenfestReport", "MixtureReference", "ObservableRecord", "ObservableSeries",
    "ehrenfest_residuals", "expect", "mixture_reference", "record_1d",
    "snapshot_record", "uncertainty",
    "ObservableTag", "apply_hdyn", "apply_operator", "boost_v",
    "commutator_residual", "from_momentum_rep", "to_momentum_rep",
    "translate_x", "weyl_residual",
    "EvolveSpec", "SupportBudget", "Trajectory", "check_wrap_budget",
    "check_wrap_budget_1d", "classical_trajectory", "evolve_basic_qm",
    "evolve_characteristics", "evolve_config_space", "evolve_photon",
    "BUILTIN_SCENARIOS", "Axis1D", "PacketSpec", "RunReport", "ScenarioConfig",
    "apply_override", "budgets_for", "build_initial_state", "build_initial_state_1d",
    "check_scenario", "load_config", "parse_config", "read_snapshot",
    "run_dispersion_comparison", "run_emergence_comparison", "run_scenario",
    "serialize_config", "write_series_csv", "write_snapshot",
    "DenseOperator", "EnergyCommutationReport", "build_hdyn_matrix",
    "energy_commutation_check", "energy_observable", "spectrum",
    "__version__",
]
