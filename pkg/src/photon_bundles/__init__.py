"""Driven three-atom cavity QED: resonance spectra, steady-state photon
statistics and delayed bundle correlations."""
from .correlations import (
    ObservableRecord,
    classify,
    compute_record,
    equal_time_observables,
    g1n_zero,
    gn2_tau,
    photon_distribution,
)
from .errors import ConfigError, IncompleteRecord, NumericalFailure, UndefinedCorrelation
from .hilbert import SpaceConfig, annihilation, excitation_number, pauli
from .lindblad import Liouvillian, SteadyState, build_liouvillian, convergence_scan, model_liouvillian, propagate, steady_state
from .model import (
    AuxCavityParams,
    SystemParams,
    TwoModeSpace,
    build_effective_hamiltonian,
    build_full_hamiltonian,
    derive_effective_params,
)
from .spectrum import (
    ManifoldMatrix,
    ResonanceBranch,
    build_manifold_matrix,
    collective_reduce,
    resonance_branches,
    resonance_curves,
)
from .sweep import Axis, SweepSpec, run_sweep

__version__ = "0.1.0"

__all__ = [
    "AuxCavityParams",
    "Axis",
    "ConfigError",
    "IncompleteRecord",
    "Liouvillian",
    "ManifoldMatrix",
    "NumericalFailure",
    "ObservableRecord",
    "ResonanceBranch",
    "SpaceConfig",
    "SteadyState",
    "SweepSpec",
    "SystemParams",
    "TwoModeSpace",
    "UndefinedCorrelation",
    "annihilation",
    "build_effective_hamiltonian",
    "build_full_hamiltonian",
    "build_liouvillian",
    "build_manifold_matrix",
    "classify",
    "collective_reduce",
    "compute_record",
    "convergence_scan",
    "derive_effective_params",
    "equal_time_observables",
    "excitation_number",
    "g1n_zero",
    "gn2_tau",
    "model_liouvillian",
    "pauli",
    "photon_distribution",
    "propagate",
    "resonance_branches",
    "resonance_curves",
    "run_sweep",
    "steady_state",
]
