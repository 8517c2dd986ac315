"""Dissipation-assisted preparation of symmetric atomic superpositions in a
waveguide-coupled ensemble, and their mapping to multi-photon wavepackets."""

from .analytics import (
    CS_SIN_PRESET,
    ErrorBudget,
    WaveguideSpec,
    error_rates,
    propagation_and_retardation,
    purcell_ratio,
    total_infidelities,
)
from .dynamics import (
    PhysicalParams,
    PulseSegment,
    Trajectory,
    build_h_eff,
    evolve,
    fidelity,
    run_sequence,
)
from .oracle import full_space_oracle
from .photonics import (
    FrequencyGrid,
    WavepacketGrid,
    amplitude_exact,
    amplitude_hp,
    build_grid,
    overlap_hp_closed,
    overlap_hp_numeric,
    superposition_output,
)
from .protocol import (
    LadderModel,
    PulseSequence,
    TargetSuperposition,
    effective_rabi,
    mapping_pulse,
    optimal_detuning,
    plan_fock,
    plan_superposition,
    resonance_omega_anc,
    with_emission,
)
from .state_space import (
    Operator,
    StateVector,
    SymmetricBasis,
    basis_state,
    build_basis,
    collective_lower,
    collective_raise,
    dark_state_trio,
    drive_operators,
    multinomial_norm,
)

__version__ = "0.1.0"

__all__ = [
    "CS_SIN_PRESET",
    "ErrorBudget",
    "FrequencyGrid",
    "LadderModel",
    "Operator",
    "PhysicalParams",
    "PulseSegment",
    "PulseSequence",
    "StateVector",
    "SymmetricBasis",
    "TargetSuperposition",
    "Trajectory",
    "WaveguideSpec",
    "WavepacketGrid",
    "amplitude_exact",
    "amplitude_hp",
    "basis_state",
    "build_basis",
    "build_grid",
    "build_h_eff",
    "collective_lower",
    "collective_raise",
    "dark_state_trio",
    "drive_operators",
    "effective_rabi",
    "error_rates",
    "evolve",
    "fidelity",
    "full_space_oracle",
    "mapping_pulse",
    "multinomial_norm",
    "optimal_detuning",
    "overlap_hp_closed",
    "overlap_hp_numeric",
    "plan_fock",
    "plan_superposition",
    "propagation_and_retardation",
    "purcell_ratio",
    "resonance_omega_anc",
    "run_sequence",
    "superposition_output",
    "total_infidelities",
    "with_emission",
]
