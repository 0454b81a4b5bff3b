"""Quasi-static thermodynamic processes and engine cycles for exactly
solvable quantum working substances, in natural units hbar = m = k = 1.

The generalized force F = -sum_n P_n dE_n/dL over one control coordinate L
drives four process kinds (isothermal, isochoric, isobaric, adiabatic) and
the cycles composed from them (Carnot, Otto, Brayton, Diesel), with every
closed form cross-checked against brute-force canonical sums.
"""

from .checks import CheckResult, run_checks
from .config import OutputConfig, RunConfig, parse_config, serialize_config, validate_config
from .cycles import (
    CORNER_LABELS,
    CYCLE_KINDS,
    CornerRecord,
    CycleReport,
    CycleSpec,
    build_brayton,
    build_carnot,
    build_diesel,
    build_otto,
    closed_form_efficiency,
    run_cycle,
)
from .errors import ConfigError, ConvergenceError, DomainError, QcycleError
from .numerics import (
    DEFAULT_POLICY,
    NumericsPolicy,
    derivative_centered,
    find_root_bracketed,
    integrate_adaptive,
    integrate_gauss,
    sum_with_tail_bound,
)
from .processes import (
    SEGMENT_KINDS,
    PathSample,
    ProcessSegment,
    SegmentResult,
    adiabatic_advance,
    adiabatic_segment,
    build_segment,
    isobaric_schedule,
    isobaric_segment,
    isochoric_segment,
    isothermal_segment,
    reverse_segment,
    segment_heat_work,
    segment_point,
    work_gauss_reference,
)
from .substances import (
    BOX_KINDS,
    KINDS,
    OSCILLATOR_KINDS,
    GibbsState,
    SpectrumModel,
    beta_for_force,
    box,
    cavity_mode,
    energy_level,
    entropy,
    entropy_closed,
    equilibrium_force,
    force,
    force_equilibrium_closed,
    free_energy,
    gibbs_state,
    harmonic,
    heat_capacity,
    internal_energy,
    internal_energy_closed,
    mean_occupation,
    partition_function,
    regime_parameter,
    spin_half,
    state_energies,
    vacuum_force,
)

__version__ = "0.1.0"

__all__ = [
    "BOX_KINDS",
    "CORNER_LABELS",
    "CYCLE_KINDS",
    "CheckResult",
    "ConfigError",
    "ConvergenceError",
    "CornerRecord",
    "CycleReport",
    "CycleSpec",
    "DEFAULT_POLICY",
    "DomainError",
    "GibbsState",
    "KINDS",
    "NumericsPolicy",
    "OSCILLATOR_KINDS",
    "OutputConfig",
    "PathSample",
    "ProcessSegment",
    "QcycleError",
    "RunConfig",
    "SEGMENT_KINDS",
    "SegmentResult",
    "SpectrumModel",
    "adiabatic_advance",
    "adiabatic_segment",
    "beta_for_force",
    "box",
    "build_brayton",
    "build_carnot",
    "build_diesel",
    "build_otto",
    "build_segment",
    "cavity_mode",
    "closed_form_efficiency",
    "derivative_centered",
    "energy_level",
    "entropy",
    "entropy_closed",
    "equilibrium_force",
    "find_root_bracketed",
    "force",
    "force_equilibrium_closed",
    "free_energy",
    "gibbs_state",
    "harmonic",
    "heat_capacity",
    "integrate_adaptive",
    "integrate_gauss",
    "internal_energy",
    "internal_energy_closed",
    "isobaric_schedule",
    "isobaric_segment",
    "isochoric_segment",
    "isothermal_segment",
    "mean_occupation",
    "parse_config",
    "partition_function",
    "regime_parameter",
    "reverse_segment",
    "run_checks",
    "run_cycle",
    "segment_heat_work",
    "segment_point",
    "serialize_config",
    "spin_half",
    "state_energies",
    "sum_with_tail_bound",
    "validate_config",
    "vacuum_force",
    "work_gauss_reference",
]
