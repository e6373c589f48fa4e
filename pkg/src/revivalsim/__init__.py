"""Coherence revivals of a qubit dispersively coupled to a thermal oscillator.

Two engines compute the same interferometric visibility: a semiclassical
average over classical oscillator trajectories, and an exact quantum
treatment in a truncated Fock space.  The analysis layer compares them,
splits the evolved state into separable and residual parts, and quantifies
entanglement where the two predictions part ways.
"""

__version__ = "0.1.0"

from .analysis import (
    DecompositionReport,
    EngineFlags,
    HeadlineReport,
    VisibilityCurve,
    build_separable_component,
    compare_models,
    decompose,
    entanglement_entropy_pure,
    headline_check,
    negativity,
    separable_component_exact,
    separable_weight,
)
from .errors import ConfigError, PurityGuardError, RevivalSimError, TailOverflowError
from .params import (
    DimensionlessParams,
    PhysicalParams,
    bose_einstein_occupancy,
    reduce,
)
from .quantum import (
    FockSpace,
    JointState,
    coherence,
    coherent_state,
    conditional_unitaries,
    displacement,
    displacement_offset,
    evolve,
    product_state,
    quantum_coherence_oracle,
    suggest_dim,
    thermal_state,
)
from .semiclassical import (
    McCoherence,
    OscillatorSample,
    accumulated_phase,
    analytic_coherence,
    atom_density_matrix,
    classical_trajectory,
    mc_coherence,
    sample_thermal,
    visibility,
)

__all__ = [
    "__version__",
    "ConfigError",
    "PurityGuardError",
    "RevivalSimError",
    "TailOverflowError",
    "DimensionlessParams",
    "PhysicalParams",
    "bose_einstein_occupancy",
    "reduce",
    "OscillatorSample",
    "McCoherence",
    "classical_trajectory",
    "accumulated_phase",
    "sample_thermal",
    "analytic_coherence",
    "mc_coherence",
    "visibility",
    "atom_density_matrix",
    "FockSpace",
    "JointState",
    "coherent_state",
    "thermal_state",
    "displacement",
    "displacement_offset",
    "conditional_unitaries",
    "product_state",
    "evolve",
    "coherence",
    "quantum_coherence_oracle",
    "suggest_dim",
    "EngineFlags",
    "VisibilityCurve",
    "DecompositionReport",
    "HeadlineReport",
    "separable_weight",
    "build_separable_component",
    "separable_component_exact",
    "decompose",
    "negativity",
    "entanglement_entropy_pure",
    "compare_models",
    "headline_check",
]
