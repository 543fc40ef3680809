"""Multi-copy uncertainty observables on truncated Fock spaces.

A library and CLI for building the two-copy and three-copy uncertainty
observables of continuous-variable quantum optics, computing their outcome
distributions, variances and Shannon entropies by eigenprojection and by
optical-circuit simulation, and verifying the closed-form identities that
relate them to the covariance-matrix uncertainty relation.
"""

from .fock import (
    DensityOp,
    FockArray,
    FockTruncation,
    TailGateError,
    TailMassWarning,
    TailReport,
    embed,
    expectation,
    partial_trace,
    tail_mass,
    tensor_product,
)
from .operators import (
    BeamSplitter,
    Displace,
    ModeOperator,
    PhaseRotation,
    Squeeze,
    annihilation,
    apply_unitary,
    coherent_state,
    compose_circuit_mode_matrix,
    creation,
    fock_state,
    make_state,
    mixture_state,
    number,
    quadrature_p,
    quadrature_x,
    squeezed_vacuum_state,
    thermal_state,
    vacuum_state,
)
from .statespec import StateSpec, StateSpecError
from .distributions import ObservableSummary, OutcomeDistribution
from .phase_space import (
    CovarianceState,
    covariance_of,
    e_function,
    gaussian_entropy_closed_forms,
    sr_check,
    symplectic_summary,
)
from .two_copy import (
    build_angular_components,
    closed_form_lowest_weight,
    closed_form_m0,
    entropy_and_variance_Lz,
    exchange_operator,
    outcome_distribution_Lz,
    sector_eigenbasis,
    thermal_outcome_law,
    two_state_mixture_entropy,
)
from .three_copy import (
    FeasibilityError,
    build_three_copy,
    displacement_invariance_check,
    entropy_and_variance_M,
    outcome_distribution_M,
)
from .circuits import (
    CircuitSpec,
    circuit_vs_projector_equivalence,
    lz_distribution_via_circuit,
    photon_difference_distribution,
    run_circuit,
    verify_operator_table,
)

__version__ = "0.1.0"
