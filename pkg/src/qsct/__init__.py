"""Qudit spin-chain state transfer with entanglement tracking and noise."""

from .chain import (
    ChainSpec,
    QuantumState,
    build_hamiltonian,
    commutator_defect,
    default_couplings,
    embed_pair,
    excitation_transfer_amplitude,
    find_pst_time,
    propagator,
)
from .channels import (
    KrausChannel,
    analytic_favg_2qutrit,
    apply_channel,
    average_fidelity,
    average_fidelity_monte_carlo,
    embed_channel,
    gate_x,
    gate_z,
    phase_damping,
    root_of_unity,
    weyl_channel,
)
from .entanglement import (
    EntanglementReport,
    amplified_ccnr_margin,
    ccnr,
    closed_form_l2_d2,
    closed_form_l2_d3,
    concurrence_pure,
    entanglement_level,
    entanglement_report,
    fit_cosine_series,
    mixedness_indicator,
)
from .generators import GeneratorSet, beta, eta, generator_set, projector, theta
from .linalg import (
    Bipartition,
    kron,
    matexp_i,
    partial_trace,
    purity,
    realign,
    realign_inverse,
    trace_norm,
    vectorize,
)
from .protocol import (
    ConfigError,
    ExperimentConfig,
    NoiseSpec,
    TransferRecord,
    average_fidelity_comparison,
    conformance_closed_forms,
    gamma_check,
    initial_state,
    run_experiment,
    run_noiseless,
    run_noisy,
)

__version__ = "0.1.0"
