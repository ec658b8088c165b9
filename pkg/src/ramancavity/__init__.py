"""Raman-coupled two-mode cavity simulator.

Exact closed-form dynamics of a two-level atom exchanging photons between
two quantized cavity modes, with large-field disentanglement analysis,
Schroedinger-cat preparation, and quantum-logic protocol verification.
"""

from .states import (
    AtomRegisterState,
    AtomState,
    JointState,
    ModeAmplitudes,
    NormalizationError,
    TwoModeState,
    fidelity,
    inner_product,
    make_joint_state,
)
from .prepare import (
    ModeSpec,
    PhotonStats,
    amplitude_for_mean,
    build_mode,
    coherent_amplitudes,
    cutoff_for,
    fock_amplitudes,
    photon_stats,
    spec_for_mean,
    squeezed_amplitudes,
    superpose_fock,
)
from .evolution import (
    EdgeLeakageError,
    ExcitationDistribution,
    evolve,
    evolve_oracle,
    excitation_distribution,
    hamiltonian_apply,
    pass_atom,
)
from .observables import (
    DensityMatrix,
    QGrid,
    atomic_inversion,
    husimi_q,
    inversion_series,
    purity,
    q_peaks,
    reduced_atom,
    reduced_mode,
    register_purity_excluding_atom,
)
from .largefield import (
    ApproxProductState,
    KappaUnityError,
    LargeFieldParams,
    approx_product_state,
    build_psi_pm,
    cat_target_state,
    conditional_field_state,
    disentanglement_time,
    disentanglement_time_from_ratio,
    revival_times,
)
from .protocols import (
    PI_HALF_PULSE,
    ProtocolReport,
    atom_pulse,
    measure_atom,
    run_atomic_cnot,
    run_cat,
    run_epr,
    run_ghz,
    run_phase_gate,
    sample_outcome,
)

__version__ = "0.1.0"
