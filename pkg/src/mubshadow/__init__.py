"""Classical shadow tomography with a mutually-unbiased-bases ensemble.

Builds the full set of 2^n + 1 MUBs from GF(2^n) arithmetic, exports their
uniform Hadamard/phase/CZ circuits, simulates randomized-measurement
acquisition, and estimates observables through the depolarising
reconstruction channel, with a uniform random-Clifford ensemble as the
variance baseline.
"""

from .clifford import (
    CliffordElement,
    enumerate_single_qubit_cliffords,
    rotated_basis_state,
    sample_clifford,
)
from .ensembles import CliffordEnsemble, MubEnsemble, make_ensemble
from .gf2 import (
    IRREDUCIBLE_POLY,
    BitMatrix,
    field_trace,
    gf2_mul,
    is_irreducible,
    multiplication_matrix,
    self_dual_basis,
)
from .mub import (
    DiagonalCliffordCircuit,
    IdentityBasisError,
    MubFamily,
    UnbiasednessReport,
    amplitude,
    basis_matrix,
    build_family,
    circuit_qasm,
    emit_circuit,
    family_cz_counts,
    gate_lines,
    mub_state,
    verify_unbiased,
)
from .shadow import (
    EstimatorConfig,
    Observable,
    ShadowSet,
    SnapshotRecord,
    acquire,
    estimate,
    exact_channel_enum,
    exact_single_shot_variance,
    forward_channel,
    inverse_channel,
    load_shadow,
    median_of_means,
    save_shadow,
    shadow_norm_sq,
    snapshot_expectation,
    snapshot_moments,
    snapshot_values,
)
from .sim import (
    StateModel,
    apply_circuit,
    born_probabilities,
    born_sample,
    fwht,
    ghz_state,
    sample_branch,
    shot_rng,
)

__version__ = "0.1.0"
