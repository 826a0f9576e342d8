"""Reversal of quantum operations on code subspaces, with entropy accounting.

The library represents quantum operations in operator-sum form, decides when
they can be reversed on a code subspace (by an information-theoretic route
and by an algebraic route), constructs and verifies the reversal, computes
entanglement fidelity / entropy exchange, and audits the thermodynamic
ledger of a measurement-based correction cycle.
"""

from .demon import (
    CycleLedger,
    DemonConfig,
    MeasurementScheme,
    araki_lieb_reversal_check,
    canonical_scheme,
    entropy_reduction_bound,
    record_length_model,
    remix_scheme,
    run_cycle,
    second_law_check,
)
from .errors import (
    AnnihilationError,
    InputDocumentError,
    NotReversibleError,
    QReverseError,
    SupportViolationError,
    ValidationError,
)
from .linalg import (
    DEFAULT_TOL,
    HermitianSpectrum,
    ToleranceConfig,
    hermitian_eig,
    partial_trace,
    shannon_entropy,
    tensor_product,
    unitary_factor,
    von_neumann_entropy,
)
from .measures import (
    CanonicalDecomposition,
    RQState,
    WMatrix,
    canonical_decomposition,
    data_processing_check,
    entanglement_fidelity,
    entropy_exchange,
    fano_check,
    purify,
    r_output_state,
    rq_output_state,
    subadditivity_report,
    w_matrix,
)
from .operations import (
    ChoiMatrix,
    CompletelyPositiveMap,
    DensityOperator,
    QuantumOperation,
    adjoint,
    apply,
    apply_normalized,
    apply_to_matrix,
    choi_distance,
    choi_matrix,
    compose,
    find_remix_unitary,
    identity_operation,
    is_deterministic,
    is_pure,
    minimal_decomposition,
    operations_equal,
    povm_element,
    remix,
    unitary_operation,
)
from .reversal import (
    CodeSubspace,
    MMatrix,
    ReversalConstruction,
    ReversibilityVerdict,
    adjoint_condition_check,
    algebraic_m_matrix,
    condition1_check,
    condition2_check,
    construct_reversal,
    degeneracy_report,
    info_theoretic_reversibility,
    span_reversibility,
    unitary_reversibility,
    verify_reversal,
    whole_space_check,
)

__version__ = "0.1.0"
