"""Information measures for quantum operations.

The central construction purifies the input state against a same-sized
reference system, pushes the operation through the joint state, and reads off
entanglement fidelity, entropy exchange, the W matrix of a decomposition and
its canonical (W-diagonalizing) remix.  The inequality suite (quantum Fano,
subadditivity, Araki-Lieb, data processing) is reported with explicit slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnihilationError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    dagger,
    frob_norm,
    hermitian_eig,
    partial_trace,
    tensor_product,
    von_neumann_entropy,
)
from .operations import (
    DensityOperator,
    QuantumOperation,
    apply,
    apply_normalized,
    compose,
    is_deterministic,
    remix,
)

__all__ = [
    "WMatrix",
    "CanonicalDecomposition",
    "RQState",
    "InequalityCheck",
    "FanoReport",
    "SubadditivityReport",
    "DataProcessingReport",
    "binary_entropy",
    "purify",
    "rq_output_state",
    "r_output_state",
    "entanglement_fidelity",
    "w_matrix",
    "entropy_exchange",
    "canonical_decomposition",
    "fano_check",
    "subadditivity_report",
    "data_processing_check",
]


def binary_entropy(p: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """-p log p - (1-p) log(1-p) in the configured base, clamped to [0, 1]."""
    p = min(max(float(p), 0.0), 1.0)
    out = 0.0
    for w in (p, 1.0 - p):
        if w >= tol.rank_cutoff:
            out -= w * math.log(w)
    return out * tol.entropy_scale()


@dataclass(frozen=True, eq=False)
class WMatrix:
    """Positive unit-trace matrix W_jk = tr(A_j ρ A_k†) / tr ℰ(ρ).

    Its diagonal holds the probabilities with which the decomposition's pure
    branches contribute; a unitary remix u of the decomposition maps W to
    u W u†.
    """

    matrix: np.ndarray
    operation: QuantumOperation
    state: DensityOperator

    def __post_init__(self):
        m = self.matrix
        tol = self.operation.tol
        if frob_norm(m - dagger(m)) > tol.eq_tol * max(1.0, frob_norm(m)):
            raise ValidationError("W matrix must be Hermitian")
        vals = np.linalg.eigvalsh((m + dagger(m)) / 2.0)
        if vals[0] < -tol.rank_cutoff:
            raise ValidationError("W matrix must be positive semidefinite")
        if abs(float(np.trace(m).real) - 1.0) > tol.eq_tol:
            raise ValidationError("W matrix must have unit trace")

    @property
    def probabilities(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


@dataclass(frozen=True, eq=False)
class CanonicalDecomposition:
    """Remixed decomposition whose W matrix is diagonal with the eigenvalues."""

    operation: QuantumOperation
    eigenvalues: np.ndarray
    remix_unitary: np.ndarray


@dataclass(frozen=True, eq=False)
class RQState:
    """Normalized joint reference+system state after the dynamics.

    purification_basis holds (as columns) the reference kets paired with the
    eigenbasis of the input state in the purification.
    """

    dim: int
    matrix: np.ndarray
    purification_basis: np.ndarray


def purify(rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Pure joint ket on reference⊗system whose system marginal is rho.

    Uses the spectral purification: |Ψ⟩ = Σ_m √p_m |φ_m⟩⊗|φ_m⟩ built from
    the eigendecomposition of rho, so the reference basis is fixed by the
    state itself.
    """
    if not rho.normalized:
        raise ValidationError("purification needs a normalized state")
    spec = hermitian_eig(rho.matrix, tol)
    d = rho.dim
    ket = np.zeros(d * d, dtype=complex)
    for m in range(d):
        p = max(float(spec.eigenvalues[m]), 0.0)
        if p < tol.rank_cutoff:
            continue
        ket += math.sqrt(p) * np.kron(spec.eigenvectors[:, m], spec.eigenvectors[:, m])
    return ket


def rq_output_state(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> RQState:
    """Joint reference+system state (I⊗ℰ)(|Ψ⟩⟨Ψ|), normalized."""
    ket = purify(rho, tol)
    d = rho.dim
    joint = np.zeros((d * d, d * d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for a in e.kraus:
        branch = tensor_product(eye, a) @ ket
        joint += np.outer(branch, branch.conj())
    norm = float(np.trace(joint).real)
    if norm < tol.rank_cutoff:
        raise AnnihilationError("operation annihilates state")
    basis = hermitian_eig(rho.matrix, tol).eigenvectors
    return RQState(dim=d * d, matrix=joint / norm, purification_basis=basis)


def r_output_state(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> DensityOperator:
    """Reference-system marginal of the joint output state."""
    joint = rq_output_state(e, rho, tol)
    d = rho.dim
    reduced = partial_trace(joint.matrix, (d, d), keep=0)
    return DensityOperator(reduced, normalized=True, tol=tol)


def entanglement_fidelity(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """Σ_j |tr(ρ A_j)|² / tr ℰ(ρ): how well the joint state survives the map."""
    if rho.dim != e.dim:
        raise ValidationError("state and operation dimensions differ")
    norm = apply(e, rho).trace
    total = sum(abs(np.trace(rho.matrix @ a)) ** 2 for a in e.kraus)
    return float(total / norm)


def w_matrix(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> WMatrix:
    """The W matrix of the decomposition with respect to the state."""
    if rho.dim != e.dim:
        raise ValidationError("state and operation dimensions differ")
    norm = apply(e, rho).trace
    n = len(e)
    w = np.empty((n, n), dtype=complex)
    for j, a in enumerate(e.kraus):
        for k, b in enumerate(e.kraus):
            w[j, k] = np.trace(a @ rho.matrix @ dagger(b))
    return WMatrix(matrix=w / norm, operation=e, state=rho)


def entropy_exchange(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> float:
    """S(W): the entropy the environment picks up, in the configured base."""
    return von_neumann_entropy(w_matrix(e, rho, tol).matrix, tol)


def canonical_decomposition(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> CanonicalDecomposition:
    """Remix the decomposition so its W matrix is diagonal (descending)."""
    w = w_matrix(e, rho, tol)
    spec = hermitian_eig(w.matrix, tol)
    u = dagger(spec.eigenvectors)
    mixed = remix(e, u, tol)
    check = w_matrix(mixed, rho, tol).matrix
    off = check - np.diag(np.diag(check))
    if frob_norm(off) > 10 * tol.eq_tol:
        raise ValidationError("canonical remix failed to diagonalize W")
    return CanonicalDecomposition(
        operation=mixed, eigenvalues=spec.eigenvalues, remix_unitary=u
    )


@dataclass(frozen=True)
class InequalityCheck:
    """One `lhs ≤ rhs` verdict with its slack rhs - lhs."""

    name: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    saturated: bool


def _check(name: str, lhs: float, rhs: float, tol: ToleranceConfig) -> InequalityCheck:
    slack = rhs - lhs
    return InequalityCheck(
        name=name,
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        holds=slack >= -tol.eq_tol,
        saturated=abs(slack) < 10 * tol.eq_tol,
    )


@dataclass(frozen=True, eq=False)
class FanoReport:
    entropy_exchange: float
    fidelity: float
    bound: float
    holds: bool


def fano_check(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> FanoReport:
    """Quantum Fano inequality: S_e ≤ h(F_e) + (1-F_e) log(D²-1)."""
    fid = entanglement_fidelity(e, rho, tol)
    se = entropy_exchange(e, rho, tol)
    d = e.dim
    tail = 0.0
    if d > 1 and 1.0 - fid > tol.rank_cutoff:
        tail = (1.0 - fid) * math.log(d * d - 1) * tol.entropy_scale()
    bound = binary_entropy(fid, tol) + tail
    return FanoReport(
        entropy_exchange=se, fidelity=fid, bound=bound, holds=se <= bound + tol.eq_tol
    )


@dataclass(frozen=True, eq=False)
class SubadditivityReport:
    s_reference: float
    s_system: float
    entropy_exchange: float
    checks: tuple
    rq_product_state: bool

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)


def subadditivity_report(
    e: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> SubadditivityReport:
    """Verify the three subadditivity inequalities and Araki-Lieb for one run.

    Uses the joint output state for the reference/system marginals and S(W)
    for the entropy exchange.  Equality in the joint-vs-marginals inequality
    is also tested structurally via the product-state condition.
    """
    d = rho.dim
    joint = rq_output_state(e, rho, tol)
    rho_r = partial_trace(joint.matrix, (d, d), keep=0)
    rho_q = partial_trace(joint.matrix, (d, d), keep=1)
    s_r = von_neumann_entropy(rho_r, tol)
    s_q = von_neumann_entropy(rho_q, tol)
    s_e = entropy_exchange(e, rho, tol)
    checks = (
        _check("joint_vs_marginals", s_e, s_r + s_q, tol),
        _check("system_vs_reference_plus_exchange", s_q, s_r + s_e, tol),
        _check("reference_vs_system_plus_exchange", s_r, s_q + s_e, tol),
        _check("entropy_difference_bound", abs(s_q - s_r), s_e, tol),
    )
    product = tensor_product(rho_r, rho_q)
    rq_product = frob_norm(joint.matrix - product) <= 10 * tol.eq_tol * max(
        1.0, frob_norm(joint.matrix)
    )
    return SubadditivityReport(
        s_reference=s_r,
        s_system=s_q,
        entropy_exchange=s_e,
        checks=checks,
        rq_product_state=rq_product,
    )


@dataclass(frozen=True, eq=False)
class DataProcessingReport:
    s_reference: float
    one_step: float
    two_step: float
    checks: tuple

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)


def data_processing_check(
    e: QuantumOperation,
    d: QuantumOperation,
    rho: DensityOperator,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> DataProcessingReport:
    """S(ρ^R') ≥ S(ρ^Q') - S_e(ρ,ℰ) ≥ S(ρ^Q'') - S_e(ρ,𝒟∘ℰ) for deterministic 𝒟."""
    if not is_deterministic(d, tol):
        raise ValidationError("second stage must be deterministic")
    s_r = von_neumann_entropy(r_output_state(e, rho, tol).matrix, tol)
    q_prime, _ = apply_normalized(e, rho)
    one_step = von_neumann_entropy(q_prime.matrix, tol) - entropy_exchange(e, rho, tol)
    both = compose(d, e)
    q_second, _ = apply_normalized(both, rho)
    two_step = von_neumann_entropy(q_second.matrix, tol) - entropy_exchange(both, rho, tol)
    checks = (
        _check("one_step_vs_reference", one_step, s_r, tol),
        _check("two_step_vs_one_step", two_step, one_step, tol),
    )
    return DataProcessingReport(
        s_reference=s_r, one_step=one_step, two_step=two_step, checks=checks
    )
