"""Deciding, constructing and verifying reversals of operations on code subspaces.

Two independent routes decide reversibility: an information-theoretic test
(constant outcome probability on the code plus an entropy balance at the unit
code state) and an algebraic test (the restricted products P A_k†A_j P must
all be multiples of the code projector, collected into a positive matrix m).
When the algebraic test passes, the reversal is built explicitly: diagonalize
m, factor each surviving remixed operator into √d_j times a unitary on the
code, measure which orthogonal image subspace holds the state, and undo the
unitary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AnnihilationError,
    NotReversibleError,
    SupportViolationError,
    ValidationError,
)
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_complex_matrix,
    dagger,
    frob_norm,
    hermitian_eig,
    unitary_factor,
    von_neumann_entropy,
)
from .measures import entropy_exchange
from .operations import (
    DensityOperator,
    QuantumOperation,
    apply_normalized,
    apply_to_matrix,
    is_deterministic,
    minimal_decomposition,
    povm_element,
)

__all__ = [
    "CodeSubspace",
    "MMatrix",
    "ReversalConstruction",
    "ReversibilityVerdict",
    "Condition1Report",
    "Condition2Report",
    "VerificationReport",
    "SpanReport",
    "AdjointConditionReport",
    "DegeneracyReport",
    "condition1_check",
    "condition2_check",
    "info_theoretic_reversibility",
    "algebraic_m_matrix",
    "construct_reversal",
    "verify_reversal",
    "unitary_reversibility",
    "whole_space_check",
    "span_reversibility",
    "adjoint_condition_check",
    "degeneracy_report",
]


@dataclass(frozen=True, eq=False)
class CodeSubspace:
    """Subspace on which reversal is demanded, held as an orthonormal basis."""

    basis: np.ndarray
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        b = as_complex_matrix(self.basis)
        d, r = b.shape
        if r < 1 or r > d:
            raise ValidationError(f"code basis shape {b.shape} is not d columns in D rows")
        if frob_norm(dagger(b) @ b - np.eye(r)) > self.tol.eq_tol * r:
            raise ValidationError("code basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        """Ambient space dimension D."""
        return self.basis.shape[0]

    @property
    def code_dim(self) -> int:
        """Code dimension d."""
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def unit_state(self) -> DensityOperator:
        """The unit state P/d whose support is the whole code."""
        return DensityOperator(self.projector / self.code_dim, tol=self.tol)

    @staticmethod
    def from_kets(kets, tol: ToleranceConfig = DEFAULT_TOL) -> "CodeSubspace":
        cols = [np.asarray(k, dtype=complex).reshape(-1) for k in kets]
        return CodeSubspace(np.stack(cols, axis=1), tol=tol)

    @staticmethod
    def full_space(dim: int, tol: ToleranceConfig = DEFAULT_TOL) -> "CodeSubspace":
        return CodeSubspace(np.eye(dim, dtype=complex), tol=tol)


@dataclass(frozen=True, eq=False)
class Condition1Report:
    """Outcome-probability constancy on the code: P E P = μ² P."""

    holds: bool
    mu_squared: float
    residual: float


@dataclass(frozen=True, eq=False)
class Condition2Report:
    """Entropy balance S(ρ) = S(ℰ(ρ)/tr) - S_e at the unit code state."""

    holds: bool
    lhs: float
    rhs: float
    residual: float


@dataclass(frozen=True, eq=False)
class ReversibilityVerdict:
    reversible: bool
    mu_squared: float | None
    failure_reason: str | None
    condition1: Condition1Report | None
    condition2: Condition2Report | None


@dataclass(frozen=True, eq=False)
class MMatrix:
    """The matrix m with P A_k†A_j P = m_jk P; exists iff the map is reversible."""

    matrix: np.ndarray
    mu_squared: float
    proportionality_residual: float


@dataclass(frozen=True, eq=False)
class ReversalConstruction:
    """Everything the reversal construction produces.

    weights holds all eigenvalues d_j of m (descending, zeros included);
    lambdas are d_j/μ².  unitaries and syndrome_projectors cover only the
    surviving weights (d_j above the rank cutoff).  canonical_operation is
    the remixed decomposition that diagonalizes m; it is canonical with
    respect to every state supported on the code.  reversal measures the
    syndrome subspace and undoes the corresponding unitary; off the union N
    of the syndromes it acts as the complement projector.
    """

    weights: np.ndarray
    lambdas: np.ndarray
    unitaries: tuple
    syndrome_projectors: tuple
    n_projector: np.ndarray
    complement_projector: np.ndarray
    canonical_operation: QuantumOperation
    reversal: QuantumOperation
    degenerate: bool
    mu_squared: float


@dataclass(frozen=True, eq=False)
class VerificationReport:
    ok: bool
    mu_squared: float
    worst_residual: float


def condition1_check(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> Condition1Report:
    """Check that the POVM element restricted to the code is a multiple of it."""
    p = code.projector
    d = code.code_dim
    pep = p @ povm_element(e) @ p
    mu2 = float(np.trace(pep).real) / d
    if mu2 <= tol.rank_cutoff:
        raise AnnihilationError("operation annihilates the code subspace")
    residual = frob_norm(pep - mu2 * p)
    return Condition1Report(holds=residual < tol.eq_tol * d, mu_squared=mu2, residual=residual)


def condition2_check(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> Condition2Report:
    """Entropy balance at ρ = P/d, the single state the criterion needs."""
    rho = code.unit_state()
    out, prob = apply_normalized(e, rho)
    if prob <= tol.rank_cutoff:
        raise AnnihilationError("operation annihilates the code subspace")
    lhs = von_neumann_entropy(rho.matrix, tol)
    rhs = von_neumann_entropy(out.matrix, tol) - entropy_exchange(e, rho, tol)
    residual = abs(lhs - rhs)
    return Condition2Report(holds=residual < tol.eq_tol, lhs=lhs, rhs=rhs, residual=residual)


def info_theoretic_reversibility(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> ReversibilityVerdict:
    """Reversibility verdict from the entropy balance at the unit code state.

    The balance at ρ = P/d already implies the constant-probability condition,
    so the verdict rests on it alone; both condition reports are attached as
    diagnostics.
    """
    try:
        rep1 = condition1_check(e, code, tol)
        rep2 = condition2_check(e, code, tol)
    except AnnihilationError:
        return ReversibilityVerdict(
            reversible=False,
            mu_squared=None,
            failure_reason="annihilates_code",
            condition1=None,
            condition2=None,
        )
    if rep2.holds:
        return ReversibilityVerdict(
            reversible=True,
            mu_squared=rep1.mu_squared,
            failure_reason=None,
            condition1=rep1,
            condition2=rep2,
        )
    reason = "condition2_failed" if rep1.holds else "condition1_failed"
    return ReversibilityVerdict(
        reversible=False,
        mu_squared=None,
        failure_reason=reason,
        condition1=rep1,
        condition2=rep2,
    )


def algebraic_m_matrix(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[MMatrix, bool]:
    """Project each P A_k†A_j P onto the code projector and test proportionality.

    Returns the matrix m of projection coefficients together with a verdict:
    holds is True when every residual is below eq_tol, m is positive
    semidefinite and its trace μ² is positive.
    """
    p = code.projector
    d = code.code_dim
    n = len(e)
    m = np.empty((n, n), dtype=complex)
    worst = 0.0
    for j, a in enumerate(e.kraus):
        for k, b in enumerate(e.kraus):
            block = p @ dagger(b) @ a @ p
            coeff = complex(np.trace(block)) / d
            m[j, k] = coeff
            worst = max(worst, frob_norm(block - coeff * p))
    mu2 = float(np.trace(m).real)
    vals = np.linalg.eigvalsh((m + dagger(m)) / 2.0)
    holds = worst < tol.eq_tol and vals[0] >= -tol.rank_cutoff and mu2 > tol.rank_cutoff
    return MMatrix(matrix=m, mu_squared=mu2, proportionality_residual=worst), holds


def construct_reversal(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> ReversalConstruction:
    """Build the syndrome-measurement reversal of a reversible operation.

    Diagonalizing m remixes the decomposition into operators that map the
    code isometrically (scaled by √d_j) onto orthogonal image subspaces.
    The reversal projects onto each image and applies the inverse unitary;
    its action off the union of the images is the complement projector.

    Raises NotReversibleError when the proportionality test fails.
    """
    m, holds = algebraic_m_matrix(e, code, tol)
    if not holds:
        raise NotReversibleError(
            f"operation is not reversible on the code "
            f"(worst proportionality residual {m.proportionality_residual:.3e})"
        )
    p = code.projector
    dim = code.dim
    spec = hermitian_eig(m.matrix, tol)
    weights = np.clip(spec.eigenvalues, 0.0, None)
    mu2 = m.mu_squared
    u_remix = dagger(spec.eigenvectors)
    n_ops = len(e.kraus)
    remixed = [
        sum(u_remix[j, k] * e.kraus[k] for k in range(n_ops)) for j in range(n_ops)
    ]
    unitaries = []
    projectors = []
    degenerate = False
    for j, d_j in enumerate(weights):
        if d_j < tol.rank_cutoff:
            degenerate = True
            continue
        u_j, scale = unitary_factor(remixed[j], p, tol)
        if abs(scale - d_j) > tol.eq_tol * max(1.0, d_j):
            raise NotReversibleError("restricted operator weight disagrees with m eigenvalue")
        unitaries.append(u_j)
        projectors.append(u_j @ p @ dagger(u_j))
    if not unitaries:
        raise NotReversibleError("all restricted operators vanish on the code")
    n_projector = sum(projectors)
    complement = np.eye(dim, dtype=complex) - n_projector
    kraus = [dagger(u_j) @ p_j for u_j, p_j in zip(unitaries, projectors)]
    comp_rank = int(round(float(np.trace(complement).real)))
    if comp_rank > 0:
        kraus.append(complement)
    reversal = QuantumOperation(tuple(kraus), tol=tol)
    return ReversalConstruction(
        weights=weights,
        lambdas=weights / mu2,
        unitaries=tuple(unitaries),
        syndrome_projectors=tuple(projectors),
        n_projector=n_projector,
        complement_projector=complement,
        canonical_operation=QuantumOperation(tuple(remixed), tol=tol),
        reversal=reversal,
        degenerate=degenerate,
        mu_squared=mu2,
    )


def _code_operator_basis(code: CodeSubspace):
    """All |φ_m⟩⟨φ_n| for the code basis; linearity makes checks on them complete."""
    b = code.basis
    d = code.code_dim
    for m in range(d):
        for n in range(d):
            yield np.outer(b[:, m], b[:, n].conj())


def verify_reversal(
    r: QuantumOperation,
    e: QuantumOperation,
    code: CodeSubspace,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> VerificationReport:
    """Check ℛ∘ℰ = μ²·identity on an operator basis of the code.

    r must be deterministic (a reversal has to happen with certainty); the
    worst Frobenius residual over the basis is reported.
    """
    if not is_deterministic(r, tol):
        raise ValidationError("candidate reversal is not deterministic")
    mu2 = float(np.trace(code.projector @ povm_element(e)).real) / code.code_dim
    worst = 0.0
    for x in _code_operator_basis(code):
        out = apply_to_matrix(r, apply_to_matrix(e, x))
        worst = max(worst, frob_norm(out - mu2 * x))
    return VerificationReport(ok=worst < tol.eq_tol, mu_squared=mu2, worst_residual=worst)


def unitary_reversibility(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray] | None:
    """Detect when the operation acts as a single scaled unitary on the code.

    Returns (U, c) with A_j P = c_j U P and Σ|c_j|² = μ², or None when the
    restricted operation is not pure or not isometric on the code.
    """
    p = code.projector
    d = code.code_dim
    m, _ = algebraic_m_matrix(e, code, tol)
    spec = hermitian_eig(m.matrix, tol)
    if spec.rank(tol.rank_cutoff) != 1:
        return None
    u_remix = dagger(spec.eigenvectors)
    n_ops = len(e.kraus)
    lead = sum(u_remix[0, k] * e.kraus[k] for k in range(n_ops))
    try:
        u, _ = unitary_factor(lead, p, tol)
    except SupportViolationError:
        return None
    coeffs = np.array([np.trace(dagger(u) @ a @ p) / d for a in e.kraus])
    worst = max(
        frob_norm(a @ p - c * u @ p) for a, c in zip(e.kraus, coeffs)
    )
    if worst > tol.eq_tol * max(1.0, math.sqrt(d)):
        return None
    return u, coeffs


def whole_space_check(
    e: QuantumOperation, tol: ToleranceConfig = DEFAULT_TOL
) -> tuple[float, np.ndarray] | None:
    """Factor an operation reversible on the entire space as ℰ(ρ) = μ²UρU†."""
    code = CodeSubspace.full_space(e.dim, tol=tol)
    found = unitary_reversibility(e, code, tol)
    if found is None:
        return None
    u, coeffs = found
    mu2 = float(np.sum(np.abs(coeffs) ** 2))
    return mu2, u


@dataclass(frozen=True, eq=False)
class SpanReport:
    """Reversibility of an operation whose operators lie in a reversible span.

    reversible is None when the candidate operators are not representable in
    the reference span: this test is then silent (unknown), not negative.
    """

    reversible: bool | None
    in_span: bool
    coefficients: np.ndarray | None
    n_matrix: np.ndarray | None
    nu_squared: float | None
    reversed_by_same_r: bool | None
    representation_residual: float


def span_reversibility(
    e_reference: QuantumOperation,
    code: CodeSubspace,
    f: QuantumOperation,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> SpanReport:
    """Express f's operators in the span of a reversible reference's operators.

    When B_j = Σ_k b_jk A_k is solvable, f inherits reversibility with
    n = b m b† and ν² = tr n, and the reference's constructed reversal also
    reverses f with factor ν²; that is verified on the code operator basis.
    """
    m, holds = algebraic_m_matrix(e_reference, code, tol)
    if not holds:
        raise NotReversibleError("reference operation fails the proportionality test")
    a_stack = np.stack([a.reshape(-1) for a in e_reference.kraus], axis=1)
    worst = 0.0
    rows = []
    for b_op in f.kraus:
        target = b_op.reshape(-1)
        coeff, *_ = np.linalg.lstsq(a_stack, target, rcond=None)
        worst = max(
            worst,
            frob_norm((a_stack @ coeff - target).reshape(b_op.shape))
            / max(1.0, frob_norm(b_op)),
        )
        rows.append(coeff)
    if worst > tol.eq_tol:
        return SpanReport(
            reversible=None,
            in_span=False,
            coefficients=None,
            n_matrix=None,
            nu_squared=None,
            reversed_by_same_r=None,
            representation_residual=worst,
        )
    b = np.stack(rows, axis=0)
    n_matrix = b @ m.matrix @ dagger(b)
    nu2 = float(np.trace(n_matrix).real)
    if nu2 <= tol.rank_cutoff:
        return SpanReport(
            reversible=False,
            in_span=True,
            coefficients=b,
            n_matrix=n_matrix,
            nu_squared=nu2,
            reversed_by_same_r=None,
            representation_residual=worst,
        )
    r = construct_reversal(e_reference, code, tol).reversal
    worst_reverse = 0.0
    for x in _code_operator_basis(code):
        out = apply_to_matrix(r, apply_to_matrix(f, x))
        worst_reverse = max(worst_reverse, frob_norm(out - nu2 * x))
    return SpanReport(
        reversible=True,
        in_span=True,
        coefficients=b,
        n_matrix=n_matrix,
        nu_squared=nu2,
        reversed_by_same_r=worst_reverse < tol.eq_tol,
        representation_residual=worst,
    )


@dataclass(frozen=True, eq=False)
class AdjointConditionReport:
    holds: bool
    gamma_squared: float
    worst_residual: float


def adjoint_condition_check(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> AdjointConditionReport:
    """Test that ℰ_M†∘ℰ_M is a positive multiple γ² of the identity on the code.

    γ² is fitted as the mean Hilbert-Schmidt overlap over the code operator
    basis; when the operation is reversible it equals tr m² = Σ d_j².
    """
    p = code.projector
    restricted = [a @ p for a in e.kraus]
    products = [dagger(k2) @ k1 for k1 in restricted for k2 in restricted]

    def through(x):
        out = np.zeros_like(x)
        for c in products:
            out += c @ x @ dagger(c)
        return out

    basis = list(_code_operator_basis(code))
    outputs = [through(x) for x in basis]
    gamma2 = float(
        np.mean([np.trace(dagger(x) @ y).real for x, y in zip(basis, outputs)])
    )
    worst = max(frob_norm(y - gamma2 * x) for x, y in zip(basis, outputs))
    return AdjointConditionReport(
        holds=worst < tol.eq_tol and gamma2 > tol.rank_cutoff,
        gamma_squared=gamma2,
        worst_residual=worst,
    )


@dataclass(frozen=True, eq=False)
class DegeneracyReport:
    degenerate: bool
    span_dim_full: int
    span_dim_restricted: int
    zero_weights: int


def degeneracy_report(
    e: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> DegeneracyReport:
    """Compare the operator span of a minimal decomposition with its restriction.

    The code is degenerate when restricting to it collapses the span: some of
    the "errors" act identically within the code.  Computed from the minimal
    decomposition so redundant input decompositions do not fake degeneracy.
    """
    minimal = minimal_decomposition(e, tol)
    m_min, holds = algebraic_m_matrix(minimal, code, tol)
    if not holds:
        raise NotReversibleError("operation is not reversible on the code")
    span_full = len(minimal)
    restricted_weights = np.linalg.eigvalsh((m_min.matrix + dagger(m_min.matrix)) / 2.0)
    span_restricted = int(np.sum(restricted_weights >= tol.rank_cutoff))
    zero_weights = span_full - span_restricted
    return DegeneracyReport(
        degenerate=span_restricted < span_full,
        span_dim_full=span_full,
        span_dim_restricted=span_restricted,
        zero_weights=zero_weights,
    )
