"""Quantum operations in operator-sum form.

A quantum operation is a trace-decreasing completely positive map given by an
ordered list of decomposition (Kraus) operators.  This module provides
application to states, composition, adjoints, a Choi-matrix equality witness,
and unitary remixing between equivalent decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AnnihilationError, ValidationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_complex_matrix,
    dagger,
    frob_norm,
    hermitian_eig,
    is_hermitian,
    orthonormal_complement,
)

__all__ = [
    "DensityOperator",
    "CompletelyPositiveMap",
    "QuantumOperation",
    "ChoiMatrix",
    "identity_operation",
    "unitary_operation",
    "apply",
    "apply_normalized",
    "apply_to_matrix",
    "povm_element",
    "compose",
    "adjoint",
    "choi_matrix",
    "choi_distance",
    "operations_equal",
    "remix",
    "find_remix_unitary",
    "is_deterministic",
    "is_pure",
    "minimal_decomposition",
]


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian positive matrix describing a state; may carry trace < 1.

    normalized=True asserts unit trace; unnormalized operators are the raw
    outputs of trace-decreasing maps and keep their trace in (0, 1].
    """

    matrix: np.ndarray
    normalized: bool = True
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise ValidationError("density operator must be square")
        if not is_hermitian(m, self.tol):
            raise ValidationError("density operator must be Hermitian")
        m = (m + dagger(m)) / 2.0
        vals = np.linalg.eigvalsh(m)
        if vals[0] < -self.tol.rank_cutoff:
            raise ValidationError(f"density operator has negative eigenvalue {vals[0]:.3e}")
        trace = float(np.trace(m).real)
        if self.normalized:
            if abs(trace - 1.0) > self.tol.eq_tol:
                raise ValidationError(f"normalized state must have unit trace, got {trace!r}")
        else:
            if not (trace > 0 and trace <= 1.0 + self.tol.eq_tol):
                raise ValidationError(f"unnormalized state trace {trace!r} outside (0, 1]")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @staticmethod
    def from_ket(ket, tol: ToleranceConfig = DEFAULT_TOL) -> "DensityOperator":
        v = np.asarray(ket, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm <= tol.rank_cutoff:
            raise ValidationError("zero state vector")
        v = v / norm
        return DensityOperator(np.outer(v, v.conj()), normalized=True, tol=tol)

    @staticmethod
    def maximally_mixed(dim: int, tol: ToleranceConfig = DEFAULT_TOL) -> "DensityOperator":
        return DensityOperator(np.eye(dim, dtype=complex) / dim, normalized=True, tol=tol)


@dataclass(frozen=True, eq=False)
class CompletelyPositiveMap:
    """A CP map given by decomposition operators; no trace condition imposed."""

    kraus: tuple
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False, compare=False)

    def __post_init__(self):
        ops = tuple(as_complex_matrix(a) for a in self.kraus)
        if not ops:
            raise ValidationError("decomposition needs at least one operator")
        d = ops[0].shape[0]
        for a in ops:
            if a.shape != (d, d):
                raise ValidationError("all decomposition operators must be square and same size")
            a.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus)


class QuantumOperation(CompletelyPositiveMap):
    """A trace-decreasing CP map: the largest eigenvalue of Σ A†A is at most 1."""

    def __post_init__(self):
        super().__post_init__()
        e = sum(dagger(a) @ a for a in self.kraus)
        top = float(np.linalg.eigvalsh((e + dagger(e)) / 2.0)[-1])
        if top > 1.0 + self.tol.eq_tol:
            raise ValidationError(
                f"map is not trace-decreasing: largest eigenvalue of ΣA†A is {top!r}"
            )


def identity_operation(dim: int, tol: ToleranceConfig = DEFAULT_TOL) -> QuantumOperation:
    return QuantumOperation((np.eye(dim, dtype=complex),), tol=tol)


def unitary_operation(u, tol: ToleranceConfig = DEFAULT_TOL) -> QuantumOperation:
    u = as_complex_matrix(u)
    if frob_norm(dagger(u) @ u - np.eye(u.shape[0])) > tol.eq_tol * u.shape[0]:
        raise ValidationError("matrix is not unitary")
    return QuantumOperation((u,), tol=tol)


def apply_to_matrix(e: CompletelyPositiveMap, x: np.ndarray) -> np.ndarray:
    """Σ A x A† on an arbitrary (not necessarily Hermitian) matrix."""
    x = as_complex_matrix(x)
    out = np.zeros_like(x)
    for a in e.kraus:
        out += a @ x @ dagger(a)
    return out


def apply(e: QuantumOperation, rho: DensityOperator) -> DensityOperator:
    """Raw map output Σ AρA†; unnormalized, trace in (0, 1]."""
    if rho.dim != e.dim:
        raise ValidationError("state and operation dimensions differ")
    if not rho.normalized:
        raise ValidationError("apply expects a normalized input state")
    out = apply_to_matrix(e, rho.matrix)
    if float(np.trace(out).real) < e.tol.rank_cutoff:
        raise AnnihilationError("operation annihilates state")
    return DensityOperator(out, normalized=False, tol=e.tol)


def apply_normalized(e: QuantumOperation, rho: DensityOperator) -> tuple[DensityOperator, float]:
    """Normalized output state and the probability tr Σ AρA† of obtaining it."""
    raw = apply(e, rho)
    prob = raw.trace
    return DensityOperator(raw.matrix / prob, normalized=True, tol=e.tol), prob


def povm_element(e: CompletelyPositiveMap) -> np.ndarray:
    """The positive operator Σ A†A whose expectation gives the outcome probability."""
    return sum(dagger(a) @ a for a in e.kraus)


def compose(second: QuantumOperation, first: QuantumOperation) -> QuantumOperation:
    """Composition second∘first, with decomposition operators {R_l A_j}."""
    if second.dim != first.dim:
        raise ValidationError("composed operations must share a dimension")
    ops = tuple(r @ a for r in second.kraus for a in first.kraus)
    return QuantumOperation(ops, tol=first.tol)


def adjoint(e: CompletelyPositiveMap) -> CompletelyPositiveMap:
    """Adjoint map {A†} w.r.t. the Hilbert-Schmidt pairing; may be trace-increasing."""
    return CompletelyPositiveMap(tuple(dagger(a) for a in e.kraus), tol=e.tol)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Positive matrix on dim² that identifies a CP map independently of decomposition."""

    dim: int
    matrix: np.ndarray


def choi_matrix(e: CompletelyPositiveMap) -> ChoiMatrix:
    """Σ_{m,n} |m⟩⟨n| ⊗ ℰ(|m⟩⟨n|), assembled as Σ_A vec(A) vec(A)†."""
    d = e.dim
    c = np.zeros((d * d, d * d), dtype=complex)
    for a in e.kraus:
        v = a.T.reshape(-1)
        c += np.outer(v, v.conj())
    c.setflags(write=False)
    return ChoiMatrix(dim=d, matrix=c)


def choi_distance(e1: CompletelyPositiveMap, e2: CompletelyPositiveMap) -> float:
    """Relative Frobenius distance between Choi matrices; 0 iff equal as maps."""
    if e1.dim != e2.dim:
        raise ValidationError("operations live on different dimensions")
    c1 = choi_matrix(e1).matrix
    c2 = choi_matrix(e2).matrix
    return frob_norm(c1 - c2) / max(1.0, frob_norm(c1), frob_norm(c2))


def operations_equal(
    e1: CompletelyPositiveMap,
    e2: CompletelyPositiveMap,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> bool:
    return choi_distance(e1, e2) <= tol.eq_tol


def _padded_kraus(e: CompletelyPositiveMap, count: int) -> list[np.ndarray]:
    ops = list(e.kraus)
    zero = np.zeros((e.dim, e.dim), dtype=complex)
    while len(ops) < count:
        ops.append(zero)
    return ops


def remix(
    e: QuantumOperation,
    u: np.ndarray,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> QuantumOperation:
    """New decomposition B_j = Σ_k u_jk A_k of the same operation.

    u must be unitary and at least as large as the decomposition; shorter
    decompositions are padded with zero operators first.
    """
    u = as_complex_matrix(u)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValidationError("remix matrix must be square")
    if n < len(e):
        raise ValidationError("remix matrix is smaller than the decomposition")
    if frob_norm(dagger(u) @ u - np.eye(n)) > tol.eq_tol * n:
        raise ValidationError("remix matrix is not unitary")
    ops = _padded_kraus(e, n)
    mixed = tuple(sum(u[j, k] * ops[k] for k in range(n)) for j in range(n))
    return QuantumOperation(mixed, tol=e.tol)


def _kraus_vectors(ops: list[np.ndarray]) -> np.ndarray:
    """Column-stack each operator's vec form; columns index the decomposition."""
    return np.stack([a.T.reshape(-1) for a in ops], axis=1)


def find_remix_unitary(
    e1: QuantumOperation,
    e2: QuantumOperation,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray | None:
    """A unitary u with e2.kraus_j = Σ_k u_jk e1.kraus_k, or None if the maps differ.

    The answer is not unique under degenerate Choi eigenvalues; the result is
    only guaranteed to reconstruct e2 from e1, which is also how callers
    should verify it.
    """
    if e1.dim != e2.dim:
        raise ValidationError("operations live on different dimensions")
    if not operations_equal(e1, e2, tol):
        return None
    n = max(len(e1), len(e2))
    v = _kraus_vectors(_padded_kraus(e1, n))
    w = _kraus_vectors(_padded_kraus(e2, n))
    c = v @ dagger(v)
    spec = hermitian_eig(c, tol)
    rank = spec.rank(tol.rank_cutoff)
    if rank == 0:
        return np.eye(n, dtype=complex)
    x = spec.eigenvectors[:, :rank]
    inv_root = 1.0 / np.sqrt(spec.eigenvalues[:rank])
    p_v = dagger(v) @ x * inv_root
    p_w = dagger(w) @ x * inv_root
    q = p_v @ dagger(p_w)
    if rank < n:
        q = q + orthonormal_complement(p_v) @ dagger(orthonormal_complement(p_w))
    u = q.T
    residual = frob_norm(w - v @ q) / max(1.0, frob_norm(w))
    if residual > 10 * tol.eq_tol:
        return None
    return u


def _unit_gram(e: CompletelyPositiveMap) -> np.ndarray:
    """The positive unit-trace matrix tr(A_j A_k†) / Σ tr(A A†)."""
    n = len(e)
    g = np.zeros((n, n), dtype=complex)
    for j, a in enumerate(e.kraus):
        for k, b in enumerate(e.kraus):
            g[j, k] = np.trace(a @ dagger(b))
    total = float(np.trace(g).real)
    if total <= e.tol.rank_cutoff:
        raise AnnihilationError("operation has only zero decomposition operators")
    return g / total


def is_deterministic(e: CompletelyPositiveMap, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when Σ A†A = I, i.e. the operation happens with probability 1."""
    return frob_norm(povm_element(e) - np.eye(e.dim)) <= tol.eq_tol * np.sqrt(e.dim)


def minimal_decomposition(
    e: QuantumOperation, tol: ToleranceConfig = DEFAULT_TOL
) -> QuantumOperation:
    """Equivalent decomposition with linearly independent operators.

    Remixes with the unitary that diagonalizes the Hilbert-Schmidt Gram
    matrix (the canonical decomposition with respect to the maximally mixed
    state) and drops the operators whose weight falls below rank_cutoff.
    """
    g = _unit_gram(e)
    spec = hermitian_eig(g, tol)
    u = dagger(spec.eigenvectors)
    mixed = remix(e, u, tol)
    keep = [a for lam, a in zip(spec.eigenvalues, mixed.kraus) if lam >= tol.rank_cutoff]
    if not keep:
        raise AnnihilationError("no operators survive the rank cutoff")
    return QuantumOperation(tuple(keep), tol=e.tol)


def is_pure(e: QuantumOperation, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True when the operation admits a single-operator decomposition."""
    return len(minimal_decomposition(e, tol)) == 1
