"""Dense complex-matrix primitives used by every other module.

Everything here is a pure function over immutable numpy arrays: tensor
products, partial traces, Hermitian eigendecompositions, restricted polar
(unitary) factors and the two entropy functions.  Tolerances are carried by a
single ToleranceConfig so that "equal", "zero" and "rank" mean the same thing
throughout the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SupportViolationError, ValidationError

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "HermitianSpectrum",
    "as_complex_matrix",
    "dagger",
    "frob_norm",
    "frob_close",
    "frob_distance",
    "is_hermitian",
    "tensor_product",
    "partial_trace",
    "hermitian_eig",
    "unitary_factor",
    "orthonormal_complement",
    "fix_column_phases",
    "fix_global_phase",
    "von_neumann_entropy",
    "shannon_entropy",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Shared numerical knobs.

    eq_tol is a relative Frobenius tolerance for matrix equality and for
    normalization checks; rank_cutoff is the absolute eigenvalue threshold
    below which a weight counts as zero; log_base sets the entropy unit
    (base 2 gives bits).
    """

    eq_tol: float = 1e-9
    rank_cutoff: float = 1e-12
    log_base: float = 2.0

    def __post_init__(self):
        if not (self.eq_tol > 0 and self.rank_cutoff > 0):
            raise ValidationError("tolerances must be strictly positive")
        if not self.log_base > 1:
            raise ValidationError("log_base must exceed 1")

    def entropy_scale(self) -> float:
        """Conversion factor from natural log to the configured base."""
        return 1.0 / math.log(self.log_base)


DEFAULT_TOL = ToleranceConfig()


def as_complex_matrix(value) -> np.ndarray:
    """Coerce to a 2-D complex array and reject non-finite entries."""
    m = np.asarray(value, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frob_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def frob_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Relative Frobenius distance with an absolute floor of 1."""
    return frob_norm(a - b) / max(1.0, frob_norm(a), frob_norm(b))


def frob_close(a: np.ndarray, b: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return frob_distance(a, b) <= tol.eq_tol


def is_hermitian(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return frob_norm(m - dagger(m)) <= tol.eq_tol * max(1.0, frob_norm(m))


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; output dims are the products of the input dims."""
    return np.kron(as_complex_matrix(a), as_complex_matrix(b))


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one tensor factor of a square matrix on a dA*dB space.

    keep=0 retains the first factor, keep=1 the second.  The trace of the
    result equals the trace of the input.
    """
    m = as_complex_matrix(m)
    d_a, d_b = dims
    if m.shape != (d_a * d_b, d_a * d_b):
        raise ValidationError(
            f"matrix shape {m.shape} does not match factor dims {dims}"
        )
    if keep not in (0, 1):
        raise ValidationError("keep must be 0 (first factor) or 1 (second factor)")
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        return np.einsum("ikjk->ij", t)
    return np.einsum("kikj->ij", t)


def fix_column_phases(v: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    v = np.array(v, dtype=complex)
    for j in range(v.shape[1]):
        col = v[:, j]
        k = int(np.argmax(np.abs(col)))
        pivot = col[k]
        if abs(pivot) > 0:
            v[:, j] = col * (abs(pivot) / pivot)
    return v


def fix_global_phase(u: np.ndarray) -> np.ndarray:
    """Rotate a whole matrix so the largest entry of its first column is real positive."""
    u = np.array(u, dtype=complex)
    col = u[:, 0]
    k = int(np.argmax(np.abs(col)))
    pivot = col[k]
    if abs(pivot) > 0:
        u = u * (abs(pivot) / pivot)
    return u


@dataclass(frozen=True, eq=False)
class HermitianSpectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are sorted descending; eigenvectors holds the matching
    orthonormal eigenvectors as columns, with each column's phase fixed so
    its largest-magnitude entry is real positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def rank(self, cutoff: float) -> int:
        return int(np.sum(self.eigenvalues >= cutoff))


def hermitian_eig(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> HermitianSpectrum:
    """Eigendecompose a Hermitian matrix, sorted descending.

    The input is symmetrized as (m + m†)/2 before decomposition to tame
    round-off; inputs that are not Hermitian within eq_tol are rejected.
    """
    m = as_complex_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValidationError("eigendecomposition needs a square matrix")
    if not is_hermitian(m, tol):
        raise ValidationError("matrix is not Hermitian within tolerance")
    sym = (m + dagger(m)) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    order = np.argsort(vals)[::-1]
    vals = np.real(vals[order])
    vecs = fix_column_phases(vecs[:, order])
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return HermitianSpectrum(eigenvalues=vals, eigenvectors=vecs)


def orthonormal_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the orthogonal complement of span(basis).

    Deterministic: computed from the full SVD of the input frame.
    """
    basis = as_complex_matrix(basis)
    d, r = basis.shape
    if r == 0:
        return np.eye(d, dtype=complex)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, r:]


def _support_basis(projector: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    """Orthonormal basis of the range of a Hermitian projector."""
    spec = hermitian_eig(projector, tol)
    rank = int(round(float(np.sum(spec.eigenvalues).real)))
    if rank < 1:
        raise ValidationError("support projector has rank zero")
    if np.any(np.abs(spec.eigenvalues[:rank] - 1.0) > 1e-6) or (
        rank < len(spec.eigenvalues) and np.any(np.abs(spec.eigenvalues[rank:]) > 1e-6)
    ):
        raise ValidationError("support_projector is not a projector")
    return spec.eigenvectors[:, :rank]


def unitary_factor(
    a: np.ndarray,
    support_projector: np.ndarray,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[np.ndarray, float]:
    """Unitary completion of an operator that is a scaled isometry on a support.

    Given a with a†a = c·P on the support P (c > 0), returns (U, c) where U
    is a full unitary with a·P = √c·U·P.  The extension off the support is a
    fixed orthonormal completion of the image column space, so the output is
    deterministic.  Raises SupportViolationError when a†a is not scalar on
    the support.
    """
    a = as_complex_matrix(a)
    p = as_complex_matrix(support_projector)
    if a.shape != p.shape or a.shape[0] != a.shape[1]:
        raise ValidationError("operator and support projector must be square and same size")
    basis = _support_basis(p, tol)
    rank = basis.shape[1]
    gram = dagger(basis) @ dagger(a) @ a @ basis
    c = float(np.trace(gram).real) / rank
    if c <= tol.rank_cutoff:
        raise SupportViolationError("operator annihilates the support")
    if frob_norm(gram - c * np.eye(rank)) > tol.eq_tol * max(1.0, frob_norm(gram)):
        raise SupportViolationError("a†a is not a scalar multiple of the support projector")
    image = a @ basis / math.sqrt(c)
    full_in = np.hstack([basis, orthonormal_complement(basis)])
    full_out = np.hstack([image, orthonormal_complement(image)])
    u = full_out @ dagger(full_in)
    u.setflags(write=False)
    return u, c


def von_neumann_entropy(rho: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Entropy -Σ λ log λ of a unit-trace positive matrix, in the configured base.

    Eigenvalues below rank_cutoff are treated as exact zeros (0·log 0 = 0);
    eigenvalues below -rank_cutoff and trace deviations beyond eq_tol are
    rejected.
    """
    rho = as_complex_matrix(rho)
    spec = hermitian_eig(rho, tol)
    vals = spec.eigenvalues
    if vals[-1] < -tol.rank_cutoff:
        raise ValidationError(f"matrix has a negative eigenvalue {vals[-1]:.3e}")
    trace = float(np.sum(vals))
    if abs(trace - 1.0) > tol.eq_tol:
        raise ValidationError(f"entropy needs a unit-trace matrix, got tr = {trace!r}")
    kept = vals[vals >= tol.rank_cutoff]
    return float(-np.sum(kept * np.log(kept)) * tol.entropy_scale())


def shannon_entropy(p, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Shannon entropy -Σ p log p of a probability vector, in the configured base."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("probability vector must be 1-D and nonempty")
    if np.any(p < -tol.rank_cutoff):
        raise ValidationError("negative probability entry")
    total = float(np.sum(p))
    if abs(total - 1.0) > tol.eq_tol:
        raise ValidationError(f"probabilities must sum to 1, got {total!r}")
    kept = p[p >= tol.rank_cutoff]
    return float(-np.sum(kept * np.log(kept)) * tol.entropy_scale())
