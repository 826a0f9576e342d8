"""Random generators for exercising the library, all driven by a caller's RNG.

The reversible-instance generator builds operations that are reversible on a
random code by construction: remixed operators act as weighted unitaries from
the code onto mutually orthogonal image subspaces, plus an arbitrary small
action off the code kept trace-decreasing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, ToleranceConfig, dagger
from .operations import DensityOperator, QuantumOperation, remix
from .reversal import CodeSubspace

__all__ = [
    "random_unitary",
    "random_density",
    "random_state_on_code",
    "random_operation",
    "random_deterministic_operation",
    "ReversibleInstance",
    "random_reversible_instance",
    "random_reversible_noise",
]


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a Ginibre matrix, phase-fixed diagonal."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(
    rng: np.random.Generator, dim: int, tol: ToleranceConfig = DEFAULT_TOL
) -> DensityOperator:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ dagger(g)
    return DensityOperator(m / np.trace(m), tol=tol)


def random_state_on_code(
    rng: np.random.Generator, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> DensityOperator:
    """A normalized state whose support lies inside the code."""
    d = code.code_dim
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    small = g @ dagger(g)
    small /= np.trace(small)
    return DensityOperator(code.basis @ small @ dagger(code.basis), tol=tol)


def random_operation(
    rng: np.random.Generator,
    dim: int,
    n_ops: int,
    total: float = 0.9,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> QuantumOperation:
    """Trace-decreasing operation with the largest POVM eigenvalue equal to total."""
    ops = [rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)) for _ in range(n_ops)]
    e = sum(dagger(a) @ a for a in ops)
    scale = np.sqrt(total / np.linalg.eigvalsh(e)[-1])
    return QuantumOperation(tuple(scale * a for a in ops), tol=tol)


def random_deterministic_operation(
    rng: np.random.Generator, dim: int, n_ops: int, tol: ToleranceConfig = DEFAULT_TOL
) -> QuantumOperation:
    """Deterministic operation from an exactly isometric stack of blocks."""
    blocks = rng.normal(size=(n_ops * dim, dim)) + 1j * rng.normal(size=(n_ops * dim, dim))
    q, _ = np.linalg.qr(blocks)
    return QuantumOperation(
        tuple(q[j * dim : (j + 1) * dim, :] for j in range(n_ops)), tol=tol
    )


@dataclass(frozen=True, eq=False)
class ReversibleInstance:
    """A generated operation together with the data it was built from."""

    operation: QuantumOperation
    code: CodeSubspace
    weights: np.ndarray
    mu_squared: float
    isometries: tuple


def random_reversible_instance(
    rng: np.random.Generator,
    dim: int,
    code_dim: int,
    n_syndromes: int,
    mu_squared: float | None = None,
    off_code_scale: float = 0.05,
    remix_after: bool = True,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ReversibleInstance:
    """Operation reversible on a random code, with known weights and images.

    Requires n_syndromes * code_dim <= dim so the image subspaces fit
    disjointly.  Weights are a random distribution scaled by μ²; each
    operator also receives a small random action off the code, so the
    operation is not block-diagonal.  By default the decomposition is then
    scrambled by a random unitary remix so callers never see the canonical
    form directly.
    """
    if n_syndromes * code_dim > dim:
        raise ValueError("syndrome images do not fit in the ambient space")
    if mu_squared is None:
        mu_squared = float(rng.uniform(0.3, 0.8))
    frame_in = random_unitary(rng, dim)
    frame_out = random_unitary(rng, dim)
    basis = frame_in[:, :code_dim]
    code = CodeSubspace(basis, tol=tol)
    p = code.projector
    raw = rng.uniform(0.2, 1.0, size=n_syndromes)
    lam = raw / raw.sum()
    weights = mu_squared * lam
    comp = np.eye(dim, dtype=complex) - p
    isometries = []
    tails = []
    for j in range(n_syndromes):
        image = frame_out[:, j * code_dim : (j + 1) * code_dim]
        isometries.append(image @ dagger(basis))
        tail = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        tails.append(off_code_scale / np.linalg.norm(tail, 2) * tail @ comp)
    # shrink the off-code action until the map is safely trace-decreasing
    for _ in range(60):
        ops = [np.sqrt(w) * v + t for w, v, t in zip(weights, isometries, tails)]
        e_total = sum(dagger(a) @ a for a in ops)
        if np.linalg.eigvalsh(e_total)[-1] <= 0.999:
            break
        tails = [t / 2 for t in tails]
    operation = QuantumOperation(tuple(ops), tol=tol)
    if remix_after:
        operation = remix(operation, random_unitary(rng, n_syndromes), tol)
    return ReversibleInstance(
        operation=operation,
        code=code,
        weights=np.sort(weights)[::-1],
        mu_squared=float(np.sum(weights)),
        isometries=tuple(isometries),
    )


def random_reversible_noise(
    rng: np.random.Generator,
    dim: int,
    code_dim: int,
    n_syndromes: int,
    remix_after: bool = True,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ReversibleInstance:
    """Deterministic operation reversible on a random code (μ² = 1).

    Each operator is a full random unitary scaled by √λ_j, with the unitaries
    chosen to send the code onto mutually orthogonal images, so the whole map
    is trace preserving and the restriction to the code is correctable.
    """
    if n_syndromes * code_dim > dim:
        raise ValueError("syndrome images do not fit in the ambient space")
    frame_in = random_unitary(rng, dim)
    frame_out = random_unitary(rng, dim)
    basis = frame_in[:, :code_dim]
    code = CodeSubspace(basis, tol=tol)
    raw = rng.uniform(0.2, 1.0, size=n_syndromes)
    lam = raw / raw.sum()
    basis_rest = frame_in[:, code_dim:]
    ops = []
    unitaries = []
    for j in range(n_syndromes):
        image = frame_out[:, j * code_dim : (j + 1) * code_dim]
        image_rest = _complement_columns(image)
        u_j = np.hstack([image, image_rest]) @ dagger(np.hstack([basis, basis_rest]))
        unitaries.append(u_j)
        ops.append(np.sqrt(lam[j]) * u_j)
    operation = QuantumOperation(tuple(ops), tol=tol)
    if remix_after:
        operation = remix(operation, random_unitary(rng, n_syndromes), tol)
    return ReversibleInstance(
        operation=operation,
        code=code,
        weights=np.sort(lam)[::-1],
        mu_squared=1.0,
        isometries=tuple(unitaries),
    )


def _complement_columns(frame: np.ndarray) -> np.ndarray:
    u, _, _ = np.linalg.svd(frame, full_matrices=True)
    return u[:, frame.shape[1] :]
