"""Entropy accounting for a measurement-based error-correction cycle.

The cycle has four stages: deterministic noise, a pure measurement by a
"demon", a conditional unitary feedback, and a restart.  The ledger tracks
the system entropy changes, the Shannon information of the measurement
record, the entropy exchange of the induced reversal map, and the record
length under an explicit storage model, then checks the Second-Law chain

    avg record length + ΔS_c  ≥  H(p) + ΔS_c  ≥  S_e + ΔS_c  ≥  0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_complex_matrix,
    dagger,
    frob_distance,
    frob_norm,
    shannon_entropy,
    von_neumann_entropy,
)
from .measures import InequalityCheck, entropy_exchange
from .operations import (
    DensityOperator,
    QuantumOperation,
    apply_normalized,
    is_deterministic,
)
from .reversal import CodeSubspace, construct_reversal

__all__ = [
    "RECORD_MODELS",
    "MeasurementScheme",
    "DemonConfig",
    "CycleLedger",
    "SecondLawReport",
    "EntropyBoundReport",
    "record_length_model",
    "run_cycle",
    "canonical_scheme",
    "remix_scheme",
    "second_law_check",
    "entropy_reduction_bound",
    "araki_lieb_reversal_check",
]

RECORD_MODELS = ("ideal_H", "shannon_code_lengths")


@dataclass(frozen=True, eq=False)
class MeasurementScheme:
    """Pure measurement {B_i} with conditional feedback unitaries {V_i}."""

    outcomes: tuple
    labels: tuple
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        pairs = []
        for b, v in self.outcomes:
            pairs.append((as_complex_matrix(b), as_complex_matrix(v)))
        if not pairs:
            raise ValidationError("measurement scheme needs at least one outcome")
        d = pairs[0][0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for b, v in pairs:
            if b.shape != (d, d) or v.shape != (d, d):
                raise ValidationError("all scheme operators must be square and same size")
            if frob_norm(dagger(v) @ v - np.eye(d)) > self.tol.eq_tol * d:
                raise ValidationError("feedback operator is not unitary")
            total += dagger(b) @ b
        if frob_norm(total - np.eye(d)) > self.tol.eq_tol * d:
            raise ValidationError("measurement operators are not complete: ΣB†B ≠ I")
        labels = tuple(str(l) for l in self.labels)
        if len(labels) != len(pairs):
            raise ValidationError("one label per outcome required")
        object.__setattr__(self, "outcomes", tuple(pairs))
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.outcomes[0][0].shape[0]

    def reversal_operation(self) -> QuantumOperation:
        """The deterministic map Σ (V_iB_i)·(V_iB_i)† the cycle applies after noise."""
        return QuantumOperation(tuple(v @ b for b, v in self.outcomes), tol=self.tol)


@dataclass(frozen=True, eq=False)
class DemonConfig:
    """One cycle's ingredients: noise, scheme, initial state, code, record model."""

    noise: QuantumOperation
    scheme: MeasurementScheme
    initial_state: DensityOperator
    code: CodeSubspace
    record_model: str = "ideal_H"

    def __post_init__(self):
        tol = self.noise.tol
        if not is_deterministic(self.noise, tol):
            raise ValidationError("cycle noise must be a deterministic operation")
        if self.record_model not in RECORD_MODELS:
            raise ValidationError(f"unknown record model {self.record_model!r}")
        if self.scheme.dim != self.noise.dim or self.initial_state.dim != self.noise.dim:
            raise ValidationError("noise, scheme and state dimensions disagree")
        p = self.code.projector
        rho = self.initial_state.matrix
        if frob_norm(p @ rho @ p - rho) > tol.eq_tol * max(1.0, frob_norm(rho)):
            raise ValidationError("initial state is not supported on the code")


@dataclass(frozen=True, eq=False)
class CycleLedger:
    """Per-cycle entropy bookkeeping, all in the configured entropy unit."""

    delta_s: float
    delta_s_c: float
    shannon_h: float
    entropy_exchange_reversal: float
    avg_record_length: float
    record_lengths: tuple
    probabilities: tuple
    labels: tuple
    pruned_labels: tuple
    record_model: str
    links: tuple
    chain_holds: bool
    saturation: tuple
    cycle_closed: bool
    correction_uniform: bool


def record_length_model(p, model: str, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Record lengths for outcome probabilities under a storage model.

    ideal_H charges the real-valued -log p per outcome; shannon_code_lengths
    charges the integer ⌈-log p⌉.  Values of -log p within 1e-9 of an integer
    snap to it first, so dyadic distributions perturbed by trace round-off
    keep their exact code lengths.
    """
    p = np.asarray(p, dtype=float)
    if model not in RECORD_MODELS:
        raise ValidationError(f"unknown record model {model!r}")
    if p.ndim != 1 or p.size == 0:
        raise ValidationError("probability vector must be 1-D and nonempty")
    if np.any(p < tol.rank_cutoff):
        raise ValidationError("zero-probability entries have no record length")
    if abs(float(np.sum(p)) - 1.0) > tol.eq_tol:
        raise ValidationError("probabilities must sum to 1")
    ideal = -np.log2(p)
    if model == "ideal_H":
        return ideal
    snapped = np.where(np.abs(ideal - np.round(ideal)) < 1e-9, np.round(ideal), ideal)
    return np.ceil(snapped)


def canonical_scheme(
    e_noise: QuantumOperation, code: CodeSubspace, tol: ToleranceConfig = DEFAULT_TOL
) -> MeasurementScheme:
    """Syndrome-projector measurement with inverse-unitary feedback.

    Built from the reversal construction: measure which image subspace holds
    the state, undo the corresponding unitary; a complement outcome with
    identity feedback covers the rest of the space when the images do not
    fill it.  Raises NotReversibleError when no reversal exists.
    """
    construction = construct_reversal(e_noise, code, tol)
    outcomes = []
    labels = []
    for j, (p_j, u_j) in enumerate(
        zip(construction.syndrome_projectors, construction.unitaries)
    ):
        outcomes.append((p_j, dagger(u_j)))
        labels.append(f"syndrome_{j}")
    comp = construction.complement_projector
    if int(round(float(np.trace(comp).real))) > 0:
        outcomes.append((comp, np.eye(code.dim, dtype=complex)))
        labels.append("complement")
    return MeasurementScheme(outcomes=tuple(outcomes), labels=tuple(labels), tol=tol)


def remix_scheme(
    scheme: MeasurementScheme, w: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL
) -> MeasurementScheme:
    """Mix the induced reversal operators R_i = V_iB_i by a unitary w.

    Each mixed operator is refactored by polar decomposition into a positive
    measurement part and a unitary feedback, giving a different measurement
    that implements the same reversal map.
    """
    w = as_complex_matrix(w)
    n = len(scheme.outcomes)
    if w.shape != (n, n):
        raise ValidationError("mixing matrix size must match the number of outcomes")
    if frob_norm(dagger(w) @ w - np.eye(n)) > tol.eq_tol * n:
        raise ValidationError("mixing matrix is not unitary")
    r_ops = [v @ b for b, v in scheme.outcomes]
    outcomes = []
    for i in range(n):
        mixed = sum(w[i, k] * r_ops[k] for k in range(n))
        u_svd, s, vh = np.linalg.svd(mixed)
        unitary = u_svd @ vh
        positive = dagger(vh) @ np.diag(s) @ vh
        outcomes.append((positive, unitary))
    labels = tuple(f"mixed_{i}" for i in range(n))
    return MeasurementScheme(outcomes=tuple(outcomes), labels=labels, tol=tol)


def _link(name: str, smaller: float, larger: float, tol: ToleranceConfig) -> InequalityCheck:
    slack = larger - smaller
    return InequalityCheck(
        name=name,
        lhs=smaller,
        rhs=larger,
        slack=slack,
        holds=slack >= -tol.eq_tol,
        saturated=abs(slack) < 10 * tol.eq_tol,
    )


def _chain_links(
    avg_record: float, shannon_h: float, s_e: float, delta_s_c: float, tol: ToleranceConfig
) -> tuple:
    return (
        _link("record_vs_shannon", shannon_h, avg_record, tol),
        _link("shannon_vs_exchange", s_e, shannon_h, tol),
        _link("exchange_vs_entropy_drop", 0.0, s_e + delta_s_c, tol),
    )


def run_cycle(cfg: DemonConfig, tol: ToleranceConfig = DEFAULT_TOL) -> CycleLedger:
    """Simulate one noise/measure/feedback cycle and fill the entropy ledger.

    Outcomes with probability below rank_cutoff never occur and are pruned
    from the record; the corrected state is the outcome average, and is also
    compared against each per-outcome corrected state.
    """
    rho = cfg.initial_state
    rho_n, _ = apply_normalized(cfg.noise, rho)
    # record lengths are defined in bits; the chain compares them against
    # entropies in the configured unit, so convert the average accordingly
    unit_per_bit = float(np.log(2.0)) * tol.entropy_scale()
    corrected_total = np.zeros_like(rho_n.matrix)
    kept_probs = []
    kept_lengths_labels = []
    per_outcome = []
    pruned = []
    for (b, v), label in zip(cfg.scheme.outcomes, cfg.scheme.labels):
        branch = b @ rho_n.matrix @ dagger(b)
        prob = float(np.trace(branch).real)
        fed_back = v @ branch @ dagger(v)
        corrected_total += fed_back
        if prob < tol.rank_cutoff:
            pruned.append(label)
            continue
        kept_probs.append(prob)
        kept_lengths_labels.append(label)
        per_outcome.append(fed_back / prob)
    if not kept_probs:
        raise ValidationError("every measurement outcome has zero probability")
    probs = np.asarray(kept_probs)
    rho_c = corrected_total / float(np.trace(corrected_total).real)
    s_rho = von_neumann_entropy(rho.matrix, tol)
    s_n = von_neumann_entropy(rho_n.matrix, tol)
    s_c = von_neumann_entropy(rho_c, tol)
    shannon_h = shannon_entropy(probs, tol)
    s_e = entropy_exchange(cfg.scheme.reversal_operation(), rho_n, tol)
    lengths = record_length_model(probs, cfg.record_model, tol)
    avg_record = float(np.dot(probs, lengths)) * unit_per_bit
    delta_s = s_n - s_rho
    delta_s_c = s_c - s_n
    links = _chain_links(avg_record, shannon_h, s_e, delta_s_c, tol)
    uniform = all(frob_distance(state, rho_c) <= 10 * tol.eq_tol for state in per_outcome)
    return CycleLedger(
        delta_s=delta_s,
        delta_s_c=delta_s_c,
        shannon_h=shannon_h,
        entropy_exchange_reversal=s_e,
        avg_record_length=avg_record,
        record_lengths=tuple(float(l) for l in lengths),
        probabilities=tuple(float(p) for p in probs),
        labels=tuple(kept_lengths_labels),
        pruned_labels=tuple(pruned),
        record_model=cfg.record_model,
        links=links,
        chain_holds=all(link.holds for link in links),
        saturation=tuple(link.saturated for link in links),
        cycle_closed=frob_distance(rho_c, rho.matrix) <= tol.eq_tol,
        correction_uniform=uniform,
    )


@dataclass(frozen=True, eq=False)
class SecondLawReport:
    links: tuple
    holds: bool
    saturated: tuple


def second_law_check(ledger: CycleLedger, tol: ToleranceConfig = DEFAULT_TOL) -> SecondLawReport:
    """Re-evaluate the three-link chain from a ledger's numbers."""
    links = _chain_links(
        ledger.avg_record_length,
        ledger.shannon_h,
        ledger.entropy_exchange_reversal,
        ledger.delta_s_c,
        tol,
    )
    return SecondLawReport(
        links=links,
        holds=all(link.holds for link in links),
        saturated=tuple(link.saturated for link in links),
    )


@dataclass(frozen=True, eq=False)
class EntropyBoundReport:
    """S_e(ρ, D) ≥ S(ρ) - S(D(ρ)) for a deterministic map: values and verdicts."""

    entropy_exchange: float
    entropy_drop: float
    holds: bool
    equality: bool


def entropy_reduction_bound(
    d: QuantumOperation, rho: DensityOperator, tol: ToleranceConfig = DEFAULT_TOL
) -> EntropyBoundReport:
    """The entropy a deterministic map exports bounds the entropy it removes."""
    if not is_deterministic(d, tol):
        raise ValidationError("the bound applies to deterministic operations")
    out, _ = apply_normalized(d, rho)
    drop = von_neumann_entropy(rho.matrix, tol) - von_neumann_entropy(out.matrix, tol)
    s_e = entropy_exchange(d, rho, tol)
    return EntropyBoundReport(
        entropy_exchange=s_e,
        entropy_drop=drop,
        holds=s_e >= drop - tol.eq_tol,
        equality=abs(s_e - drop) < 10 * tol.eq_tol,
    )


def araki_lieb_reversal_check(
    e_noise: QuantumOperation,
    code: CodeSubspace,
    rho: DensityOperator,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> EntropyBoundReport:
    """Entropy bound for the constructed reversal, which perfect correction saturates."""
    p = code.projector
    if frob_norm(p @ rho.matrix @ p - rho.matrix) > tol.eq_tol * max(
        1.0, frob_norm(rho.matrix)
    ):
        raise ValidationError("state is not supported on the code")
    construction = construct_reversal(e_noise, code, tol)
    rho_n, _ = apply_normalized(e_noise, rho)
    return entropy_reduction_bound(construction.reversal, rho_n, tol)
