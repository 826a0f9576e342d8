"""Tests for entanglement fidelity, entropy exchange and the inequality suite."""

import numpy as np
import pytest

from qreverse.errors import ValidationError
from qreverse.linalg import (
    dagger,
    frob_norm,
    partial_trace,
    shannon_entropy,
    von_neumann_entropy,
)
from qreverse.measures import (
    binary_entropy,
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
from qreverse.operations import (
    DensityOperator,
    QuantumOperation,
    apply_normalized,
    identity_operation,
    operations_equal,
    remix,
    unitary_operation,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.array([1, 0], dtype=complex)


def phase_flip():
    return QuantumOperation((np.eye(2) / np.sqrt(2), SZ / np.sqrt(2)))


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_operation(rng, d, n, total=0.9):
    ops = [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for _ in range(n)]
    e = sum(dagger(a) @ a for a in ops)
    scale = np.sqrt(total / np.linalg.eigvalsh(e)[-1])
    return QuantumOperation(tuple(scale * a for a in ops))


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ dagger(g)
    return DensityOperator(m / np.trace(m))


def random_deterministic(rng, d, n):
    """Stack Ginibre blocks and isometrize so ΣA†A = I exactly."""
    blocks = rng.normal(size=(n * d, d)) + 1j * rng.normal(size=(n * d, d))
    q, _ = np.linalg.qr(blocks)
    return QuantumOperation(tuple(q[j * d : (j + 1) * d, :] for j in range(n)))


class TestPurify:
    def test_pure_state_gives_product(self):
        rho = DensityOperator.from_ket(KET0)
        ket = purify(rho)
        joint = np.outer(ket, ket.conj())
        # marginal over the reference recovers the state, and the joint is rank one
        np.testing.assert_allclose(partial_trace(joint, (2, 2), keep=1), rho.matrix, atol=1e-12)
        assert abs(von_neumann_entropy(joint)) < 1e-12

    def test_maximally_mixed_gives_uniform_schmidt(self):
        ket = purify(DensityOperator.maximally_mixed(2))
        joint = np.outer(ket, ket.conj())
        reduced = partial_trace(joint, (2, 2), keep=0)
        np.testing.assert_allclose(np.linalg.eigvalsh(reduced), [0.5, 0.5], atol=1e-12)

    def test_marginal_recovers_state(self):
        rng = np.random.default_rng(0)
        rho = random_density(rng, 4)
        ket = purify(rho)
        joint = np.outer(ket, ket.conj())
        np.testing.assert_allclose(partial_trace(joint, (4, 4), keep=1), rho.matrix, atol=1e-10)

    def test_code_projector_state(self):
        basis = np.zeros((4, 2), dtype=complex)
        basis[0, 0] = basis[3, 1] = 1
        rho = DensityOperator(basis @ dagger(basis) / 2)
        ket = purify(rho)
        assert abs(np.linalg.norm(ket) - 1) < 1e-12
        # uniform Schmidt weights 1/sqrt(d) over the code dimension
        joint = np.outer(ket, ket.conj())
        reduced = partial_trace(joint, (4, 4), keep=0)
        vals = np.linalg.eigvalsh(reduced)
        np.testing.assert_allclose(vals[-2:], [0.5, 0.5], atol=1e-12)


class TestRQOutput:
    def test_identity_preserves_purity(self):
        rng = np.random.default_rng(1)
        rho = random_density(rng, 3)
        joint = rq_output_state(identity_operation(3), rho)
        assert abs(von_neumann_entropy(joint.matrix)) < 1e-10

    def test_pure_operation_keeps_joint_pure(self):
        rng = np.random.default_rng(2)
        rho = random_density(rng, 2)
        e = QuantumOperation((np.sqrt(0.7) * random_unitary(rng, 2),))
        joint = rq_output_state(e, rho)
        assert abs(von_neumann_entropy(joint.matrix)) < 1e-10

    def test_phase_flip_on_mixed(self):
        joint = rq_output_state(phase_flip(), DensityOperator.maximally_mixed(2))
        vals = np.sort(np.linalg.eigvalsh(joint.matrix))[::-1]
        np.testing.assert_allclose(vals[:2], [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(vals[2:], 0, atol=1e-12)

    def test_reduced_system_part_matches_apply(self):
        rng = np.random.default_rng(3)
        e = random_operation(rng, 3, 2)
        rho = random_density(rng, 3)
        joint = rq_output_state(e, rho)
        expected, _ = apply_normalized(e, rho)
        got = partial_trace(joint.matrix, (3, 3), keep=1)
        np.testing.assert_allclose(got, expected.matrix, atol=1e-10)


class TestROutput:
    def test_deterministic_preserves_reference(self):
        rng = np.random.default_rng(4)
        d = random_deterministic(rng, 3, 2)
        rho = random_density(rng, 3)
        before = rq_output_state(identity_operation(3), rho)
        ref_before = partial_trace(before.matrix, (3, 3), keep=0)
        after = r_output_state(d, rho)
        np.testing.assert_allclose(after.matrix, ref_before, atol=1e-10)

    def test_projective_branch_purifies_reference(self):
        e = QuantumOperation((np.diag([1.0, 0.0]).astype(complex),))
        out = r_output_state(e, DensityOperator.maximally_mixed(2))
        assert abs(von_neumann_entropy(out.matrix)) < 1e-10

    def test_identity_matches_system_entropy(self):
        rng = np.random.default_rng(5)
        rho = random_density(rng, 3)
        out = r_output_state(identity_operation(3), rho)
        assert abs(
            von_neumann_entropy(out.matrix) - von_neumann_entropy(rho.matrix)
        ) < 1e-10


class TestEntanglementFidelity:
    def test_identity(self):
        rng = np.random.default_rng(6)
        assert abs(entanglement_fidelity(identity_operation(3), random_density(rng, 3)) - 1) < 1e-12

    def test_unitary_formula(self):
        rng = np.random.default_rng(7)
        u = random_unitary(rng, 2)
        rho = random_density(rng, 2)
        got = entanglement_fidelity(unitary_operation(u), rho)
        assert abs(got - abs(np.trace(rho.matrix @ u)) ** 2) < 1e-12

    def test_phase_flip_on_mixed(self):
        got = entanglement_fidelity(phase_flip(), DensityOperator.maximally_mixed(2))
        assert abs(got - 0.5) < 1e-12

    def test_range_and_remix_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            e = random_operation(rng, 2, 3)
            rho = random_density(rng, 2)
            f = entanglement_fidelity(e, rho)
            assert -1e-12 <= f <= 1 + 1e-9
            mixed = remix(e, random_unitary(rng, 3))
            assert abs(entanglement_fidelity(mixed, rho) - f) < 1e-10


class TestWMatrix:
    def test_pure_operation(self):
        e = QuantumOperation((np.sqrt(0.5) * SX,))
        w = w_matrix(e, DensityOperator.maximally_mixed(2))
        np.testing.assert_allclose(w.matrix, [[1.0]], atol=1e-12)

    def test_phase_flip_on_mixed_diagonal(self):
        w = w_matrix(phase_flip(), DensityOperator.maximally_mixed(2))
        np.testing.assert_allclose(w.matrix, np.diag([0.5, 0.5]), atol=1e-12)

    def test_phase_flip_on_zero_state(self):
        w = w_matrix(phase_flip(), DensityOperator.from_ket(KET0))
        np.testing.assert_allclose(w.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_remix_covariance(self):
        rng = np.random.default_rng(9)
        e = random_operation(rng, 2, 3)
        rho = random_density(rng, 2)
        u = random_unitary(rng, 3)
        w = w_matrix(e, rho).matrix
        w_mixed = w_matrix(remix(e, u), rho).matrix
        np.testing.assert_allclose(w_mixed, u @ w @ dagger(u), atol=1e-10)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(10)
        w = w_matrix(random_operation(rng, 3, 4), random_density(rng, 3))
        p = w.probabilities
        assert np.all(p > -1e-12)
        assert abs(p.sum() - 1) < 1e-10


class TestEntropyExchange:
    def test_pure_operation_zero(self):
        rng = np.random.default_rng(11)
        e = QuantumOperation((np.sqrt(0.8) * random_unitary(rng, 2),))
        assert abs(entropy_exchange(e, random_density(rng, 2))) < 1e-12

    def test_phase_flip_on_mixed(self):
        assert abs(entropy_exchange(phase_flip(), DensityOperator.maximally_mixed(2)) - 1.0) < 1e-12

    def test_phase_flip_on_zero_state(self):
        assert abs(entropy_exchange(phase_flip(), DensityOperator.from_ket(KET0))) < 1e-12

    def test_two_path_consistency(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            e = random_operation(rng, 2, 3)
            rho = random_density(rng, 2)
            via_w = entropy_exchange(e, rho)
            via_joint = von_neumann_entropy(rq_output_state(e, rho).matrix)
            assert abs(via_w - via_joint) < 1e-9

    def test_remix_invariance(self):
        rng = np.random.default_rng(13)
        e = random_operation(rng, 2, 3)
        rho = random_density(rng, 2)
        u = random_unitary(rng, 3)
        assert abs(entropy_exchange(e, rho) - entropy_exchange(remix(e, u), rho)) < 1e-10


class TestCanonicalDecomposition:
    def test_already_canonical(self):
        canon = canonical_decomposition(phase_flip(), DensityOperator.maximally_mixed(2))
        np.testing.assert_allclose(canon.eigenvalues, [0.5, 0.5], atol=1e-12)
        assert operations_equal(canon.operation, phase_flip())

    def test_pure_operation_unchanged(self):
        rng = np.random.default_rng(14)
        e = QuantumOperation((np.sqrt(0.6) * random_unitary(rng, 2),))
        canon = canonical_decomposition(e, random_density(rng, 2))
        assert len(canon.operation) == 1
        np.testing.assert_allclose(canon.eigenvalues, [1.0], atol=1e-12)

    def test_phase_flip_on_zero_state(self):
        canon = canonical_decomposition(phase_flip(), DensityOperator.from_ket(KET0))
        np.testing.assert_allclose(canon.eigenvalues, [1.0, 0.0], atol=1e-12)
        # the surviving operator fixes |0>: it is proportional to a |0><0| projector action
        lead = canon.operation.kraus[0]
        np.testing.assert_allclose(lead @ np.diag([1.0, 0.0]), lead, atol=1e-10)
        assert abs(shannon_entropy(np.clip(canon.eigenvalues, 0, 1))) < 1e-9

    def test_entropy_matches_eigenvalues(self):
        rng = np.random.default_rng(15)
        e = random_operation(rng, 3, 3)
        rho = random_density(rng, 3)
        canon = canonical_decomposition(e, rho)
        lam = np.clip(canon.eigenvalues, 0, None)
        assert abs(entropy_exchange(e, rho) - shannon_entropy(lam / lam.sum())) < 1e-9

    def test_canonical_at_identity_is_minimal(self):
        rng = np.random.default_rng(16)
        e = random_operation(rng, 2, 6)
        canon = canonical_decomposition(e, DensityOperator.maximally_mixed(2))
        kept = [a for lam, a in zip(canon.eigenvalues, canon.operation.kraus) if lam > 1e-12]
        vecs = np.stack([a.reshape(-1) for a in kept])
        gram = vecs @ dagger(vecs)
        assert np.linalg.matrix_rank(gram, tol=1e-10) == len(kept)


class TestFano:
    def test_identity_saturates_at_zero(self):
        rng = np.random.default_rng(17)
        rep = fano_check(identity_operation(2), random_density(rng, 2))
        assert rep.holds
        assert abs(rep.entropy_exchange) < 1e-12 and abs(rep.bound) < 1e-6

    def test_phase_flip_value(self):
        rep = fano_check(phase_flip(), DensityOperator.maximally_mixed(2))
        assert rep.holds
        assert abs(rep.bound - (1.0 + 0.5 * np.log2(3))) < 1e-12
        assert abs(rep.entropy_exchange - 1.0) < 1e-12

    def test_random_sweep(self):
        rng = np.random.default_rng(18)
        for _ in range(25):
            rep = fano_check(random_operation(rng, 2, 3), random_density(rng, 2))
            assert rep.holds


class TestSubadditivity:
    def test_identity_trivially_saturated(self):
        rng = np.random.default_rng(19)
        rep = subadditivity_report(identity_operation(2), random_density(rng, 2))
        assert rep.all_hold
        assert abs(rep.entropy_exchange) < 1e-10
        assert abs(rep.s_system - rep.s_reference) < 1e-10

    def test_deterministic_reference_entropy_fixed(self):
        rng = np.random.default_rng(20)
        d = random_deterministic(rng, 2, 3)
        rho = random_density(rng, 2)
        rep = subadditivity_report(d, rho)
        assert rep.all_hold
        assert abs(rep.s_reference - von_neumann_entropy(rho.matrix)) < 1e-9

    def test_random_sweep(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            rep = subadditivity_report(random_operation(rng, 2, 3), random_density(rng, 2))
            assert rep.all_hold

    def test_product_condition_detected_for_pure_branch(self):
        # a rank-one joint output factorizes into pure marginals
        e = QuantumOperation((np.diag([1.0, 0.0]).astype(complex),))
        rep = subadditivity_report(e, DensityOperator.maximally_mixed(2))
        assert rep.rq_product_state
        assert rep.checks[0].saturated


class TestDataProcessing:
    def test_identity_chain_saturated(self):
        rng = np.random.default_rng(22)
        rep = data_processing_check(
            identity_operation(2), identity_operation(2), random_density(rng, 2)
        )
        assert rep.all_hold
        for c in rep.checks:
            assert c.saturated

    def test_deterministic_first_stage_reduces(self):
        rng = np.random.default_rng(23)
        e = random_deterministic(rng, 2, 2)
        d = random_deterministic(rng, 2, 2)
        rho = random_density(rng, 2)
        rep = data_processing_check(e, d, rho)
        assert rep.all_hold
        assert abs(rep.s_reference - von_neumann_entropy(rho.matrix)) < 1e-9

    def test_rejects_nondeterministic_second_stage(self):
        rng = np.random.default_rng(24)
        with pytest.raises(ValidationError):
            data_processing_check(
                identity_operation(2),
                QuantumOperation((np.diag([1.0, 0.0]).astype(complex),)),
                random_density(rng, 2),
            )

    def test_random_sweep(self):
        rng = np.random.default_rng(25)
        for _ in range(15):
            rep = data_processing_check(
                random_operation(rng, 2, 2),
                random_deterministic(rng, 2, 2),
                random_density(rng, 2),
            )
            assert rep.all_hold


def test_exchange_bounded_by_diagonal_shannon():
    # S_e ≤ H(q) for the diagonal q of any decomposition's W; equality for canonical.
    # The converse (equality only when W is diagonal) is probed on the same sweep:
    # any equality case must come with vanishing off-diagonals.
    rng = np.random.default_rng(26)
    for _ in range(20):
        e = random_operation(rng, 2, 3)
        rho = random_density(rng, 2)
        w = w_matrix(e, rho)
        q = np.clip(w.probabilities, 0, None)
        h_q = shannon_entropy(q / q.sum())
        s_e = entropy_exchange(e, rho)
        assert s_e <= h_q + 1e-9
        if abs(h_q - s_e) < 1e-12:
            off = w.matrix - np.diag(np.diag(w.matrix))
            assert frob_norm(off) < 1e-9
        canon = canonical_decomposition(e, rho)
        lam = np.clip(canon.eigenvalues, 0, None)
        assert abs(shannon_entropy(lam / lam.sum()) - s_e) < 1e-9


def test_binary_entropy_values():
    assert abs(binary_entropy(0.5) - 1.0) < 1e-12
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0


def test_data_processing_saturated_by_perfect_reversal():
    # a second stage that perfectly reverses the first saturates the right inequality
    from qreverse.reversal import CodeSubspace, construct_reversal

    sx = np.array([[0, 1], [1, 0]], dtype=complex)

    def flip_on(q):
        mats = [sx if i == q else np.eye(2) for i in range(3)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    p = [0.9, 0.05, 0.03, 0.02]
    kraus = [np.sqrt(p[0]) * np.eye(8, dtype=complex)]
    kraus += [np.sqrt(w) * flip_on(q) for w, q in zip(p[1:], range(3))]
    noise = QuantumOperation(tuple(kraus))
    kets = np.zeros((8, 2), dtype=complex)
    kets[0, 0] = kets[7, 1] = 1
    code = CodeSubspace(kets)
    reversal = construct_reversal(noise, code).reversal
    rep = data_processing_check(noise, reversal, code.unit_state())
    assert rep.all_hold
    assert rep.checks[1].saturated
    assert abs(rep.two_step - 1.0) < 1e-9  # log2 of the code dimension survives
