"""Tests for operator-sum maps: application, composition, Choi equality, remixing."""

import numpy as np
import pytest

from qreverse.errors import AnnihilationError, ValidationError
from qreverse.linalg import dagger, frob_norm
from qreverse.operations import (
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

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def phase_flip():
    return QuantumOperation((np.eye(2) / np.sqrt(2), SZ / np.sqrt(2)))


def phase_flip_projector_form():
    return QuantumOperation(((np.eye(2) + SZ) / 2, (np.eye(2) - SZ) / 2))


def bit_flip():
    return QuantumOperation((np.eye(2) / np.sqrt(2), SX / np.sqrt(2)))


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


class TestConstruction:
    def test_rejects_empty(self):
        with pytest.raises(ValidationError):
            QuantumOperation(())

    def test_rejects_trace_increasing(self):
        with pytest.raises(ValidationError):
            QuantumOperation((np.eye(2) * 1.1,))

    def test_cp_map_allows_trace_increasing(self):
        m = CompletelyPositiveMap((np.eye(2) * 1.4,))
        assert m.dim == 2

    def test_rejects_mixed_dims(self):
        with pytest.raises(ValidationError):
            QuantumOperation((np.eye(2) / 2, np.eye(3) / 2))


class TestApply:
    def test_identity_fixes_state(self):
        rng = np.random.default_rng(0)
        rho = random_density(rng, 2)
        out = apply(identity_operation(2), rho)
        assert not out.normalized
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_phase_flip_fixes_eigenstate(self):
        rho = DensityOperator.from_ket(KET0)
        out = apply(phase_flip(), rho)
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-12)

    def test_phase_flip_decoheres_plus(self):
        # hand oracle: (ρ + σzρσz)/2 = I/2 for ρ = |+><+|
        rho = DensityOperator.from_ket(KET_PLUS)
        out = apply(phase_flip(), rho)
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)

    def test_annihilation(self):
        e = QuantumOperation((np.diag([1.0, 0.0]).astype(complex),))
        with pytest.raises(AnnihilationError):
            apply(e, DensityOperator.from_ket(np.array([0, 1], dtype=complex)))

    def test_normalized_measurement(self):
        proj = np.diag([1.0, 0.0]).astype(complex)
        e = QuantumOperation((proj,))
        out, prob = apply_normalized(e, DensityOperator.from_ket(KET0))
        assert abs(prob - 1.0) < 1e-12
        np.testing.assert_allclose(out.matrix, proj, atol=1e-12)

    def test_normalized_on_mixed(self):
        proj = np.diag([1.0, 0.0]).astype(complex)
        e = QuantumOperation((proj,))
        out, prob = apply_normalized(e, DensityOperator.maximally_mixed(2))
        assert abs(prob - 0.5) < 1e-12
        np.testing.assert_allclose(out.matrix, proj, atol=1e-12)

    def test_deterministic_has_unit_probability(self):
        rng = np.random.default_rng(1)
        _, prob = apply_normalized(phase_flip(), random_density(rng, 2))
        assert abs(prob - 1.0) < 1e-12


class TestPovmElement:
    def test_deterministic_gives_identity(self):
        np.testing.assert_allclose(povm_element(phase_flip()), np.eye(2), atol=1e-12)

    def test_projector(self):
        proj = np.diag([1.0, 0.0]).astype(complex)
        np.testing.assert_allclose(povm_element(QuantumOperation((proj,))), proj)

    def test_weighted_pauli_errors(self):
        p = np.array([0.9, 0.05, 0.03, 0.02])
        e = QuantumOperation(
            tuple(np.sqrt(w) * s for w, s in zip(p, (np.eye(2), SX, SY, SZ)))
        )
        np.testing.assert_allclose(povm_element(e), np.eye(2), atol=1e-12)


class TestCompose:
    def test_identity_neutral(self):
        rng = np.random.default_rng(2)
        e = random_operation(rng, 2, 2)
        assert operations_equal(compose(identity_operation(2), e), e)

    def test_unitary_pair(self):
        rng = np.random.default_rng(3)
        u, v = random_unitary(rng, 3), random_unitary(rng, 3)
        got = compose(unitary_operation(u), unitary_operation(v))
        assert operations_equal(got, unitary_operation(u @ v))

    def test_two_path_agreement(self):
        rng = np.random.default_rng(4)
        e1 = random_operation(rng, 3, 2)
        e2 = random_operation(rng, 3, 2)
        rho = random_density(rng, 3)
        via_compose = apply(compose(e2, e1), rho)
        step = apply(e1, rho)
        direct = apply_to_matrix(e2, step.matrix)
        np.testing.assert_allclose(via_compose.matrix, direct, atol=1e-12)

    def test_associativity_on_apply_paths(self):
        rng = np.random.default_rng(5)
        a, b, c = (random_operation(rng, 2, 2, total=0.95) for _ in range(3))
        rho = random_density(rng, 2)
        left = apply(compose(c, compose(b, a)), rho)
        right = apply(compose(compose(c, b), a), rho)
        np.testing.assert_allclose(left.matrix, right.matrix, atol=1e-12)


class TestAdjoint:
    def test_unitary_conjugation(self):
        rng = np.random.default_rng(6)
        u = random_unitary(rng, 2)
        adj = adjoint(unitary_operation(u))
        np.testing.assert_allclose(adj.kraus[0], dagger(u))

    def test_pairing_identity(self):
        rng = np.random.default_rng(7)
        e = random_operation(rng, 3, 3)
        n = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        o = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = np.trace(dagger(n) @ apply_to_matrix(e, o))
        rhs = np.trace(dagger(apply_to_matrix(adjoint(e), n)) @ o)
        assert abs(lhs - rhs) < 1e-10

    def test_hand_expansion(self):
        # adjoint of {|0><0|, |0><1|} applied to I gives |0><0| + |1><1| = I
        k1 = np.array([[1, 0], [0, 0]], dtype=complex)
        k2 = np.array([[0, 1], [0, 0]], dtype=complex)
        adj = adjoint(QuantumOperation((k1, k2)))
        np.testing.assert_allclose(apply_to_matrix(adj, np.eye(2)), np.eye(2), atol=1e-12)


class TestChoi:
    def test_identity_is_scaled_bell_projector(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1.0
        c = choi_matrix(identity_operation(2))
        np.testing.assert_allclose(c.matrix, np.outer(bell, bell.conj()), atol=1e-12)

    def test_phase_flip_pair_equal(self):
        assert choi_distance(phase_flip(), phase_flip_projector_form()) < 1e-12

    def test_positivity(self):
        rng = np.random.default_rng(8)
        e = random_operation(rng, 3, 3)
        vals = np.linalg.eigvalsh(choi_matrix(e).matrix)
        assert vals[0] > -1e-12

    def test_remix_leaves_choi_unchanged(self):
        rng = np.random.default_rng(9)
        e = random_operation(rng, 2, 3)
        u = random_unitary(rng, 3)
        assert choi_distance(e, remix(e, u)) < 1e-12

    def test_phase_vs_bit_flip_differ(self):
        assert not operations_equal(phase_flip(), bit_flip())
        assert operations_equal(phase_flip(), phase_flip())


class TestRemix:
    def test_identity_remix(self):
        e = phase_flip()
        out = remix(e, np.eye(2))
        for a, b in zip(e.kraus, out.kraus):
            np.testing.assert_allclose(a, b)

    def test_hadamard_remix_reproduces_projector_form(self):
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        out = remix(phase_flip(), h)
        expect = phase_flip_projector_form()
        for a, b in zip(out.kraus, expect.kraus):
            np.testing.assert_allclose(a, b, atol=1e-12)

    def test_padding(self):
        e = QuantumOperation((np.eye(2) / np.sqrt(2),))
        u = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        out = remix(e, u)
        assert len(out) == 2
        assert operations_equal(e, out)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            remix(phase_flip(), np.array([[1, 0], [1, 1]], dtype=complex))


class TestFindRemixUnitary:
    def test_self_reconstructs(self):
        rng = np.random.default_rng(10)
        e = random_operation(rng, 2, 2)
        u = find_remix_unitary(e, e)
        assert u is not None
        for j, b in enumerate(e.kraus):
            rebuilt = sum(u[j, k] * e.kraus[k] for k in range(len(e)))
            assert frob_norm(rebuilt - b) < 1e-9

    def test_phase_flip_pair(self):
        e1, e2 = phase_flip(), phase_flip_projector_form()
        u = find_remix_unitary(e1, e2)
        assert u is not None
        np.testing.assert_allclose(dagger(u) @ u, np.eye(2), atol=1e-10)
        for j, b in enumerate(e2.kraus):
            rebuilt = sum(u[j, k] * e1.kraus[k] for k in range(len(e1)))
            assert frob_norm(rebuilt - b) < 1e-9

    def test_unequal_operations_give_none(self):
        assert find_remix_unitary(phase_flip(), bit_flip()) is None

    def test_random_remix_recovered(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            e = random_operation(rng, 3, 3)
            u0 = random_unitary(rng, 3)
            mixed = remix(e, u0)
            u = find_remix_unitary(e, mixed)
            assert u is not None
            np.testing.assert_allclose(dagger(u) @ u, np.eye(3), atol=1e-9)
            for j, b in enumerate(mixed.kraus):
                rebuilt = sum(u[j, k] * e.kraus[k] for k in range(len(e)))
                assert frob_norm(rebuilt - b) < 1e-9

    def test_different_lengths_padded(self):
        e1 = phase_flip()
        e2 = remix(e1, np.eye(3))  # padded 3-operator decomposition
        u = find_remix_unitary(e1, e2)
        assert u is not None
        padded = list(e1.kraus) + [np.zeros((2, 2), dtype=complex)]
        for j, b in enumerate(e2.kraus):
            rebuilt = sum(u[j, k] * padded[k] for k in range(3))
            assert frob_norm(rebuilt - b) < 1e-9


class TestClassification:
    def test_unitary_operation(self):
        rng = np.random.default_rng(12)
        e = unitary_operation(random_unitary(rng, 3))
        assert is_deterministic(e)
        assert is_pure(e)
        assert len(minimal_decomposition(e)) == 1

    def test_projector_not_deterministic(self):
        e = QuantumOperation((np.diag([1.0, 0.0]).astype(complex),))
        assert not is_deterministic(e)

    def test_linearly_dependent_pair_minimized(self):
        a = np.eye(2, dtype=complex) / 2
        e = QuantumOperation((a, a))
        minimal = minimal_decomposition(e)
        assert len(minimal) == 1
        assert operations_equal(minimal, e)

    def test_minimal_operators_linearly_independent(self):
        rng = np.random.default_rng(13)
        e = random_operation(rng, 2, 6)  # 6 operators on a 4-dim operator space
        minimal = minimal_decomposition(e)
        assert len(minimal) <= 4
        vecs = np.stack([a.reshape(-1) for a in minimal.kraus])
        gram = vecs @ dagger(vecs)
        assert np.linalg.matrix_rank(gram, tol=1e-10) == len(minimal)
        assert operations_equal(minimal, e)

    def test_mixed_not_pure(self):
        assert not is_pure(phase_flip())
        assert is_pure(QuantumOperation((np.eye(2) * 0.6, np.eye(2) * 0.5)))


def test_trace_monotonicity_property():
    rng = np.random.default_rng(14)
    for _ in range(20):
        e = random_operation(rng, 3, 2, total=rng.uniform(0.3, 1.0))
        rho = random_density(rng, 3)
        t = apply(e, rho).trace
        assert 0 < t <= 1 + 1e-9
