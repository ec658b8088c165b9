"""Construction, inner products, and norms of the core state containers."""

import numpy as np
import pytest

from ramancavity import (
    AtomState,
    JointState,
    ModeAmplitudes,
    NormalizationError,
    coherent_amplitudes,
    fidelity,
    fock_amplitudes,
    inner_product,
    make_joint_state,
)
from ramancavity.evolution import evolve

from conftest import basis_joint_state, random_joint_state


def test_mode_amplitudes_rejects_leaky_vector():
    with pytest.raises(NormalizationError):
        ModeAmplitudes(np.array([0.5, 0.5]))


def test_mode_amplitudes_accepts_unit_vector():
    m = ModeAmplitudes(np.array([1.0, 0.0, 0.0]))
    assert m.cutoff == 2
    assert m.amps.flags.writeable is False


def test_atom_state_normalization():
    AtomState(1 / np.sqrt(2), 1j / np.sqrt(2))
    with pytest.raises(NormalizationError):
        AtomState(1.0, 0.5)


def test_atom_basis_states():
    plus = AtomState.plus(phi=0.3)
    assert plus.gamma == pytest.approx(np.exp(0.3j) / np.sqrt(2))
    assert plus.delta == pytest.approx(1 / np.sqrt(2))
    # The rotated basis states are orthogonal for any phi.
    minus = AtomState.minus(phi=0.3)
    overlap = np.conj(plus.gamma) * minus.gamma + np.conj(plus.delta) * minus.delta
    assert abs(overlap) < 1e-15


def test_make_joint_state_vacuum_product():
    s = make_joint_state(fock_amplitudes(0, 2), fock_amplitudes(0, 2), AtomState.a())
    assert s.A[0, 0] == 1.0
    assert np.count_nonzero(s.A) == 1
    assert np.count_nonzero(s.B) == 0


def test_make_joint_state_b_level():
    s = make_joint_state(fock_amplitudes(0, 2), fock_amplitudes(1, 2), AtomState.b())
    assert s.B[0, 1] == 1.0
    assert np.count_nonzero(s.A) == 0


def test_make_joint_state_coherent_split():
    # Equal-weight atom: each branch carries exactly half the probability.
    m1 = coherent_amplitudes(2.0, 24)
    m2 = coherent_amplitudes(1.0, 14)
    atom = AtomState(1 / np.sqrt(2), 1 / np.sqrt(2))
    s = make_joint_state(m1, m2, atom)
    assert np.sum(np.abs(s.A) ** 2) == pytest.approx(0.5, abs=1e-10)
    assert np.sum(np.abs(s.B) ** 2) == pytest.approx(0.5, abs=1e-10)


def test_product_state_marginals_factorize():
    m1 = coherent_amplitudes(1.5, 22)
    m2 = coherent_amplitudes(0.8, 16)
    s = make_joint_state(m1, m2, AtomState.plus())
    marginal1 = np.sum(np.abs(s.A) ** 2 + np.abs(s.B) ** 2, axis=1)
    np.testing.assert_allclose(marginal1, m1.probabilities(), atol=1e-10)


def test_inner_product_self_is_one(rng):
    s = random_joint_state(rng, 5, 6)
    assert inner_product(s, s) == pytest.approx(1.0, abs=1e-12)


def test_inner_product_orthogonal_levels():
    s1 = basis_joint_state(0, 0, "a", 2, 2)
    s2 = basis_joint_state(0, 0, "b", 2, 2)
    assert inner_product(s1, s2) == 0.0


def test_inner_product_coherent_product_state():
    m1 = coherent_amplitudes(2.0, 24)
    m2 = coherent_amplitudes(1.0, 14)
    s = make_joint_state(m1, m2, AtomState.a())
    assert inner_product(s, s) == pytest.approx(1.0, abs=1e-10)


def test_inner_product_shape_mismatch():
    s1 = basis_joint_state(0, 0, "a", 2, 2)
    s2 = basis_joint_state(0, 0, "a", 3, 2)
    with pytest.raises(ValueError):
        inner_product(s1, s2)


def test_inner_product_conjugate_symmetry(rng):
    for _ in range(10):
        s1 = random_joint_state(rng, 4, 4)
        s2 = random_joint_state(rng, 4, 4)
        assert inner_product(s1, s2) == np.conj(inner_product(s2, s1))


def test_fidelity_trivial_cases():
    s1 = basis_joint_state(0, 0, "a", 2, 2)
    s2 = basis_joint_state(0, 0, "b", 2, 2)
    assert fidelity(s1, s1) == 1.0
    assert fidelity(s1, s2) == 0.0


def test_fidelity_epr_half():
    # cos^2(pi/4) overlap with the unevolved basis state.
    initial = basis_joint_state(0, 1, "a", 2, 3)
    evolved = evolve(initial, np.pi / 4)
    assert fidelity(initial, evolved) == pytest.approx(0.5, abs=1e-12)


def test_fidelity_global_phase_invariance(rng):
    s = random_joint_state(rng, 4, 5)
    for theta in (0.1, 1.0, np.pi, 4.5):
        phased = JointState(A=np.exp(1j * theta) * s.A, B=np.exp(1j * theta) * s.B)
        assert fidelity(phased, s) == pytest.approx(1.0, abs=1e-12)


def test_joint_state_shape_mismatch_rejected():
    A = np.zeros((3, 3), dtype=complex)
    B = np.zeros((3, 4), dtype=complex)
    A[0, 0] = 1.0
    with pytest.raises(ValueError):
        JointState(A=A, B=B)
