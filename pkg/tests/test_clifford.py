from collections import Counter

import numpy as np
import pytest

from mubshadow.clifford import (
    CliffordElement,
    element_from_dense,
    enumerate_single_qubit_cliffords,
    is_symplectic,
    rotated_basis_state,
    sample_clifford,
)
from mubshadow.shadow import forward_channel, inverse_channel


def random_density(n, rng):
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_sampled_tableaus_are_symplectic_and_unitary(n):
    rng = np.random.default_rng(n)
    for _ in range(50):
        el = sample_clifford(n, rng)
        assert is_symplectic(el.tableau)
        assert np.abs(el.dense @ el.dense.conj().T - np.eye(1 << n)).max() < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_dense_matrix_matches_stored_tableau(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(25):
        el = sample_clifford(n, rng)
        rt = element_from_dense(el.dense)
        assert np.array_equal(rt.tableau, el.tableau)
        assert np.array_equal(rt.sign_x, el.sign_x)
        assert np.array_equal(rt.sign_z, el.sign_z)


def test_sample_clifford_rejects_large_n():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_clifford(7, rng)
    sample_clifford(7, rng, max_dense_qubits=7)


def test_rotated_basis_state_identity_and_norm():
    ident = element_from_dense(np.eye(4, dtype=complex))
    for b in range(4):
        expected = np.zeros(4)
        expected[b] = 1.0
        assert np.array_equal(rotated_basis_state(ident, b), expected)
    rng = np.random.default_rng(2)
    for _ in range(20):
        el = sample_clifford(3, rng)
        v = rotated_basis_state(el, int(rng.integers(8)))
        assert abs(np.linalg.norm(v) - 1.0) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_rotated_states_are_stabilizer_states(n):
    rng = np.random.default_rng(n + 40)
    for _ in range(20):
        el = sample_clifford(n, rng)
        v = rotated_basis_state(el, int(rng.integers(1 << n)))
        nz = np.abs(v) > 1e-12
        mods = np.abs(v[nz])
        assert np.abs(mods - mods[0]).max() < 1e-10
        rel = v[nz] / v[nz][0]
        assert np.abs(rel**4 - 1.0).max() < 1e-9  # phases in {1, i, -1, -i}


def test_enumeration_has_24_distinct_elements_with_identity():
    els = enumerate_single_qubit_cliffords()
    keys = {el.class_key() for el in els}
    assert len(els) == 24
    assert len(keys) == 24
    assert element_from_dense(np.eye(2, dtype=complex)).class_key() in keys


def test_enumeration_closed_under_composition():
    els = enumerate_single_qubit_cliffords()
    keys = {el.class_key() for el in els}
    for a in els:
        for b in els:
            assert element_from_dense(a.dense @ b.dense).class_key() in keys


def test_enumerated_channel_reproduces_forward_channel_exactly():
    els = enumerate_single_qubit_cliffords()
    rng = np.random.default_rng(9)
    for _ in range(5):
        rho = random_density(1, rng)
        acc = np.zeros((2, 2), dtype=complex)
        for el in els:
            for b in range(2):
                v = rotated_basis_state(el, b)
                acc += (v.conj() @ rho @ v).real * np.outer(v, v.conj())
        acc /= len(els)
        assert np.abs(acc - forward_channel(rho)).max() < 1e-12


def test_single_qubit_sampling_uniform_over_classes():
    rng = np.random.default_rng(77)
    draws = 24_000
    counts = Counter(sample_clifford(1, rng).class_key() for _ in range(draws))
    assert len(counts) == 24
    p = 1 / 24
    sigma = (draws * p * (1 - p)) ** 0.5
    for c in counts.values():
        assert abs(c - draws * p) < 5 * sigma


def test_empirical_channel_two_qubits():
    # invariant: averaging inverse_channel(U^dag |b><b| U) over samples
    # approaches rho (Frobenius < 0.05 at 1e5 samples)
    n = 2
    rng = np.random.default_rng(123)
    rho = random_density(n, rng)
    evals, evecs = np.linalg.eigh(rho)
    acc = np.zeros((4, 4), dtype=complex)
    samples = 100_000
    for _ in range(samples):
        el = sample_clifford(n, rng)
        # Born sample rho via its eigen-decomposition: pick an eigenvector
        branch = rng.choice(4, p=np.clip(evals, 0, None) / evals.sum())
        psi = evecs[:, branch]
        probs = np.abs(el.dense @ psi) ** 2
        b = rng.choice(4, p=probs / probs.sum())
        v = rotated_basis_state(el, b)
        acc += inverse_channel(np.outer(v, v.conj()))
    acc /= samples
    assert np.linalg.norm(acc - rho) < 0.05


def test_class_key_distinguishes_sign_bits():
    base = element_from_dense(np.eye(2, dtype=complex))
    flipped = CliffordElement(
        n=1,
        tableau=base.tableau.copy(),
        sign_x=np.array([1], dtype=np.uint8),
        sign_z=base.sign_z.copy(),
        dense=base.dense,
    )
    assert base.class_key() != flipped.class_key()
