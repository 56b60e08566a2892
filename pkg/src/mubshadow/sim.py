"""Dense statevector simulation: state prep, Born sampling, circuit replay.

States are plain numpy complex arrays of length 2^n, indexed so that
qubit 0 is the most significant bit of the basis label.  Mixed states are
handled by stochastic pure-state branching, so nothing here ever holds a
density matrix on the hot path.

Randomness comes from counter-based Philox streams: the stream for shot i
of a run is derived from (master_seed, i, lane), which makes acquisition
deterministic regardless of how shots are distributed over workers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .mub import DiagonalCliffordCircuit, _bit_table

DEFAULT_MAX_STATEVECTOR_QUBITS = 20

LANE_ROTATION = 0
LANE_OUTCOME = 1
LANE_BRANCH = 2


def max_statevector_qubits() -> int:
    """Dense-path qubit limit; SHADOW_MAX_QUBITS overrides the default of 20."""
    return int(os.environ.get("SHADOW_MAX_QUBITS", DEFAULT_MAX_STATEVECTOR_QUBITS))


def shot_rng(master_seed: int, shot: int, lane: int = 0) -> np.random.Generator:
    """Philox stream for one (shot, lane) pair of a seeded run."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(shot, lane))
    return np.random.Generator(np.random.Philox(ss))


def ghz_state(n: int) -> np.ndarray:
    """(|0...0> + |1...1>) / sqrt(2)."""
    limit = max_statevector_qubits()
    if not 1 <= n <= limit:
        raise ValueError(f"qubit count must be in [1, {limit}], got {n}")
    v = np.zeros(1 << n, dtype=complex)
    v[0] = v[-1] = 2.0 ** -0.5
    return v


def ghz_minus_state(n: int) -> np.ndarray:
    """(|0...0> - |1...1>) / sqrt(2), the phase-flipped GHZ branch."""
    v = ghz_state(n)
    v[-1] = -v[-1]
    return v


@dataclass(frozen=True)
class StateModel:
    """Source of pure-state branches: fixed vector, GHZ, or phase-noisy GHZ.

    The noisy variant emits |GHZ+> with probability 1-p and |GHZ-> with
    probability p, so averaging the branch projectors reproduces the
    rank-2 mixed state exactly.
    """

    kind: str
    n: int
    p: float = 0.0
    amplitudes: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def pure(cls, amplitudes: np.ndarray) -> "StateModel":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        dim = amplitudes.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n or amplitudes.ndim != 1:
            raise ValueError("amplitude vector length must be a power of two")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state norm {norm} deviates from 1 beyond 1e-9")
        return cls(kind="pure", n=n, amplitudes=amplitudes)

    @classmethod
    def ghz(cls, n: int) -> "StateModel":
        return cls(kind="ghz", n=n, amplitudes=ghz_state(n))

    @classmethod
    def noisy_ghz(cls, n: int, p: float) -> "StateModel":
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"error probability must be in [0, 1], got {p}")
        return cls(kind="noisy_ghz", n=n, p=float(p), amplitudes=ghz_state(n))

    def describe(self) -> str:
        if self.kind == "noisy_ghz":
            return f"noisy-ghz(p={self.p})"
        return self.kind

    def branches(self) -> list[tuple[float, np.ndarray]]:
        """(probability, statevector) decomposition of the modelled state."""
        if self.kind == "noisy_ghz":
            return [(1.0 - self.p, ghz_state(self.n)), (self.p, ghz_minus_state(self.n))]
        return [(1.0, self.amplitudes)]

    def density(self) -> np.ndarray:
        """Dense density matrix; oracle/small-n use only."""
        dim = 1 << self.n
        rho = np.zeros((dim, dim), dtype=complex)
        for prob, vec in self.branches():
            rho += prob * np.outer(vec, vec.conj())
        return rho


def sample_branch(model: StateModel, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Draw one pure-state branch; returns (branch index, statevector).

    Deterministic models return branch 0 without consuming randomness.
    """
    if model.kind != "noisy_ghz":
        return 0, model.amplitudes
    if rng.random() < model.p:
        return 1, ghz_minus_state(model.n)
    return 0, ghz_state(model.n)


def sample_outcome(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw over outcome labels in increasing (lexicographic) order."""
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"outcome probabilities sum to {total}; basis looks broken")
    cdf = np.cumsum(probs / total)
    return int(np.searchsorted(cdf, rng.random(), side="right").clip(0, len(probs) - 1))


def born_probabilities(state: np.ndarray, basis) -> np.ndarray:
    """|<e_b|psi>|^2 for every vector of a basis.

    `basis` is either a matrix whose columns are the basis vectors, or a
    callable b -> statevector.
    """
    if callable(basis):
        dim = state.shape[0]
        probs = np.empty(dim)
        for b in range(dim):
            probs[b] = abs(np.vdot(basis(b), state)) ** 2
        return probs
    return np.abs(basis.conj().T @ state) ** 2


def born_sample(state: np.ndarray, basis, rng: np.random.Generator) -> int:
    """Sample one measurement outcome of `state` against `basis`."""
    return sample_outcome(born_probabilities(state, basis), rng)


def fwht(x: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform: y_b = sum_l (-1)^(b.l) x_l."""
    y = np.array(x)
    length = y.shape[0]
    h = 1
    while h < length:
        y = y.reshape(-1, 2, h)
        top = y[:, 0, :] + y[:, 1, :]
        bot = y[:, 0, :] - y[:, 1, :]
        y = np.stack([top, bot], axis=1).reshape(length)
        h *= 2
    return y


def circuit_phase_vector(circ: DiagonalCliffordCircuit) -> np.ndarray:
    """Diagonal i^q(l) implementing the circuit's S and CZ stages."""
    bits = _bit_table(circ.n)
    q = bits @ np.asarray(circ.p_powers, dtype=np.int64)
    for a, b in circ.cz_pairs:
        q = q + 2 * (bits[:, a] & bits[:, b])
    phases = np.array([1, 1j, -1, -1j], dtype=complex)
    return phases[q & 3]


def apply_circuit(circ: DiagonalCliffordCircuit, state: np.ndarray) -> np.ndarray:
    """Run the circuit on a statevector (Hadamard stage first, then phases)."""
    if state.shape[0] != 1 << circ.n:
        raise ValueError("circuit and state qubit counts differ")
    out = np.asarray(state, dtype=complex)
    if circ.hadamard_layer:
        out = fwht(out) * 2.0 ** (-circ.n / 2)
    return circuit_phase_vector(circ) * out
