"""A full set of 2^n + 1 mutually unbiased bases for n qubits.

Basis 0 is the computational basis.  Basis j >= 1 is generated by the
symmetric GF(2) matrix A = multiplication_matrix(j - 1) in a self-dual
basis of GF(2^n): vector k of basis j has amplitudes

    <l | e_j^k> = 2^(-n/2) * (-1)^(k.l) * i^q(l),
    q(l) = sum_a A_aa l_a + 2 * sum_{a<b} A_ab l_a l_b   (mod 4),

with l_a the bit of qubit a (qubit 0 = most significant bit of the label).
This is exactly what a Hadamard layer followed by S gates on the diagonal
of A and CZ gates on its off-diagonal produces on |k>, so every basis has
a uniform circuit: all-H, then S^(A_aa), then CZ on each pair with
A_ab = 1.  Pairwise XOR differences of the A matrices are invertible,
which makes the bases mutually unbiased; `verify_unbiased` checks this
numerically rather than taking it on faith.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import (
    IRREDUCIBLE_POLY,
    MAX_DEGREE,
    BitMatrix,
    is_irreducible,
    multiplication_matrix,
    self_dual_basis,
)

_I_POW = np.array([1, 1j, -1, -1j], dtype=complex)


class IdentityBasisError(ValueError):
    """Raised when a circuit is requested for basis 0 (the identity rotation)."""


@dataclass(frozen=True)
class MubFamily:
    """Deterministic family of 2^n + 1 mutually unbiased bases.

    `generator_mats[i]` is the matrix of multiplication by x^i in the
    self-dual basis; the matrix for an arbitrary field element is their
    XOR combination, so the full 2^n-member matrix family never needs to
    be materialised.
    """

    n: int
    poly: int
    field_basis: tuple[int, ...]
    generator_mats: tuple[BitMatrix, ...]

    @property
    def n_bases(self) -> int:
        return (1 << self.n) + 1

    def matrix(self, j_prime: int) -> BitMatrix:
        """Symmetric matrix A for basis id j_prime + 1, j_prime in [0, 2^n)."""
        if not 0 <= j_prime < (1 << self.n):
            raise ValueError(f"field index {j_prime} out of range for n={self.n}")
        m = BitMatrix.zero(self.n)
        for i in range(self.n):
            if (j_prime >> i) & 1:
                m = m ^ self.generator_mats[i]
        return m


def build_family(n: int) -> MubFamily:
    """Construct the MUB family for n qubits (1 <= n <= 16)."""
    if not 1 <= n <= MAX_DEGREE:
        raise ValueError(f"qubit count must be in [1, {MAX_DEGREE}], got {n}")
    p = IRREDUCIBLE_POLY[n]
    if not is_irreducible(p):
        raise ValueError(f"built-in modulus {p:#b} failed irreducibility check")
    basis = self_dual_basis(p)
    gens = tuple(multiplication_matrix(1 << i, basis, p) for i in range(n))
    return MubFamily(n=n, poly=p, field_basis=basis, generator_mats=gens)


@lru_cache(maxsize=8)
def _bit_table(n: int) -> np.ndarray:
    """(2^n, n) table of qubit bits; column a holds bit l_a of each label."""
    shifts = np.arange(n - 1, -1, -1)
    return ((np.arange(1 << n)[:, None] >> shifts) & 1).astype(np.int64)


def _quadratic_phases(fam: MubFamily, j: int) -> np.ndarray:
    """Diagonal phase vector i^q(l) of basis j >= 1, for all 2^n labels."""
    A = fam.matrix(j - 1)
    bits = _bit_table(fam.n)
    q = bits @ np.array(A.diagonal(), dtype=np.int64)
    for a, b in A.upper_pairs():
        q = q + 2 * (bits[:, a] & bits[:, b])
    return _I_POW[q & 3]


def mub_state(fam: MubFamily, j: int, k: int) -> np.ndarray:
    """Statevector of member k of basis j, as 2^n complex amplitudes."""
    n = fam.n
    dim = 1 << n
    if not 0 <= j <= dim:
        raise ValueError(f"basis id {j} out of range for n={n}")
    if not 0 <= k < dim:
        raise ValueError(f"vector index {k} out of range for n={n}")
    if j == 0:
        v = np.zeros(dim, dtype=complex)
        v[k] = 1.0
        return v
    bits = _bit_table(n)
    kbits = bits[k]
    sign = 1 - 2 * ((bits @ kbits) & 1)
    return (2.0 ** (-n / 2)) * sign * _quadratic_phases(fam, j)


def amplitude(fam: MubFamily, j: int, k: int, l: int) -> complex:
    """Single amplitude <l | e_j^k> in O(n^2) bit operations.

    Matches the dense `mub_state` entry exactly and never allocates
    anything of size 2^n, which is what makes sparse-observable snapshot
    evaluation cheap.
    """
    n = fam.n
    dim = 1 << n
    if not (0 <= j <= dim and 0 <= k < dim and 0 <= l < dim):
        raise ValueError("index out of range")
    if j == 0:
        return complex(l == k)
    A = fam.matrix(j - 1)
    set_qubits = [a for a in range(n) if (l >> (n - 1 - a)) & 1]
    q = 0
    for idx, a in enumerate(set_qubits):
        q += A.get(a, a)
        for b in set_qubits[idx + 1 :]:
            q += 2 * A.get(a, b)
    sign = -1.0 if (k & l).bit_count() & 1 else 1.0
    return (2.0 ** (-n / 2)) * sign * complex(_I_POW[q & 3])


@dataclass(frozen=True)
class DiagonalCliffordCircuit:
    """Hadamard layer plus a diagonal of S powers and CZ gates.

    Executing the gates in order (H on every qubit, then S^p, then CZ)
    on |k> prepares vector k of the circuit's basis.  The adjoint
    sequence (CZ, then S^-p, then H) is the rotation one would run
    before a computational measurement of that basis.
    """

    n: int
    cz_pairs: tuple[tuple[int, int], ...]
    p_powers: tuple[int, ...]
    hadamard_layer: bool = True

    @property
    def cz_count(self) -> int:
        return len(self.cz_pairs)


def emit_circuit(fam: MubFamily, j: int) -> DiagonalCliffordCircuit:
    """Circuit preparing basis j >= 1; basis 0 needs no gates at all."""
    if j == 0:
        raise IdentityBasisError("basis 0 is the computational basis (identity)")
    if not 1 <= j <= (1 << fam.n):
        raise ValueError(f"basis id {j} out of range for n={fam.n}")
    A = fam.matrix(j - 1)
    return DiagonalCliffordCircuit(
        n=fam.n, cz_pairs=A.upper_pairs(), p_powers=A.diagonal()
    )


def gate_lines(circ: DiagonalCliffordCircuit) -> list[str]:
    """Plain-text gate list, one gate per line, in execution order."""
    lines = []
    if circ.hadamard_layer:
        lines.extend(f"H {a}" for a in range(circ.n))
    lines.extend(f"P {a} {s}" for a, s in enumerate(circ.p_powers) if s)
    lines.extend(f"CZ {a} {b}" for a, b in circ.cz_pairs)
    return lines


_QASM_PHASE = {1: "s", 2: "z", 3: "sdg"}


def circuit_qasm(circ: DiagonalCliffordCircuit) -> str:
    """QASM 2.0 rendering of the same gate sequence."""
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circ.n}];",
    ]
    if circ.hadamard_layer:
        lines.extend(f"h q[{a}];" for a in range(circ.n))
    lines.extend(
        f"{_QASM_PHASE[s]} q[{a}];" for a, s in enumerate(circ.p_powers) if s
    )
    lines.extend(f"cz q[{a}],q[{b}];" for a, b in circ.cz_pairs)
    return "\n".join(lines) + "\n"


def family_cz_counts(fam: MubFamily) -> list[int]:
    """CZ count of each circuit, for bases 1..2^n in order."""
    return [emit_circuit(fam, j).cz_count for j in range(1, (1 << fam.n) + 1)]


def basis_matrix(fam: MubFamily, j: int) -> np.ndarray:
    """2^n x 2^n matrix whose columns are the vectors of basis j."""
    n = fam.n
    dim = 1 << n
    if j == 0:
        return np.eye(dim, dtype=complex)
    bits = _bit_table(n)
    signs = 1 - 2 * ((bits @ bits.T) & 1)
    return (2.0 ** (-n / 2)) * _quadratic_phases(fam, j)[:, None] * signs


@dataclass(frozen=True)
class UnbiasednessReport:
    """Worst-case deviations of a family from exact mutual unbiasedness."""

    n: int
    tol: float
    max_cross_deviation: float
    worst_cross_pair: tuple[int, int]
    max_orthonormality_deviation: float
    worst_basis: int

    @property
    def passed(self) -> bool:
        return (
            self.max_cross_deviation <= self.tol
            and self.max_orthonormality_deviation <= self.tol
        )


def verify_unbiased(
    fam: MubFamily, tol: float = 1e-10, max_qubits: int = 10
) -> UnbiasednessReport:
    """Check |<e|f>|^2 = 2^-n across bases and orthonormality within each.

    Dense check over all basis pairs; refuse above `max_qubits` where the
    2^n x 2^n products stop being reasonable.
    """
    if fam.n > max_qubits:
        raise ValueError(f"dense verification limited to n <= {max_qubits}")
    dim = 1 << fam.n
    mats = [basis_matrix(fam, j) for j in range(fam.n_bases)]
    eye = np.eye(dim)
    target = 1.0 / dim
    worst_cross, worst_pair = 0.0, (0, 1)
    worst_ortho, worst_basis = 0.0, 0
    for j, B in enumerate(mats):
        dev = np.abs(B.conj().T @ B - eye).max()
        if dev > worst_ortho:
            worst_ortho, worst_basis = dev, j
        for j2 in range(j + 1, fam.n_bases):
            cross = B.conj().T @ mats[j2]
            overlap_sq = cross.real**2 + cross.imag**2  # avoids abs() sqrt noise
            dev = np.abs(overlap_sq - target).max()
            if dev > worst_cross:
                worst_cross, worst_pair = dev, (j, j2)
    return UnbiasednessReport(
        n=fam.n,
        tol=tol,
        max_cross_deviation=float(worst_cross),
        worst_cross_pair=worst_pair,
        max_orthonormality_deviation=float(worst_ortho),
        worst_basis=worst_basis,
    )
