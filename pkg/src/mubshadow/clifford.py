"""Uniformly random n-qubit Clifford elements for the baseline ensemble.

Sampling follows the Koenig-Smolin transvection construction: a uniform
symplectic matrix over GF(2) is assembled as a product of at most 4n
symplectic transvections, and 2n uniform sign bits pick the Pauli layer.
Each binary transvection with vector v corresponds to the unitary
(I - i P_v) / sqrt(2), so the dense matrix is just the product of those
factors times a Pauli correction; no gate-level circuit synthesis is
needed.  Dense matrices are the whole point of this baseline, so sampling
is capped at 6 qubits.

Bit conventions: interleaved Pauli vectors [x0, z0, x1, z1, ...] inside
the sampler; the stored tableau is grouped [x-part | z-part], rows 0..n-1
holding the images of X_0..X_{n-1} and rows n..2n-1 the images of
Z_0..Z_{n-1}, with one sign bit per row.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_MAX_DENSE_QUBITS = 6

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_PAULI_1Q = {(0, 0): _I2, (1, 0): _X, (0, 1): _Z, (1, 1): _Y}


def _pauli_dense(v: np.ndarray) -> np.ndarray:
    """Hermitian Pauli i^(x.z) X^x Z^z from an interleaved bit vector."""
    mat = np.array([[1.0 + 0j]])
    for q in range(v.shape[0] // 2):
        mat = np.kron(mat, _PAULI_1Q[(int(v[2 * q]), int(v[2 * q + 1]))])
    return mat


def _pauli_ints(v: np.ndarray) -> tuple[int, int]:
    """(x, z) basis-label masks of an interleaved Pauli vector (qubit 0 = MSB)."""
    n = v.shape[0] // 2
    x = z = 0
    for q in range(n):
        x = (x << 1) | int(v[2 * q])
        z = (z << 1) | int(v[2 * q + 1])
    return x, z


def _pauli_row_action(v: np.ndarray, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(index, weight) arrays with (P_v M)[s] = weight[s] * M[index[s]].

    Exploits that a Pauli is a signed permutation: P_v has single entry
    i^(x.z) (-1)^(z.r) at (r xor x, r).
    """
    x, z = _pauli_ints(v)
    idx = np.arange(dim) ^ x
    par = np.bitwise_count(idx & z).astype(np.int64) & 1
    weight = (1j ** ((x & z).bit_count() % 4)) * (1 - 2 * par)
    return idx, weight


def _symplectic_inner(v: np.ndarray, w: np.ndarray) -> int:
    return int((v[0::2] @ w[1::2] + v[1::2] @ w[0::2]) % 2)


def _transvect(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """T_v(w) = w + <v, w> v over GF(2)."""
    return (w + _symplectic_inner(v, w) * v) % 2


def _int2bits(k: int, width: int) -> np.ndarray:
    return (k >> np.arange(width)) & 1


def _find_transvection(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectors (v1, v2) with T_v2(T_v1(x)) = y for nonzero Pauli vectors.

    Straight from the Koenig-Smolin appendix: one transvection when x and
    y anticommute, a two-step hop through an intermediate otherwise.
    """
    m = x.shape[0]
    zero = np.zeros(m, dtype=np.int64)
    if np.array_equal(x, y):
        return zero, zero
    if _symplectic_inner(x, y) == 1:
        return (x + y) % 2, zero
    z = np.zeros(m, dtype=np.int64)
    found = False
    for q in range(m // 2):
        xq = x[2 * q] or x[2 * q + 1]
        yq = y[2 * q] or y[2 * q + 1]
        if xq and yq:  # overlap on qubit q: search a local bridge
            for a in range(4):
                z[2 * q], z[2 * q + 1] = a & 1, a >> 1
                if _symplectic_inner(x, z) == 1 and _symplectic_inner(y, z) == 1:
                    found = True
                    break
            if found:
                break
            z[2 * q] = z[2 * q + 1] = 0
    if not found:
        qx = next(q for q in range(m // 2) if x[2 * q] or x[2 * q + 1])
        qy = next(q for q in range(m // 2) if y[2 * q] or y[2 * q + 1])
        if x[2 * qx] and x[2 * qx + 1]:
            z[2 * qx + 1] = 1
        else:
            z[2 * qx], z[2 * qx + 1] = x[2 * qx + 1], x[2 * qx]
        if y[2 * qy] and y[2 * qy + 1]:
            z[2 * qy + 1] = 1
        else:
            z[2 * qy], z[2 * qy + 1] = y[2 * qy + 1], y[2 * qy]
    return (x + z) % 2, (y + z) % 2


def _sample_transvections(n: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Transvection vectors of a uniformly random element of Sp(2n, 2).

    Returned in product order: the sampled symplectic matrix is
    M[0] M[1] ... M[-1] where M[i] is the transvection matrix of vecs[i].
    Zero vectors (identity factors) are dropped.
    """
    vecs: list[np.ndarray] = []
    for level in range(n):
        m = n - level
        k = int(rng.integers(1, 1 << (2 * m)))
        bits = int(rng.integers(0, 1 << (2 * m - 1)))
        e1 = np.zeros(2 * m, dtype=np.int64)
        e1[0] = 1
        f1 = _int2bits(k, 2 * m)
        t1, t2 = _find_transvection(e1, f1)
        bvec = _int2bits(bits, 2 * m - 1)
        e_prime = e1.copy()
        e_prime[2:] = bvec[1:]
        h0 = _transvect(t2, _transvect(t1, e_prime))
        if bvec[0] == 1:
            h0 = (h0 + f1) % 2
        pad = np.zeros(2 * level, dtype=np.int64)
        for v in (f1, h0, t2, t1):
            if v.any():
                vecs.append(np.concatenate([pad, v]))
    return vecs


def _transvection_product_binary(vecs: list[np.ndarray], n: int) -> np.ndarray:
    """Interleaved 2n x 2n matrix M[0] M[1] ... M[-1] over GF(2)."""
    mat = np.eye(2 * n, dtype=np.int64)
    for v in reversed(vecs):
        vt = np.empty_like(v)
        vt[0::2], vt[1::2] = v[1::2], v[0::2]
        mat = (mat + np.outer(v, vt @ mat)) % 2
    return mat


def _interleaved_to_grouped(mat: np.ndarray, n: int) -> np.ndarray:
    """Tableau rows from interleaved columns: row q = image of X_q, etc."""
    rows = np.empty((2 * n, 2 * n), dtype=np.uint8)
    for q in range(n):
        for offset, row in ((0, q), (1, n + q)):
            col = mat[:, 2 * q + offset]
            rows[row, :n] = col[0::2]
            rows[row, n:] = col[1::2]
    return rows


def is_symplectic(tableau: np.ndarray) -> bool:
    """Check that the grouped tableau preserves the binary symplectic form."""
    two_n = tableau.shape[0]
    n = two_n // 2
    omega = np.zeros((two_n, two_n), dtype=np.int64)
    omega[:n, n:] = np.eye(n, dtype=np.int64)
    omega[n:, :n] = np.eye(n, dtype=np.int64)
    lhs = (tableau.astype(np.int64) @ omega @ tableau.T.astype(np.int64)) % 2
    return np.array_equal(lhs, omega)


@dataclass
class CliffordElement:
    """One Clifford unitary: grouped symplectic tableau, sign bits, dense matrix."""

    n: int
    tableau: np.ndarray
    sign_x: np.ndarray
    sign_z: np.ndarray
    dense: np.ndarray = field(repr=False)

    def class_key(self) -> bytes:
        """Canonical identifier of the element modulo global phase."""
        return (
            self.tableau.tobytes()
            + self.sign_x.astype(np.uint8).tobytes()
            + self.sign_z.astype(np.uint8).tobytes()
        )


def _basis_pauli(n: int, qubit: int, which: str) -> np.ndarray:
    v = np.zeros(2 * n, dtype=np.int64)
    v[2 * qubit + (0 if which == "x" else 1)] = 1
    return v


def _dense_from_transvections(vecs: list[np.ndarray], n: int) -> np.ndarray:
    dim = 1 << n
    U = np.eye(dim, dtype=complex)
    scale = 2.0 ** -0.5
    for v in reversed(vecs):
        idx, weight = _pauli_row_action(v, dim)
        U = scale * (U - 1j * (weight[:, None] * U[idx]))
    return U


def _read_sign_fast(U: np.ndarray, v_in: np.ndarray, v_out: np.ndarray) -> int:
    """As _read_sign, via the signed-permutation form of the Paulis."""
    dim = U.shape[0]
    idx, weight = _pauli_row_action(v_in, dim)
    col = U @ (weight * U.conj()[0, :][idx])  # U P_in U^dag |0>
    x_out, z_out = _pauli_ints(v_out)
    expected = 1j ** ((x_out & z_out).bit_count() % 4)
    ratio = col[x_out] / expected
    if abs(abs(ratio) - 1.0) > 1e-8 or abs(ratio.imag) > 1e-8:
        raise AssertionError("conjugated generator is not a signed Pauli")
    return int(ratio.real < 0)


def sample_clifford(
    n: int,
    rng: np.random.Generator,
    max_dense_qubits: int = DEFAULT_MAX_DENSE_QUBITS,
) -> CliffordElement:
    """Draw one Clifford element exactly uniformly (modulo global phase)."""
    if not 1 <= n <= max_dense_qubits:
        raise ValueError(
            f"dense Clifford sampling limited to n <= {max_dense_qubits}, got {n}"
        )
    vecs = _sample_transvections(n, rng)
    target_x = rng.integers(0, 2, size=n)
    target_z = rng.integers(0, 2, size=n)

    binary = _transvection_product_binary(vecs, n)
    tableau = _interleaved_to_grouped(binary, n)
    U0 = _dense_from_transvections(vecs, n)

    # Fix the Pauli layer so the dense matrix carries the drawn sign bits.
    w = np.zeros(2 * n, dtype=np.int64)
    for q in range(n):
        img_x = binary @ _basis_pauli(n, q, "x")
        img_z = binary @ _basis_pauli(n, q, "z")
        s0_x = _read_sign_fast(U0, _basis_pauli(n, q, "x"), img_x)
        s0_z = _read_sign_fast(U0, _basis_pauli(n, q, "z"), img_z)
        w[2 * q + 1] = s0_x ^ int(target_x[q])  # Z factor flips the X image
        w[2 * q] = s0_z ^ int(target_z[q])  # X factor flips the Z image
    dim = 1 << n
    x_w, z_w = _pauli_ints(w)
    col_idx = np.arange(dim) ^ x_w
    col_par = np.bitwise_count(np.arange(dim) & z_w).astype(np.int64) & 1
    # Right-multiplying by P_w permutes and phases columns.
    dense = U0[:, col_idx] * ((1j ** ((x_w & z_w).bit_count() % 4)) * (1 - 2 * col_par))

    return CliffordElement(
        n=n,
        tableau=tableau,
        sign_x=target_x.astype(np.uint8),
        sign_z=target_z.astype(np.uint8),
        dense=dense,
    )


def rotated_basis_state(elem: CliffordElement, b: int) -> np.ndarray:
    """U^dag |b> as a statevector, the snapshot state of outcome b."""
    return elem.dense[b, :].conj()


def element_from_dense(U: np.ndarray) -> CliffordElement:
    """Read the tableau of a dense Clifford matrix; test/oracle helper."""
    dim = U.shape[0]
    n = dim.bit_length() - 1
    tableau = np.empty((2 * n, 2 * n), dtype=np.uint8)
    sign_x = np.empty(n, dtype=np.uint8)
    sign_z = np.empty(n, dtype=np.uint8)
    shifts = np.arange(n - 1, -1, -1)
    for q in range(n):
        for which, row, signs in (("x", q, sign_x), ("z", n + q, sign_z)):
            P = _pauli_dense(_basis_pauli(n, q, which))
            C = U @ P @ U.conj().T
            x_int = int(np.argmax(np.abs(C[:, 0])))
            xbits = (x_int >> shifts) & 1
            base = C[x_int, 0]
            zbits = np.zeros(n, dtype=np.int64)
            for a in range(n):
                r = 1 << (n - 1 - a)
                # C[r^x, r] / C[x, 0] = (-1)^(z.r) reads off one z bit
                zbits[a] = int((C[r ^ x_int, r] / base).real < 0)
            tableau[row, :n] = xbits
            tableau[row, n:] = zbits
            expected = 1j ** (int(xbits @ zbits) % 4)
            ratio = base / expected
            if abs(abs(ratio) - 1.0) > 1e-8 or abs(ratio.imag) > 1e-8:
                raise AssertionError("matrix is not Clifford")
            signs[q] = int(ratio.real < 0)
    if not is_symplectic(tableau):
        raise AssertionError("matrix is not Clifford (tableau not symplectic)")
    return CliffordElement(
        n=n, tableau=tableau, sign_x=sign_x, sign_z=sign_z, dense=U
    )


def enumerate_single_qubit_cliffords() -> list[CliffordElement]:
    """All 24 single-qubit Clifford elements modulo global phase.

    Generated by closing {H, S} under multiplication; the count matching
    the group order 2^(1+2) * (4 - 1) = 24 is asserted, not assumed.
    """
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.array([[1, 0], [0, 1j]], dtype=complex)

    def canonical(U: np.ndarray) -> bytes:
        flat = U.reshape(-1)
        pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
        V = U * (abs(pivot) / pivot)
        # +0.0 squashes -0.0 so equal matrices share a byte pattern
        re = np.round(V.real, 9) + 0.0
        im = np.round(V.imag, 9) + 0.0
        return re.tobytes() + im.tobytes()

    seen = {canonical(np.eye(2, dtype=complex)): np.eye(2, dtype=complex)}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for U in frontier:
            for g in (h, s):
                V = g @ U
                key = canonical(V)
                if key not in seen:
                    seen[key] = V
                    nxt.append(V)
        frontier = nxt
    if len(seen) != 24:
        raise AssertionError(f"single-qubit Clifford closure has {len(seen)} elements")
    return [element_from_dense(U) for U in seen.values()]
