"""Bit-packed GF(2) linear algebra and GF(2^n) field arithmetic.

Field elements, polynomials and bit vectors are plain Python ints: bit i
holds the coefficient of x^i.  Matrices over GF(2) pack one row per int so
XOR/AND do all the work; rank and invertibility come from packed Gaussian
elimination.

Ket labels elsewhere in the package use the opposite bit order (qubit 0 is
the most significant bit of an n-bit outcome label); that convention lives
in the callers, not here.
"""

from __future__ import annotations

from dataclasses import dataclass

# One fixed irreducible polynomial per degree keeps every derived object
# (self-dual basis, matrix family, circuits) bit-reproducible across runs.
IRREDUCIBLE_POLY = {
    1: 0b11,                  # x + 1
    2: 0b111,                 # x^2 + x + 1
    3: 0b1011,                # x^3 + x + 1
    4: 0b10011,               # x^4 + x + 1
    5: 0b100101,              # x^5 + x^2 + 1
    6: 0b1000011,             # x^6 + x + 1
    7: 0b10001001,            # x^7 + x^3 + 1
    8: 0b100011101,           # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,          # x^9 + x^4 + 1
    10: 0b10000001001,        # x^10 + x^3 + 1
    11: 0b100000000101,       # x^11 + x^2 + 1
    12: 0b1000001010011,      # x^12 + x^6 + x^4 + x + 1
    13: 0b10000000011011,     # x^13 + x^4 + x^3 + x + 1
    14: 0b100010001000011,    # x^14 + x^10 + x^6 + x + 1
    15: 0b1000000000000011,   # x^15 + x + 1
    16: 0b10001000000001011,  # x^16 + x^12 + x^3 + x + 1
}

MAX_DEGREE = 16


def poly_degree(p: int) -> int:
    """Degree of the polynomial with coefficient bits p (deg(0) = -1)."""
    return p.bit_length() - 1


def poly_mod(a: int, p: int) -> int:
    """Remainder of a modulo p, both polynomial bit vectors."""
    dp = poly_degree(p)
    while poly_degree(a) >= dp:
        a ^= p << (poly_degree(a) - dp)
    return a


def is_irreducible(p: int) -> bool:
    """Exhaustive trial division, fine for degrees up to 16."""
    d = poly_degree(p)
    if d < 1:
        return False
    if d == 1:
        return True
    if not (p & 1):  # x divides p
        return False
    for q in range(2, 1 << (d // 2 + 1)):
        if poly_mod(p, q) == 0:
            return False
    return True


def gf2_mul(a: int, b: int, p: int) -> int:
    """Multiply two elements of GF(2^n), reducing modulo the irreducible p."""
    n = poly_degree(p)
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> n) & 1:
            a ^= p
    return r


def field_trace(a: int, p: int) -> int:
    """Trace a + a^2 + a^4 + ... + a^(2^(n-1)) of GF(2^n) down to {0, 1}."""
    n = poly_degree(p)
    acc = a
    t = a
    for _ in range(n - 1):
        t = gf2_mul(t, t, p)
        acc ^= t
    return acc


def trace_mask(p: int) -> int:
    """Mask m such that Tr(e) == parity(e & m); exists because Tr is linear."""
    n = poly_degree(p)
    m = 0
    for i in range(n):
        if field_trace(1 << i, p):
            m |= 1 << i
    return m


def _dual_mask(b: int, p: int) -> int:
    """Mask m such that Tr(e * b) == parity(e & m)."""
    n = poly_degree(p)
    m = 0
    for i in range(n):
        if field_trace(gf2_mul(1 << i, b, p), p):
            m |= 1 << i
    return m


def self_dual_basis(p: int) -> tuple[int, ...]:
    """Basis {b_1..b_n} of GF(2^n) over GF(2) with Tr(b_i * b_j) = delta_ij.

    Deterministic greedy search in increasing element order with
    backtracking; the trace-orthonormality conditions are affine in the
    candidate, so each level is a linear scan with two-popcount tests.
    """
    n = poly_degree(p)
    size = 1 << n
    tmask = trace_mask(p)
    chosen: list[int] = []
    masks: list[int] = []
    next_candidate = [1]
    while len(chosen) < n:
        e = next_candidate[-1]
        while e < size:
            # Tr(e^2) = Tr(e), so the diagonal condition is Tr(e) = 1.
            if (e & tmask).bit_count() & 1 and all(
                not (e & m).bit_count() & 1 for m in masks
            ):
                break
            e += 1
        else:
            if not chosen:
                raise ValueError(f"no self-dual basis for modulus {p:#b}")
            next_candidate.pop()
            next_candidate[-1] = chosen.pop() + 1
            masks.pop()
            continue
        chosen.append(e)
        masks.append(_dual_mask(e, p))
        next_candidate[-1] = e
        next_candidate.append(1)
    return tuple(chosen)


@dataclass(frozen=True)
class BitMatrix:
    """Square matrix over GF(2); rows[i] packs row i with bit j = entry (i, j)."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError("row count must equal n")

    @classmethod
    def zero(cls, n: int) -> "BitMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if other.n != self.n:
            raise ValueError("size mismatch")
        return BitMatrix(self.n, tuple(a ^ b for a, b in zip(self.rows, other.rows)))

    def is_zero(self) -> bool:
        return not any(self.rows)

    def is_symmetric(self) -> bool:
        return all(
            self.get(i, j) == self.get(j, i)
            for i in range(self.n)
            for j in range(i + 1, self.n)
        )

    def rank(self) -> int:
        work = list(self.rows)
        r = 0
        for col in range(self.n):
            pivot = next(
                (k for k in range(r, self.n) if (work[k] >> col) & 1), None
            )
            if pivot is None:
                continue
            work[r], work[pivot] = work[pivot], work[r]
            for k in range(self.n):
                if k != r and (work[k] >> col) & 1:
                    work[k] ^= work[r]
            r += 1
        return r

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.get(i, i) for i in range(self.n))

    def upper_pairs(self) -> tuple[tuple[int, int], ...]:
        """Index pairs (i, j) with i < j and entry 1; drives the CZ layer."""
        return tuple(
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if self.get(i, j)
        )


def multiplication_matrix(a: int, basis: tuple[int, ...], p: int) -> BitMatrix:
    """Matrix of x -> a*x in a self-dual basis: entry (i, j) = Tr(b_i * a * b_j).

    Symmetric for every a, XOR-linear in a, and invertible exactly when
    a != 0.
    """
    n = poly_degree(p)
    rows = []
    for i in range(n):
        c = gf2_mul(basis[i], a, p)
        row = 0
        for j in range(n):
            if field_trace(gf2_mul(c, basis[j], p), p):
                row |= 1 << j
        rows.append(row)
    return BitMatrix(n, tuple(rows))
