"""Exact GF(2) linear algebra on int bitsets.

Vectors and matrix rows are packed into Python ints (LSB = column 0), so
XOR/AND and popcounts run word-parallel; this is what makes the 2^n
enumeration loops elsewhere in the package affordable. All values are
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapExceeded, DimensionMismatch

# Exhaustive coset/span enumeration cap: 2^20 ~ 1e6 elements keeps a worst
# case distance query under a second.
DEFAULT_ENUM_CAP = 20


def pack_bits(bits: Sequence[int]) -> int:
    """Pack a 0/1 sequence into an int bitset (LSB = index 0)."""
    word = 0
    for i, b in enumerate(bits):
        if b & 1:
            word |= 1 << i
    return word


def unpack_bits(word: int, n: int) -> list[int]:
    """Unpack an int bitset into a list of n bits."""
    return [(word >> i) & 1 for i in range(n)]


@dataclass(frozen=True)
class BitVector:
    """Fixed-length vector over GF(2)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 0:
            raise DimensionMismatch("length must be nonnegative")
        if self.bits >> self.n:
            raise DimensionMismatch(f"bits set beyond length {self.n}")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        return cls(len(bits), pack_bits(bits))

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        return cls.from_bits([int(c) for c in s.strip()])

    @classmethod
    def zero(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVector":
        return cls(n, 1 << i)

    def weight(self) -> int:
        return self.bits.bit_count()

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise DimensionMismatch(f"length {self.n} vs {other.n}")
        return BitVector(self.n, self.bits ^ other.bits)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def dot(self, other: "BitVector") -> int:
        """Inner product over GF(2)."""
        if self.n != other.n:
            raise DimensionMismatch(f"length {self.n} vs {other.n}")
        return (self.bits & other.bits).bit_count() & 1

    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if (self.bits >> i) & 1)

    def to_list(self) -> list[int]:
        return unpack_bits(self.bits, self.n)

    def to_string(self) -> str:
        return "".join(str(b) for b in self.to_list())


@dataclass(frozen=True)
class BitMatrix:
    """m x n matrix over GF(2), stored as int bitset rows."""

    m: int
    n: int
    rows: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.rows) != self.m:
            raise DimensionMismatch("row count mismatch")
        for r in self.rows:
            if r >> self.n:
                raise DimensionMismatch(f"row has bits beyond column {self.n}")

    @classmethod
    def from_rows(cls, rows: Sequence[int], n: int) -> "BitMatrix":
        return cls(len(rows), n, tuple(rows))

    @classmethod
    def from_bitvectors(cls, vecs: Sequence[BitVector]) -> "BitMatrix":
        if not vecs:
            raise DimensionMismatch("cannot infer width from empty row list")
        n = vecs[0].n
        return cls(len(vecs), n, tuple(v.bits for v in vecs))

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.int64) & 1
        m, n = a.shape
        return cls(m, n, tuple(pack_bits(row.tolist()) for row in a))

    @classmethod
    def zeros(cls, m: int, n: int) -> "BitMatrix":
        return cls(m, n, (0,) * m)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        """Parse a matrix literal, one row of '0'/'1' characters per line."""
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            return cls.zeros(0, 0)
        n = len(lines[0])
        rows = []
        for ln in lines:
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise DimensionMismatch(f"bad matrix line: {ln!r}")
            rows.append(pack_bits([int(c) for c in ln]))
        return cls(len(rows), n, tuple(rows))

    def to_text(self) -> str:
        return "\n".join(
            "".join(str((r >> j) & 1) for j in range(self.n)) for r in self.rows
        )

    @classmethod
    def from_triplets(cls, spec: dict) -> "BitMatrix":
        """Parse the sparse form {"m":…, "n":…, "ones":[[r,c],…]}."""
        rows = [0] * int(spec["m"])
        n = int(spec["n"])
        for r, c in spec["ones"]:
            if not (0 <= r < len(rows) and 0 <= c < n):
                raise DimensionMismatch(f"entry ({r},{c}) out of range")
            rows[r] ^= 1 << c
        return cls(len(rows), n, tuple(rows))

    def to_triplets(self) -> dict:
        ones = [
            [i, j]
            for i, r in enumerate(self.rows)
            for j in range(self.n)
            if (r >> j) & 1
        ]
        return {"m": self.m, "n": self.n, "ones": ones}

    def row(self, i: int) -> BitVector:
        return BitVector(self.n, self.rows[i])

    def row_weights(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    def column_weights(self) -> list[int]:
        return [sum((r >> j) & 1 for r in self.rows) for j in range(self.n)]

    def mul_vec(self, v: BitVector) -> BitVector:
        """Matrix-vector product over GF(2); the result is the syndrome."""
        if v.n != self.n:
            raise DimensionMismatch(f"matrix has {self.n} cols, vector {v.n}")
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & v.bits).bit_count() & 1) << i
        return BitVector(self.m, out)

    def transpose(self) -> "BitMatrix":
        cols = []
        for j in range(self.n):
            w = 0
            for i, r in enumerate(self.rows):
                w |= ((r >> j) & 1) << i
            cols.append(w)
        return BitMatrix(self.n, self.m, tuple(cols))

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.n != other.m:
            raise DimensionMismatch(f"{self.n} cols vs {other.m} rows")
        other_t = other.transpose()
        rows = []
        for r in self.rows:
            w = 0
            for j, c in enumerate(other_t.rows):
                w |= ((r & c).bit_count() & 1) << j
            rows.append(w)
        return BitMatrix(self.m, other.n, tuple(rows))

    def dense(self) -> np.ndarray:
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (r >> j) & 1
        return out

    def _row_reduce(self) -> tuple[list[int], list[int]]:
        """Row echelon form with lowest-column-first pivots.

        Returns (reduced nonzero rows, pivot column per row); deterministic so
        every derived basis is reproducible across runs.
        """
        work = list(self.rows)
        pivots: list[int] = []
        row_idx = 0
        for col in range(self.n):
            pivot = None
            for r in range(row_idx, len(work)):
                if (work[r] >> col) & 1:
                    pivot = r
                    break
            if pivot is None:
                continue
            work[row_idx], work[pivot] = work[pivot], work[row_idx]
            for r in range(len(work)):
                if r != row_idx and ((work[r] >> col) & 1):
                    work[r] ^= work[row_idx]
            pivots.append(col)
            row_idx += 1
            if row_idx == len(work):
                break
        # rows are only fully reduced once every later pivot column has been
        # eliminated, so collect them after the loop
        return work[:row_idx], pivots

    def rank(self) -> int:
        if "rank" not in self._cache:
            self._cache["rank"] = len(self._row_reduce()[0])
        return self._cache["rank"]

    def kernel_basis(self) -> list[BitVector]:
        """Basis of the right kernel {v : Mv = 0}; count = n - rank."""
        if "kernel" in self._cache:
            return list(self._cache["kernel"])
        reduced, pivots = self._row_reduce()
        pivot_set = set(pivots)
        free_cols = [j for j in range(self.n) if j not in pivot_set]
        basis = []
        for f in free_cols:
            v = 1 << f
            for r, p in zip(reduced, pivots):
                if (r >> f) & 1:
                    v |= 1 << p
            basis.append(BitVector(self.n, v))
        self._cache["kernel"] = tuple(basis)
        return basis

    def row_space_basis(self) -> list[BitVector]:
        reduced, _ = self._row_reduce()
        return [BitVector(self.n, r) for r in reduced]

    def in_row_space(self, v: BitVector) -> bool:
        if v.n != self.n:
            raise DimensionMismatch(f"{self.n} cols vs vector of length {v.n}")
        stacked = BitMatrix(self.m + 1, self.n, self.rows + (v.bits,))
        return stacked.rank() == self.rank()


def span_element(generators: Sequence[int], index: int) -> int:
    """The index-th span element: XOR of generators selected by index bits.

    Pure function of (generators, index), so callers may partition the
    2^len(generators) index space across workers.
    """
    word = 0
    for i, g in enumerate(generators):
        if (index >> i) & 1:
            word ^= g
    return word


def iter_span(generators: Sequence[int]) -> Iterator[int]:
    """Enumerate the span in Gray-code order (each step one XOR)."""
    word = 0
    yield word
    for idx in range(1, 1 << len(generators)):
        word ^= generators[(idx & -idx).bit_length() - 1]
        yield word


@dataclass(frozen=True)
class CosetFamily:
    """The set S used in the distance |y|_S = min_{s in S} |y + s|.

    S is the row space of a generator matrix; the span is cached when its
    dimension is at most the enumeration cap.
    """

    generator_matrix: BitMatrix
    enum_cap: int = DEFAULT_ENUM_CAP
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_rows(cls, rows: Sequence[int], n: int, enum_cap: int = DEFAULT_ENUM_CAP):
        return cls(BitMatrix.from_rows(rows, n), enum_cap)

    @classmethod
    def zero(cls, n: int) -> "CosetFamily":
        return cls(BitMatrix.zeros(0, n))

    @property
    def n(self) -> int:
        return self.generator_matrix.n

    def dimension(self) -> int:
        return self.generator_matrix.rank()

    def basis(self) -> list[int]:
        if "basis" not in self._cache:
            self._cache["basis"] = tuple(
                v.bits for v in self.generator_matrix.row_space_basis()
            )
        return list(self._cache["basis"])

    def span(self) -> tuple[int, ...]:
        """All 2^dim span elements; raises CapExceeded above the cap."""
        if "span" not in self._cache:
            dim = self.dimension()
            if dim > self.enum_cap:
                raise CapExceeded(
                    f"span dimension {dim} exceeds enumeration cap {self.enum_cap}"
                )
            self._cache["span"] = tuple(iter_span(self.basis()))
        return self._cache["span"]

    def contains(self, y: BitVector) -> bool:
        return self.generator_matrix.in_row_space(y)

    def distance(self, y: BitVector) -> int:
        """Exact |y|_S via exhaustive span enumeration."""
        if y.n != self.n:
            raise DimensionMismatch(f"{self.n} cols vs vector of length {y.n}")
        bits = y.bits
        return min((bits ^ s).bit_count() for s in self.span())

    def distance_bound(self, y: BitVector, radius: int) -> tuple[int, bool]:
        """Bounded-weight search over XORs of up to `radius` generator rows.

        Returns (value, exact) where exact is True only when the full span
        was within the cap anyway.
        """
        if y.n != self.n:
            raise DimensionMismatch(f"{self.n} cols vs vector of length {y.n}")
        dim = self.dimension()
        if dim <= self.enum_cap:
            return self.distance(y), True
        from itertools import combinations

        gens = self.basis()
        best = y.weight()
        for k in range(1, radius + 1):
            for combo in combinations(gens, k):
                s = 0
                for g in combo:
                    s ^= g
                w = (y.bits ^ s).bit_count()
                if w < best:
                    best = w
        return best, False


# Functional aliases matching the operation names used across the package.


def rank(m: BitMatrix) -> int:
    return m.rank()


def kernel_basis(m: BitMatrix) -> list[BitVector]:
    return m.kernel_basis()


def product(m: BitMatrix, v: BitVector) -> BitVector:
    return m.mul_vec(v)


def xor(u: BitVector, v: BitVector) -> BitVector:
    return u ^ v


def weight(v: BitVector) -> int:
    return v.weight()


def transpose(m: BitMatrix) -> BitMatrix:
    return m.transpose()


def matmul(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    return a.matmul(b)


def is_zero(m: BitMatrix) -> bool:
    return all(r == 0 for r in m.rows)


def is_orthogonal(a: BitMatrix, b: BitMatrix) -> bool:
    """Check A · Bᵀ = 0 over GF(2) (every row pair has even overlap)."""
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n} vs {b.n} columns")
    return all(
        ((ra & rb).bit_count() & 1) == 0 for ra in a.rows for rb in b.rows
    )


def coset_distance(y: BitVector, s: CosetFamily, radius: int | None = None) -> int:
    """|y|_S = min_{s in S} |y + s|.

    Exact when dim(S) is under the family's cap; with `radius` supplied, a
    bounded-weight search returning an upper bound is used instead (use
    `s.distance_bound` to also learn whether the value is exact).
    """
    if radius is not None:
        return s.distance_bound(y, radius)[0]
    return s.distance(y)


def hamming_parity_check() -> BitMatrix:
    """The [7,4] Hamming parity-check matrix: column j+1 is binary j+1."""
    rows = []
    for bit in range(3):
        w = 0
        for col in range(7):
            if ((col + 1) >> bit) & 1:
                w |= 1 << col
        rows.append(w)
    return BitMatrix.from_rows(rows, 7)
