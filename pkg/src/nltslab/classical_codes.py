"""Classical linear codes, tensor-structured local codes, Tanner codes, and
the robustness/puncturing predicates used by the quantum Tanner pipeline.

Local-code arrays over A x B are flattened row-major: position (a, b) maps to
index a * len(B) + b, matching np.kron of (row of C_A) with (row of C_B).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb, inf
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    DegreeMismatch,
    DimensionMismatch,
    EnumerationCapExceeded,
    LengthMismatch,
)
from .gf2 import BitMatrix, BitVector, iter_span

MIN_DISTANCE_CAP = 22
ROBUSTNESS_EXHAUSTIVE_DELTA = 4
ROBUSTNESS_SAMPLED_DELTA = 6
ROBUSTNESS_SAMPLE_COUNT = 20000


@dataclass(frozen=True)
class LinearCode:
    """Binary linear code; generator and parity check are kept consistent."""

    n: int
    generator: BitMatrix
    parity_check: BitMatrix
    name: str = "code"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.generator.n != self.n or self.parity_check.n != self.n:
            raise LengthMismatch("generator/parity length disagrees with n")

    @classmethod
    def from_generator(cls, g: BitMatrix, name: str = "code") -> "LinearCode":
        h_rows = tuple(v.bits for v in g.kernel_basis())
        return cls(g.n, g, BitMatrix.from_rows(h_rows, g.n), name)

    @classmethod
    def from_parity(cls, h: BitMatrix, name: str = "code") -> "LinearCode":
        g_rows = tuple(v.bits for v in h.kernel_basis())
        return cls(h.n, BitMatrix.from_rows(g_rows, h.n), h, name)

    @classmethod
    def from_json(cls, spec: dict | str, name: str = "code") -> "LinearCode":
        if isinstance(spec, str):
            spec = json.loads(spec)
        n = int(spec["n"])
        if "generator" in spec:
            return cls.from_generator(BitMatrix.from_dense(np.array(spec["generator"]).reshape(-1, n)), name)
        return cls.from_parity(BitMatrix.from_dense(np.array(spec["parity"]).reshape(-1, n)), name)

    @property
    def k(self) -> int:
        return self.n - self.parity_check.rank()

    def dual(self) -> "LinearCode":
        return LinearCode(
            self.n, self.parity_check, self.generator, name=f"{self.name}^perp"
        )

    def contains(self, v: BitVector) -> bool:
        return self.parity_check.mul_vec(v).bits == 0

    def codewords(self, cap: int = MIN_DISTANCE_CAP) -> list[int]:
        if self.k > cap:
            raise CapExceeded(f"code dimension {self.k} exceeds cap {cap}")
        basis = [v.bits for v in self.generator.row_space_basis()]
        return list(iter_span(basis))

    def min_distance(self, cap: int = MIN_DISTANCE_CAP) -> float:
        """Exact minimum nonzero codeword weight; inf for the zero code."""
        if "d" not in self._cache:
            best = inf
            for w in self.codewords(cap):
                c = w.bit_count()
                if 0 < c < best:
                    best = c
            self._cache["d"] = best
        return self._cache["d"]

    def min_distance_upper_bound(
        self, samples: int = 5000, rng: np.random.Generator | None = None
    ) -> tuple[float, bool]:
        """Sampled upper bound for codes over the enumeration cap."""
        if self.k <= MIN_DISTANCE_CAP:
            return self.min_distance(), True
        rng = rng or np.random.default_rng(0)
        basis = [v.bits for v in self.generator.row_space_basis()]
        best = inf
        for _ in range(samples):
            word = 0
            for g in basis:
                if rng.integers(0, 2):
                    word ^= g
            c = word.bit_count()
            if 0 < c < best:
                best = c
        return best, False


def repetition_code(n: int) -> LinearCode:
    g = BitMatrix.from_rows([(1 << n) - 1], n)
    return LinearCode.from_generator(g, name=f"rep{n}")


def parity_code(n: int) -> LinearCode:
    h = BitMatrix.from_rows([(1 << n) - 1], n)
    return LinearCode.from_parity(h, name=f"par{n}")


def full_code(n: int) -> LinearCode:
    return LinearCode.from_generator(BitMatrix.identity(n), name=f"full{n}")


def zero_code(n: int) -> LinearCode:
    return LinearCode.from_parity(BitMatrix.identity(n), name=f"zero{n}")


def hamming_code() -> LinearCode:
    from .gf2 import hamming_parity_check

    return LinearCode.from_parity(hamming_parity_check(), name="hamming7")


def min_distance(c: LinearCode, cap: int = MIN_DISTANCE_CAP) -> float:
    return c.min_distance(cap)


def _kron_rows(ra: int, na: int, rb: int, nb: int) -> int:
    """Tensor of two packed rows under the row-major (a, b) flattening."""
    out = 0
    for a in range(na):
        if (ra >> a) & 1:
            out |= rb << (a * nb)
    return out


def tensor_code(ca: LinearCode, cb: LinearCode) -> LinearCode:
    """C_A tensor C_B: generated by all pairwise tensors of generator rows."""
    na, nb = ca.n, cb.n
    rows_a = [v.bits for v in ca.generator.row_space_basis()]
    rows_b = [v.bits for v in cb.generator.row_space_basis()]
    rows = [_kron_rows(ra, na, rb, nb) for ra in rows_a for rb in rows_b]
    g = BitMatrix.from_rows(rows, na * nb)
    return LinearCode.from_generator(g, name=f"{ca.name}(x){cb.name}")


def dual_tensor_code(ca: LinearCode, cb: LinearCode) -> LinearCode:
    """C_A tensor F2^B + F2^A tensor C_B (the dual of tensor of the duals)."""
    na, nb = ca.n, cb.n
    rows_a = [v.bits for v in ca.generator.row_space_basis()]
    rows_b = [v.bits for v in cb.generator.row_space_basis()]
    rows = [_kron_rows(ra, na, 1 << j, nb) for ra in rows_a for j in range(nb)]
    rows += [_kron_rows(1 << i, na, rb, nb) for i in range(na) for rb in rows_b]
    g = BitMatrix.from_rows(rows, na * nb)
    return LinearCode.from_generator(g, name=f"dualtensor({ca.name},{cb.name})")


@dataclass(frozen=True)
class LocalCodePair:
    """The two local codes on F2^Delta and their tensor derivatives."""

    code_a: LinearCode
    code_b: LinearCode

    def __post_init__(self):
        if self.code_a.n != self.code_b.n:
            raise LengthMismatch(
                f"local codes must share length: {self.code_a.n} vs {self.code_b.n}"
            )

    @property
    def delta(self) -> int:
        return self.code_a.n

    def c0(self) -> LinearCode:
        return tensor_code(self.code_a, self.code_b)

    def c1(self) -> LinearCode:
        return tensor_code(self.code_a.dual(), self.code_b.dual())

    def c0_dual(self) -> LinearCode:
        return dual_tensor_code(self.code_a.dual(), self.code_b.dual())

    def c1_dual(self) -> LinearCode:
        return dual_tensor_code(self.code_a, self.code_b)


@dataclass(frozen=True)
class RobustnessParams:
    """Constants of the robustness hypothesis for the clustering constants."""

    w: float
    p: float
    kappa: float
    lambda_exp: float
    gamma_exp: float

    def __post_init__(self):
        if not 0 < self.lambda_exp < 0.5:
            raise DimensionMismatch("lambda must lie in (0, 1/2)")
        if not 0.5 + self.lambda_exp < self.gamma_exp < 1:
            raise DimensionMismatch("gamma must lie in (1/2 + lambda, 1)")
        if self.kappa <= 0:
            raise DimensionMismatch("kappa must be positive")


def _support_coverable(
    word: int, na: int, nb: int, max_rows: float, max_cols: float
) -> bool:
    """Can supp(word) fit inside max_rows rows union max_cols columns?

    Exact by enumeration over subsets of occupied rows (at most 2^Delta).
    """
    occupied_rows = [
        a for a in range(na) if (word >> (a * nb)) & ((1 << nb) - 1)
    ]
    row_budget = int(max_rows) if max_rows != inf else len(occupied_rows)
    for r_count in range(min(row_budget, len(occupied_rows)) + 1):
        for rows in combinations(occupied_rows, r_count):
            leftover_cols = set()
            for a in occupied_rows:
                if a in rows:
                    continue
                chunk = (word >> (a * nb)) & ((1 << nb) - 1)
                for b in range(nb):
                    if (chunk >> b) & 1:
                        leftover_cols.add(b)
            if len(leftover_cols) <= max_cols:
                return True
    return False


@dataclass(frozen=True)
class RobustnessReport:
    w: float
    certified: bool
    exhaustive: bool
    words_checked: int
    violations: tuple[int, ...]  # packed words failing the cover condition


def _enumerate_low_weight(
    code: LinearCode, w: float, delta: int, rng: np.random.Generator | None
) -> tuple[list[int], bool]:
    if delta <= ROBUSTNESS_EXHAUSTIVE_DELTA:
        words = [c for c in code.codewords(cap=code.k) if 0 < c.bit_count() <= w]
        return words, True
    if delta > ROBUSTNESS_SAMPLED_DELTA:
        raise EnumerationCapExceeded(
            f"local length {delta} is beyond even sampled robustness checks"
        )
    rng = rng or np.random.default_rng(0)
    basis = [v.bits for v in code.generator.row_space_basis()]
    seen = set()
    for _ in range(ROBUSTNESS_SAMPLE_COUNT):
        word = 0
        for g in basis:
            if rng.integers(0, 2):
                word ^= g
        if 0 < word.bit_count() <= w:
            seen.add(word)
    return sorted(seen), False


def robustness_check(
    pair: LocalCodePair, w: float, rng: np.random.Generator | None = None
) -> RobustnessReport:
    """Certify the cover condition for dual-tensor codewords of weight <= w.

    A word passes if its support fits in |x|/d_A columns union |x|/d_B rows;
    every failing word is reported.
    """
    target = pair.c1_dual()
    d_a = pair.code_a.min_distance()
    d_b = pair.code_b.min_distance()
    na, nb = pair.code_a.n, pair.code_b.n
    words, exhaustive = _enumerate_low_weight(target, w, pair.delta, rng)
    violations = []
    for word in words:
        wt = word.bit_count()
        if not _support_coverable(word, na, nb, wt / d_b, wt / d_a):
            violations.append(word)
    return RobustnessReport(
        w=w,
        certified=not violations,
        exhaustive=exhaustive,
        words_checked=len(words),
        violations=tuple(violations),
    )


@dataclass(frozen=True)
class PuncturingReport:
    w: float
    p: float
    certified: bool
    exhaustive: bool
    pairs_checked: int
    failing_restrictions: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]


def puncture_resistance_check(
    pair: LocalCodePair, w: float, p: float, rng: np.random.Generator | None = None
) -> PuncturingReport:
    """Check w-robustness of every puncturing onto A'xB' with |A'|,|B'| >= Delta-p."""
    delta = pair.delta
    d_a = pair.code_a.min_distance()
    d_b = pair.code_b.min_distance()
    target = pair.c1_dual()
    words, exhaustive = _enumerate_low_weight(target, target.n, delta, rng)
    min_keep = delta - int(p)
    if min_keep < 1:
        min_keep = 1
    failing = []
    pairs_checked = 0
    for ka in range(min_keep, delta + 1):
        for a_keep in combinations(range(delta), ka):
            for kb in range(min_keep, delta + 1):
                for b_keep in combinations(range(delta), kb):
                    pairs_checked += 1
                    ok = _punctured_robust(
                        words, a_keep, b_keep, delta, w, d_a, d_b
                    )
                    if not ok:
                        failing.append((a_keep, b_keep))
    return PuncturingReport(
        w=w,
        p=p,
        certified=not failing,
        exhaustive=exhaustive,
        pairs_checked=pairs_checked,
        failing_restrictions=tuple(failing),
    )


def _punctured_robust(words, a_keep, b_keep, delta, w, d_a, d_b) -> bool:
    na, nb = len(a_keep), len(b_keep)
    seen = set()
    for word in words:
        restricted = 0
        for i, a in enumerate(a_keep):
            for j, b in enumerate(b_keep):
                if (word >> (a * delta + b)) & 1:
                    restricted |= 1 << (i * nb + j)
        seen.add(restricted)
    for word in seen:
        wt = word.bit_count()
        if 0 < wt <= w and not _support_coverable(word, na, nb, wt / d_b, wt / d_a):
            return False
    return True


def tanner_code(
    g, local: LinearCode, vertex_edge_order: Sequence[Sequence[int]] | None = None
) -> LinearCode:
    """Tanner code on the edges of a regular graph.

    vertex_edge_order fixes, per vertex, the order its incident edges feed the
    local code; by default edges are taken in edge-index order. Square graphs
    must pass the A x B label order of their complex.
    """
    n_edges = len(g.edges)
    order = vertex_edge_order
    if order is None:
        incident: list[list[int]] = [[] for _ in range(g.n_vertices)]
        for e, (u, v) in enumerate(g.edges):
            if u == v:
                raise DegreeMismatch("loops are not supported in Tanner codes")
            incident[u].append(e)
            incident[v].append(e)
        order = incident
    for v, edges in enumerate(order):
        if len(edges) != local.n:
            raise DegreeMismatch(
                f"vertex {v} has degree {len(edges)}, local code length {local.n}"
            )
    rows = []
    for edges in order:
        for h in local.parity_check.rows:
            row = 0
            for pos, e in enumerate(edges):
                if (h >> pos) & 1:
                    row ^= 1 << e
            rows.append(row)
    h_mat = BitMatrix.from_rows(rows, n_edges)
    return LinearCode.from_parity(h_mat, name=f"tanner({local.name})")


def tanner_membership_by_views(
    y: BitVector,
    local: LinearCode,
    vertex_edge_order: Sequence[Sequence[int]],
) -> bool:
    """Second membership route: every per-vertex local view lies in the local code."""
    for edges in vertex_edge_order:
        view = 0
        for pos, e in enumerate(edges):
            if (y.bits >> e) & 1:
                view |= 1 << pos
        if not local.contains(BitVector(local.n, view)):
            return False
    return True
