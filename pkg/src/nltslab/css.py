"""CSS code assembly: validation, the quantum Tanner construction, parameters,
and brute-force distances.

Qubits of a quantum Tanner code are the faces of the balanced-product complex
in canonical face order; Z checks live on V0 vertices (local code C0 = C_A (x)
C_B), X checks on V1 vertices (local code C1 = C_A-perp (x) C_B-perp). Each
vertex emits one check row per generator-basis row of its local code, so m
counts emitted rows (including dependent ones) while r is the rank.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import inf

from .classical_codes import LinearCode, LocalCodePair
from .errors import (
    CapExceeded,
    DimensionMismatch,
    NotOrthogonal,
    OrthogonalityFailure,
)
from .gf2 import BitMatrix, BitVector, CosetFamily, iter_span
from .groups_graphs import BalancedProductComplex

CSS_DISTANCE_CAP = 26


@dataclass(frozen=True)
class CssCode:
    """A validated CSS code: H_x · H_zᵀ = 0 and n = k + r_x + r_z."""

    h_x: BitMatrix
    h_z: BitMatrix
    name: str = "css"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.h_x.n

    @property
    def m_x(self) -> int:
        return self.h_x.m

    @property
    def m_z(self) -> int:
        return self.h_z.m

    @property
    def r_x(self) -> int:
        return self.h_x.rank()

    @property
    def r_z(self) -> int:
        return self.h_z.rank()

    @property
    def k(self) -> int:
        return self.n - self.r_x - self.r_z

    def c_x(self) -> LinearCode:
        """C_x = kernel of H_x."""
        if "c_x" not in self._cache:
            self._cache["c_x"] = LinearCode.from_parity(self.h_x, name=f"{self.name}.c_x")
        return self._cache["c_x"]

    def c_z(self) -> LinearCode:
        if "c_z" not in self._cache:
            self._cache["c_z"] = LinearCode.from_parity(self.h_z, name=f"{self.name}.c_z")
        return self._cache["c_z"]

    def x_stabilizers(self) -> CosetFamily:
        """C_x^perp = row space of H_x, as a coset family."""
        if "sx" not in self._cache:
            self._cache["sx"] = CosetFamily(self.h_x)
        return self._cache["sx"]

    def z_stabilizers(self) -> CosetFamily:
        if "sz" not in self._cache:
            self._cache["sz"] = CosetFamily(self.h_z)
        return self._cache["sz"]

    def to_json(self) -> dict:
        d = self._cache.get("distance")
        return {
            "name": self.name,
            "parameters": {
                "n": self.n,
                "k": self.k,
                "m_x": self.m_x,
                "m_z": self.m_z,
                "r_x": self.r_x,
                "r_z": self.r_z,
                "d": None if d is None else _json_distance(d[2]),
                "d_x": None if d is None else _json_distance(d[0]),
                "d_z": None if d is None else _json_distance(d[1]),
            },
            "h_x": self.h_x.to_triplets(),
            "h_z": self.h_z.to_triplets(),
        }

    @classmethod
    def from_json(cls, spec: dict | str) -> "CssCode":
        if isinstance(spec, str):
            spec = json.loads(spec)
        return new_css(
            BitMatrix.from_triplets(spec["h_x"]),
            BitMatrix.from_triplets(spec["h_z"]),
            name=spec.get("name", "css"),
        )


def _json_distance(d):
    return "inf" if d == inf else d


def new_css(h_x: BitMatrix, h_z: BitMatrix, name: str = "css") -> CssCode:
    """Validate orthogonality exactly; the witness row pair is reported."""
    if h_x.n != h_z.n:
        raise DimensionMismatch(
            f"H_x has {h_x.n} columns, H_z has {h_z.n}"
        )
    for i, rx in enumerate(h_x.rows):
        for j, rz in enumerate(h_z.rows):
            if (rx & rz).bit_count() & 1:
                raise NotOrthogonal(i, j)
    return CssCode(h_x, h_z, name)


def steane_code() -> CssCode:
    from .gf2 import hamming_parity_check

    h = hamming_parity_check()
    return new_css(h, h, name="steane")


def quantum_tanner(x: BalancedProductComplex, pair: LocalCodePair, name: str | None = None) -> CssCode:
    """Assemble the CSS code of the complex with the given local codes.

    Orthogonality is a theorem once the indexing is consistent and the local
    codes tolerate the label inversion a -> a^-1 of the bipartite complex
    (guaranteed e.g. for permutation-invariant local codes, or involution-only
    generator sets); a failure names the offending vertex pair.
    """
    if pair.delta != x.delta:
        raise DimensionMismatch(
            f"local codes have length {pair.delta}, complex degree {x.delta}"
        )
    n = x.n_faces
    c0 = pair.c0()
    c1 = pair.c1()
    gens_z = [v.bits for v in c0.generator.row_space_basis()]
    gens_x = [v.bits for v in c1.generator.row_space_basis()]

    def localized(view: tuple[int, ...], word: int) -> int:
        row = 0
        for pos, face in enumerate(view):
            if (word >> pos) & 1:
                row ^= 1 << face
        return row

    rows_z = [localized(view, w) for view in x.v0_views for w in gens_z]
    rows_x = [localized(view, w) for view in x.v1_views for w in gens_x]
    h_z = BitMatrix.from_rows(rows_z, n)
    h_x = BitMatrix.from_rows(rows_x, n)

    for i, rx in enumerate(h_x.rows):
        for j, rz in enumerate(h_z.rows):
            if (rx & rz).bit_count() & 1:
                vertex_x = x.v1_id(i // max(len(gens_x), 1))
                vertex_z = x.v0_id(j // max(len(gens_z), 1))
                raise OrthogonalityFailure(
                    vertex_z,
                    vertex_x,
                    "local codes are incompatible with the A/B label inversion",
                )
    code_name = name or f"qtanner({x.group.name},{pair.code_a.name},{pair.code_b.name})"
    return CssCode(h_x, h_z, code_name)


def css_distance(
    code: CssCode, cap: int = CSS_DISTANCE_CAP
) -> tuple[float, float, float]:
    """(d_x, d_z, d) by exhaustive span scans; inf sentinels when k = 0."""
    if "distance" in code._cache:
        return code._cache["distance"]
    if code.n > cap:
        raise CapExceeded(f"n = {code.n} exceeds the exhaustive cap {cap}")

    def one_side(kernel_of: BitMatrix, stabilizers: BitMatrix) -> float:
        basis = [v.bits for v in kernel_of.kernel_basis()]
        if len(basis) > cap:
            raise CapExceeded(f"codeword span dimension {len(basis)} over cap")
        stab_span = set(iter_span([v.bits for v in stabilizers.row_space_basis()]))
        best = inf
        for w in iter_span(basis):
            if w not in stab_span:
                wt = w.bit_count()
                if wt < best:
                    best = wt
        return best

    d_z = one_side(code.h_z, code.h_x)  # C_z \ C_x^perp
    d_x = one_side(code.h_x, code.h_z)
    result = (d_x, d_z, min(d_x, d_z))
    code._cache["distance"] = result
    return result


def css_distance_bounded(
    code: CssCode, max_weight: int
) -> tuple[float | None, float | None, bool]:
    """Weight-ordered search for (d_x, d_z); exact when found within budget.

    Returns (d_x, d_z, exact); a None entry means no logical representative of
    weight <= max_weight exists on that side.
    """

    def one_side(h_kernel: BitMatrix, h_stab: BitMatrix) -> float | None:
        for wt in range(1, max_weight + 1):
            for supp in combinations(range(code.n), wt):
                word = 0
                for i in supp:
                    word |= 1 << i
                v = BitVector(code.n, word)
                if h_kernel.mul_vec(v).bits == 0 and not h_stab.in_row_space(v):
                    return wt
        return None

    d_z = one_side(code.h_z, code.h_x)
    d_x = one_side(code.h_x, code.h_z)
    exact = d_x is not None and d_z is not None
    return d_x, d_z, exact


def ldpc_profile(code: CssCode) -> dict:
    """Row/column weight maxima, for locality audits."""
    col_x = code.h_x.column_weights()
    col_z = code.h_z.column_weights()
    return {
        "max_row_weight_x": max(code.h_x.row_weights(), default=0),
        "max_row_weight_z": max(code.h_z.row_weights(), default=0),
        "max_col_weight": max(
            (cx + cz for cx, cz in zip(col_x, col_z)), default=0
        ),
    }
