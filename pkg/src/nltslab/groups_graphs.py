"""Finite groups, Cayley graphs, the bipartite balanced-product complex, and
spectral/expansion checkers.

Conventions (fixed once, everything downstream depends on them):
  * a right Cayley graph connects g ~ s·g, a left Cayley graph g ~ g·s;
  * vertex (g,+) of the complex has id g, vertex (g,-) has id |G| + g;
  * a face is the class {(g,a,b), (agb, a^-1, b^-1)}; its canonical name is
    the lexicographically smaller triple of (group index, position of a in A,
    position of b in B), and faces are numbered in canonical order — this
    numbering is the qubit indexing used by the CSS layer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AsymmetricGenerators,
    CapExceeded,
    ConvergenceFailure,
    DegenerateFace,
    DimensionMismatch,
    NotBipartite,
    NotLeftRegular,
)
from .gf2 import BitMatrix

SPECTRAL_TOL = 1e-9


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table (validated at load)."""

    order: int
    table: tuple[tuple[int, ...], ...]
    name: str = "group"
    inverse: tuple[int, ...] = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        n = self.order
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise DimensionMismatch("multiplication table must be order x order")
        ident = None
        for e in range(n):
            if all(self.table[e][x] == x == self.table[x][e] for x in range(n)):
                ident = e
                break
        if ident is None:
            raise DimensionMismatch("no identity element in table")
        inv = [None] * n
        for x in range(n):
            for y in range(n):
                if self.table[x][y] == ident and self.table[y][x] == ident:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise DimensionMismatch(f"element {x} has no inverse")
        t = np.array(self.table, dtype=np.int64)
        # associativity over the full table: (xy)z == x(yz)
        if not np.array_equal(t[t, :], t[:, t]):
            raise DimensionMismatch("multiplication table is not associative")
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inv))

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self.inverse[x]

    @classmethod
    def cyclic(cls, m: int) -> "FiniteGroup":
        table = tuple(tuple((i + j) % m for j in range(m)) for i in range(m))
        return cls(m, table, name=f"Z{m}")

    @classmethod
    def dihedral(cls, m: int) -> "FiniteGroup":
        """Dihedral group of order 2m; element i + m*j is r^i s^j."""
        n = 2 * m

        def mul(x, y):
            i, j = x % m, x // m
            k, l = y % m, y // m
            rot = (i + (k if j == 0 else -k)) % m
            return rot + m * ((j + l) % 2)

        table = tuple(tuple(mul(x, y) for y in range(n)) for x in range(n))
        return cls(n, table, name=f"D{m}")

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        """Symmetric group on n letters, elements in lexicographic order."""
        elems = sorted(permutations(range(n)))
        index = {p: i for i, p in enumerate(elems)}

        def compose(p, q):  # (p*q)(x) = p(q(x))
            return tuple(p[q[x]] for x in range(n))

        table = tuple(
            tuple(index[compose(p, q)] for q in elems) for p in elems
        )
        return cls(len(elems), table, name=f"S{n}")

    @classmethod
    def from_json(cls, spec: dict | str) -> "FiniteGroup":
        if isinstance(spec, str):
            spec = json.loads(spec)
        return cls(
            int(spec["order"]),
            tuple(tuple(int(v) for v in row) for row in spec["table"]),
            name=spec.get("name", "group"),
        )

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "table": [list(r) for r in self.table],
            "name": self.name,
        }


@dataclass(frozen=True)
class GeneratorSet:
    """A symmetric generator multiset (indices into the group)."""

    elements: tuple[int, ...]
    side: str = "right"

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise DimensionMismatch(f"side must be left/right, got {self.side}")

    def validate_symmetric(self, group: FiniteGroup) -> None:
        elems = set(self.elements)
        for s in elems:
            if group.inv(s) not in elems:
                raise AsymmetricGenerators(
                    f"generator {s} has inverse {group.inv(s)} outside the set"
                )

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Graph:
    """Undirected multigraph on vertices 0..n_vertices-1."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    edge_labels: tuple = ()

    def degrees(self) -> list[int]:
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1 if u != v else 1  # a loop contributes 2 in total
        return deg

    def is_regular(self) -> bool:
        deg = self.degrees()
        return len(set(deg)) <= 1

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] += 1.0
            a[v, u] += 1.0
        return a

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return True
        seen = {0}
        stack = [0]
        nbrs: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        while stack:
            u = stack.pop()
            for v in nbrs[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n_vertices

    def is_bipartite_split(self) -> tuple[bool, list[int]]:
        """2-color if possible; returns (ok, color per vertex)."""
        color = [-1] * self.n_vertices
        nbrs: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        for start in range(self.n_vertices):
            if color[start] != -1:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                u = stack.pop()
                for v in nbrs[u]:
                    if color[v] == -1:
                        color[v] = 1 - color[u]
                        stack.append(v)
                    elif color[v] == color[u]:
                        return False, color
        return True, color

    def to_edge_list_text(self) -> str:
        return "\n".join(f"{u} {v}" for u, v in self.edges)

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, spec: dict) -> "Graph":
        return cls(
            int(spec["vertices"]),
            tuple((int(u), int(v)) for u, v in spec["edges"]),
        )


def build_cayley(group: FiniteGroup, gens: GeneratorSet, side: str | None = None) -> Graph:
    """Cayley graph: right side connects g ~ s·g, left side g ~ g·s.

    Labeled pairs (s, g) and (s^-1, s·g) name the same undirected edge and are
    emitted once; an involution generator therefore contributes degree 1.
    """
    side = side or gens.side
    gens.validate_symmetric(group)
    seen = set()
    edges = []
    labels = []
    for g in range(group.order):
        for s in gens.elements:
            h = group.mul(s, g) if side == "right" else group.mul(g, s)
            key = min((s, g), (group.inv(s), h))
            if key in seen:
                continue
            seen.add(key)
            edges.append((g, h))
            labels.append(key)
    return Graph(group.order, tuple(edges), tuple(labels))


def cayley_double_cover(group: FiniteGroup, gens: GeneratorSet, side: str | None = None) -> Graph:
    """Double cover with vertex set {+,-} x G; (g,+) has id g, (g,-) id |G|+g.

    Right cover edges: (g,+) ~ (s·g,-), one per label (s, g) in S x G; the
    left cover analogously uses (g,+) ~ (g·s,-).
    """
    side = side or gens.side
    gens.validate_symmetric(group)
    n = group.order
    edges = []
    labels = []
    for s in gens.elements:
        for g in range(n):
            h = group.mul(s, g) if side == "right" else group.mul(g, s)
            edges.append((g, n + h))
            labels.append((s, g))
    return Graph(2 * n, tuple(edges), tuple(labels))


@dataclass(frozen=True)
class Face:
    """Canonical face record of the balanced-product complex."""

    g: int
    a_pos: int
    b_pos: int
    corners_v0: tuple[int, int]  # (g, agb) as group indices
    corners_v1: tuple[int, int]  # (ag, gb) as group indices


@dataclass(frozen=True)
class BalancedProductComplex:
    """Bipartite balanced product of a right and a left Cayley double cover.

    Vertices are G x {+,-}; faces carry the qubits. v0_views/v1_views list,
    per vertex, its delta^2 incident faces in A x B label order (row-major in
    a), which is the local-view ordering every Tanner layer uses.
    """

    group: FiniteGroup
    gens_a: GeneratorSet
    gens_b: GeneratorSet
    faces: tuple[Face, ...]
    v0_views: tuple[tuple[int, ...], ...]
    v1_views: tuple[tuple[int, ...], ...]

    @property
    def delta(self) -> int:
        return len(self.gens_a)

    @property
    def n_vertices(self) -> int:
        return 2 * self.group.order

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def v0_id(self, g: int) -> int:
        return g

    def v1_id(self, g: int) -> int:
        return self.group.order + g


def find_degenerate_faces(
    group: FiniteGroup, gens_a: GeneratorSet, gens_b: GeneratorSet
) -> list[tuple[int, int, int, str]]:
    """Triples (g, a, b) whose face corners coincide, with the collapsed side."""
    bad = []
    for g in range(group.order):
        for a in gens_a.elements:
            ag = group.mul(a, g)
            for b in gens_b.elements:
                agb = group.mul(ag, b)
                gb = group.mul(g, b)
                if agb == g:
                    bad.append((g, a, b, "v0"))
                elif ag == gb:
                    bad.append((g, a, b, "v1"))
    return bad


def build_balanced_product(
    group: FiniteGroup, gens_a: GeneratorSet, gens_b: GeneratorSet
) -> BalancedProductComplex:
    """Build the complex; refuses if any face has coinciding corners."""
    if len(gens_a) != len(gens_b):
        raise DimensionMismatch(
            f"|A| = {len(gens_a)} and |B| = {len(gens_b)} must agree"
        )
    gens_a.validate_symmetric(group)
    gens_b.validate_symmetric(group)

    bad = find_degenerate_faces(group, gens_a, gens_b)
    if bad:
        g, a, b, kind = bad[0]
        side = "V0 (agb = g)" if kind == "v0" else "V1 (ag = gb)"
        raise DegenerateFace(
            f"{len(bad)} degenerate face(s); first: (g={g}, a={a}, b={b}) "
            f"collapses on {side}"
        )

    delta = len(gens_a)
    a_elems = gens_a.elements
    b_elems = gens_b.elements
    inv_pos_a = {i: a_elems.index(group.inv(a)) for i, a in enumerate(a_elems)}
    inv_pos_b = {j: b_elems.index(group.inv(b)) for j, b in enumerate(b_elems)}

    def canonical(g: int, i: int, j: int) -> tuple[int, int, int]:
        a, b = a_elems[i], b_elems[j]
        g2 = group.mul(group.mul(a, g), b)
        t1 = (g, i, j)
        t2 = (g2, inv_pos_a[i], inv_pos_b[j])
        return min(t1, t2)

    canon_set = set()
    for g in range(group.order):
        for i in range(delta):
            for j in range(delta):
                canon_set.add(canonical(g, i, j))
    canon_list = sorted(canon_set)
    face_index = {t: k for k, t in enumerate(canon_list)}

    faces = []
    for g, i, j in canon_list:
        a, b = a_elems[i], b_elems[j]
        ag = group.mul(a, g)
        gb = group.mul(g, b)
        agb = group.mul(ag, b)
        faces.append(Face(g, i, j, (g, agb), (ag, gb)))

    v0_views = tuple(
        tuple(
            face_index[canonical(g, i, j)]
            for i in range(delta)
            for j in range(delta)
        )
        for g in range(group.order)
    )
    # around (h,-) the (a,b) label names the face (a^-1 h, a, b)
    v1_views = tuple(
        tuple(
            face_index[canonical(group.mul(group.inv(a_elems[i]), h), i, j)]
            for i in range(delta)
            for j in range(delta)
        )
        for h in range(group.order)
    )

    return BalancedProductComplex(
        group, gens_a, gens_b, tuple(faces), v0_views, v1_views
    )


def square_graphs(x: BalancedProductComplex) -> tuple[Graph, Graph]:
    """The two face graphs; edge k of each graph corresponds to face k.

    That shared numbering is the face <-> edge bijection which the CSS layer
    uses as its qubit indexing.
    """
    e0 = tuple(f.corners_v0 for f in x.faces)
    e1 = tuple(f.corners_v1 for f in x.faces)
    lab = tuple((f.g, f.a_pos, f.b_pos) for f in x.faces)
    return (
        Graph(x.group.order, e0, lab),
        Graph(x.group.order, e1, lab),
    )


@dataclass(frozen=True)
class SpectralReport:
    """Adjacency spectrum summary: lambda = max(|lambda_2|, |lambda_n|)."""

    n_vertices: int
    lambda1: float
    lambda2: float
    lambda_n: float
    lam: float
    tolerance: float
    connected: bool

    def to_json(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "lambda_n": self.lambda_n,
            "lambda": self.lam,
            "tolerance": self.tolerance,
            "connected": self.connected,
        }


def spectral_lambda(g: Graph, tolerance: float = SPECTRAL_TOL) -> SpectralReport:
    """Eigenvalues of the adjacency matrix via a dense symmetric solver."""
    if g.n_vertices == 0:
        raise DimensionMismatch("empty graph")
    try:
        eigs = np.linalg.eigvalsh(g.adjacency())
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc
    eigs = np.sort(eigs)[::-1]
    lambda1 = float(eigs[0])
    lambda2 = float(eigs[1]) if len(eigs) > 1 else lambda1
    lambda_n = float(eigs[-1])
    lam = max(abs(lambda2), abs(lambda_n)) if len(eigs) > 1 else abs(lambda1)
    return SpectralReport(
        g.n_vertices, lambda1, lambda2, lambda_n, lam, tolerance, g.is_connected()
    )


@dataclass(frozen=True)
class MixingReport:
    edge_count: float
    bound: float
    degree: float
    lam: float
    holds: bool


def mixing_lemma_check(g: Graph, s: Iterable[int], t: Iterable[int]) -> MixingReport:
    """Expander mixing lemma audit: E(S,T) <= d|S||T|/|V| + lambda sqrt(|S||T|).

    E(S,T) counts ordered pairs, so an edge inside S∩T counts twice; the graph
    must be regular.
    """
    s_idx = sorted(set(s))
    t_idx = sorted(set(t))
    deg = g.degrees()
    if len(set(deg)) > 1:
        raise DimensionMismatch("mixing lemma check requires a regular graph")
    d = deg[0] if deg else 0
    a = g.adjacency()
    ind_s = np.zeros(g.n_vertices)
    ind_t = np.zeros(g.n_vertices)
    ind_s[s_idx] = 1.0
    ind_t[t_idx] = 1.0
    e_st = float(ind_s @ a @ ind_t)
    lam = spectral_lambda(g).lam
    size_s, size_t = len(s_idx), len(t_idx)
    bound = d * size_s * size_t / g.n_vertices + lam * np.sqrt(size_s * size_t)
    return MixingReport(e_st, float(bound), float(d), lam, bool(e_st <= bound + 1e-9))


@dataclass(frozen=True)
class BipartiteGraph:
    """Bipartite multigraph with explicit left/right parts."""

    n_left: int
    n_right: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for l, r in self.edges:
            if not (0 <= l < self.n_left and 0 <= r < self.n_right):
                raise NotBipartite(f"edge ({l},{r}) out of range")

    @classmethod
    def from_check_matrix(cls, h: BitMatrix) -> "BipartiteGraph":
        """Interaction graph: left = bits (columns), right = checks (rows)."""
        edges = [
            (j, i)
            for i, row in enumerate(h.rows)
            for j in range(h.n)
            if (row >> j) & 1
        ]
        return cls(h.n, h.m, tuple(edges))

    def to_check_matrix(self) -> BitMatrix:
        rows = [0] * self.n_right
        for l, r in self.edges:
            rows[r] ^= 1 << l  # parallel edges cancel over GF(2)
        return BitMatrix.from_rows(rows, self.n_left)

    def left_degrees(self) -> list[int]:
        deg = [0] * self.n_left
        for l, _ in self.edges:
            deg[l] += 1
        return deg

    def left_regular_degree(self) -> int:
        deg = self.left_degrees()
        if len(set(deg)) != 1:
            raise NotLeftRegular(f"left degrees {sorted(set(deg))} are not uniform")
        return deg[0]

    def neighbor_masks(self) -> list[int]:
        masks = [0] * self.n_left
        for l, r in self.edges:
            masks[l] |= 1 << r
        return masks

    def to_graph(self) -> Graph:
        return Graph(
            self.n_left + self.n_right,
            tuple((l, self.n_left + r) for l, r in self.edges),
        )


def unique_neighbors(g: BipartiteGraph, a: Iterable[int]) -> set[int]:
    """Right vertices with exactly one incident edge into A (multiplicity counted)."""
    a_set = set(a)
    count: dict[int, int] = {}
    for l, r in g.edges:
        if l in a_set:
            count[r] = count.get(r, 0) + 1
    return {r for r, c in count.items() if c == 1}


@dataclass(frozen=True)
class ExpansionReport:
    gamma: float
    alpha: float
    degree: int
    max_set_size: int
    sets_checked: int
    exhaustive: bool
    is_expanding: bool
    first_violation: tuple[int, ...] | None
    unique_neighbor_violations: int


SUBSET_ENUM_CAP = 1 << 18


def small_set_expansion_check(
    g: BipartiteGraph,
    gamma: float,
    alpha: float,
    rng: np.random.Generator | None = None,
    sample_count: int = 5000,
) -> ExpansionReport:
    """Check that every left subset of size <= alpha|L| is gamma-expanding.

    Exhaustive when the number of candidate subsets is small enough, sampled
    (and flagged) otherwise. Alongside expansion, the derived unique-neighbor
    bound |Γ+(A)| >= (1-2 gamma) d |A| is audited for every expanding set.
    """
    from math import comb

    d = g.left_regular_degree()
    masks = g.neighbor_masks()
    max_size = int(np.floor(alpha * g.n_left))
    n_subsets = sum(comb(g.n_left, k) for k in range(1, max_size + 1))
    exhaustive = n_subsets <= SUBSET_ENUM_CAP

    def candidate_sets():
        if exhaustive:
            for k in range(1, max_size + 1):
                yield from combinations(range(g.n_left), k)
        else:
            local_rng = rng or np.random.default_rng(0)
            for _ in range(sample_count):
                k = int(local_rng.integers(1, max_size + 1))
                yield tuple(
                    sorted(local_rng.choice(g.n_left, size=k, replace=False))
                )

    first_violation = None
    unique_violations = 0
    checked = 0
    for subset in candidate_sets():
        checked += 1
        nbr = 0
        for l in subset:
            nbr |= masks[l]
        gamma_ok = nbr.bit_count() >= (1 - gamma) * d * len(subset)
        if not gamma_ok and first_violation is None:
            first_violation = subset
        if gamma_ok:
            uplus = unique_neighbors(g, subset)
            if len(uplus) < (1 - 2 * gamma) * d * len(subset) - 1e-12:
                unique_violations += 1
    return ExpansionReport(
        gamma=gamma,
        alpha=alpha,
        degree=d,
        max_set_size=max_size,
        sets_checked=checked,
        exhaustive=exhaustive,
        is_expanding=first_violation is None,
        first_violation=first_violation,
        unique_neighbor_violations=unique_violations,
    )
