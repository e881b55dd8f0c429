"""Approximate-codeword sets, cluster decompositions, and every clustering
check in the low-energy-state argument: the Markov mass bound, the
no-concentration dichotomy, spread certificates, iterated weight reduction,
and the exceptional-vertex accounting on the square graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, floor, inf, sqrt
from typing import Iterable, Sequence

import numpy as np

from .classical_codes import LocalCodePair
from .css import CssCode
from .errors import (
    CapExceeded,
    DegenerateCode,
    DimensionMismatch,
    PreconditionFailed,
)
from .gf2 import BitVector, CosetFamily, iter_span
from .groups_graphs import BalancedProductComplex
from .hamiltonian import StabilizerHamiltonian, energy_from_distributions
from .quantumsim import (
    MeasurementDistribution,
    StateVector,
    depth_lower_bound,
    measurement_distributions,
)

GDELTA_ENUM_CAP = 26
SAMPLED_MEMBER_TARGET = 4096


def _violation_counts(code: CssCode, basis: str) -> np.ndarray:
    h = code._cache.get("hamiltonian")
    if h is None:
        h = StabilizerHamiltonian.from_code(code)
        code._cache["hamiltonian"] = h
    return h.violation_counts(basis)


def _check_count(code: CssCode, basis: str) -> int:
    return code.m_z if basis == "Z" else code.m_x


def _stabilizer_family(code: CssCode, basis: str) -> CosetFamily:
    """The coset family measured against: C_x^perp for Z strings, C_z^perp
    for X strings."""
    return code.x_stabilizers() if basis == "Z" else code.z_stabilizers()


@dataclass(frozen=True)
class ApproximateCodewordSet:
    """G^delta in one basis: strings violating at most a delta fraction."""

    basis: str
    delta: float
    n: int
    members: tuple[int, ...]
    exhaustive: bool

    def __len__(self) -> int:
        return len(self.members)


def enumerate_gdelta(
    code: CssCode,
    basis: str,
    delta: float,
    cap: int = GDELTA_ENUM_CAP,
    rng: np.random.Generator | None = None,
) -> ApproximateCodewordSet:
    """Enumerate G^delta exactly when 2^n is in reach.

    Over the cap, falls back to a sampled subset drawn near the code space
    (random codewords plus low-weight errors), flagged non-exhaustive.
    """
    m = _check_count(code, basis)
    if code.n <= cap:
        counts = _violation_counts(code, basis)
        members = np.nonzero(counts <= delta * m)[0]
        return ApproximateCodewordSet(
            basis, delta, code.n, tuple(int(y) for y in members), True
        )
    rng = rng or np.random.default_rng(0)
    h_rows = (code.h_z if basis == "Z" else code.h_x).rows
    kernel = (code.h_z if basis == "Z" else code.h_x).kernel_basis()
    seen = set()
    for _ in range(SAMPLED_MEMBER_TARGET):
        word = 0
        for v in kernel:
            if rng.integers(0, 2):
                word ^= v.bits
        flips = rng.integers(0, max(1, int(delta * m) + 1))
        for q in rng.choice(code.n, size=int(flips), replace=True):
            word ^= 1 << int(q)
        violations = sum(((w & word).bit_count() & 1) for w in h_rows)
        if violations <= delta * m:
            seen.add(word)
    return ApproximateCodewordSet(basis, delta, code.n, tuple(sorted(seen)), False)


def xor_closure_audit(
    gset: ApproximateCodewordSet, code: CssCode
) -> list[tuple[int, int]]:
    """Pairs x, y in G^delta whose XOR leaves G^{2 delta} (expected: none)."""
    m = _check_count(code, gset.basis)
    counts = _violation_counts(code, gset.basis)
    members = np.asarray(gset.members, dtype=np.int64)
    bad = []
    for i, x in enumerate(members):
        xors = np.bitwise_xor(members[i:], x)
        over = counts[xors] > 2 * gset.delta * m
        for j in np.nonzero(over)[0]:
            bad.append((int(x), int(members[i + j])))
    return bad


def _pairwise_coset_distances(
    members: Sequence[int], family: CosetFamily, n: int
) -> np.ndarray:
    """Matrix of |x + y|_S for all member pairs (numpy path for n <= 63)."""
    span = family.span()
    size = len(members)
    if n <= 63:
        arr = np.asarray(members, dtype=np.uint64)
        xo = arr[:, None] ^ arr[None, :]
        dist = np.full((size, size), n, dtype=np.int64)
        for s in span:
            cand = np.bitwise_count(xo ^ np.uint64(s)).astype(np.int64)
            np.minimum(dist, cand, out=dist)
        return dist
    dist = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(i + 1, size):
            d = min(((members[i] ^ members[j]) ^ s).bit_count() for s in span)
            dist[i, j] = dist[j, i] = d
    return dist


def _pairwise_hamming(members: Sequence[int], n: int) -> np.ndarray:
    if n <= 63:
        arr = np.asarray(members, dtype=np.uint64)
        return np.bitwise_count(arr[:, None] ^ arr[None, :]).astype(np.int64)
    size = len(members)
    out = np.zeros((size, size), dtype=np.int64)
    for i in range(size):
        for j in range(i + 1, size):
            out[i, j] = out[j, i] = (members[i] ^ members[j]).bit_count()
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class ClusterDecomposition:
    """Partition of G^delta under the relation |x + y|_S <= threshold.

    Components are taken of the relation graph (union-find), so the partition
    exists even when transitivity fails; any within-cluster pair beyond the
    threshold is recorded in transitivity_violations rather than hidden.
    """

    basis: str
    threshold: int
    n: int
    clusters: tuple[tuple[int, ...], ...]
    min_inter_hamming: float
    inter_hamming: np.ndarray = field(repr=False, compare=False)
    transitivity_violations: tuple[tuple[int, int], ...] = ()

    @property
    def cluster_count(self) -> int:
        return len(self.clusters)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.clusters]


def cluster_decompose(
    gset: ApproximateCodewordSet, code: CssCode, threshold: int
) -> ClusterDecomposition:
    """Union-find decomposition with transitivity audited, not assumed."""
    family = _stabilizer_family(code, gset.basis)
    members = list(gset.members)
    size = len(members)
    if size == 0:
        return ClusterDecomposition(
            gset.basis, threshold, code.n, (), inf, np.zeros((0, 0))
        )
    if threshold >= code.n:
        # coset distance never exceeds n, so everything is one cluster
        return ClusterDecomposition(
            gset.basis,
            threshold,
            code.n,
            (tuple(members),),
            inf,
            np.full((1, 1), inf),
        )
    dists = _pairwise_coset_distances(members, family, code.n)
    uf = _UnionFind(size)
    close = np.nonzero(dists <= threshold)
    for i, j in zip(*close):
        if i < j:
            uf.union(int(i), int(j))
    groups: dict[int, list[int]] = {}
    for i in range(size):
        groups.setdefault(uf.find(i), []).append(i)
    ordered = sorted(groups.values(), key=lambda idx: members[idx[0]])

    violations = []
    for idx in ordered:
        block = dists[np.ix_(idx, idx)]
        over = np.nonzero(block > threshold)
        for a, b in zip(*over):
            if a < b:
                violations.append((members[idx[a]], members[idx[b]]))

    hamming = _pairwise_hamming(members, code.n)
    count = len(ordered)
    inter = np.full((count, count), inf)
    for a in range(count):
        for b in range(a + 1, count):
            block = hamming[np.ix_(ordered[a], ordered[b])]
            inter[a, b] = inter[b, a] = float(block.min())
    min_inter = float(inter.min()) if count > 1 else inf

    clusters = tuple(tuple(members[i] for i in idx) for idx in ordered)
    return ClusterDecomposition(
        gset.basis,
        threshold,
        code.n,
        clusters,
        min_inter,
        inter,
        tuple(violations),
    )


def cluster_masses(
    decomp: ClusterDecomposition, dist: MeasurementDistribution
) -> list[float]:
    return [dist.mass(cluster) for cluster in decomp.clusters]


def cluster_size_bound_audit(
    decomp: ClusterDecomposition, code: CssCode
) -> dict:
    """|B^i| <= 2^r * C(n, threshold), with r the opposite-side check rank.

    The bound is derived from the within-cluster pairwise premise, so it is
    audited only when that premise holds (no transitivity violations) and the
    threshold sits in the binomial's monotone regime; outside that the audit
    reports applicable=False rather than a false violation.
    """
    r = code.r_x if decomp.basis == "Z" else code.r_z
    bound = 2**r * comb(code.n, min(decomp.threshold, code.n))
    sizes = decomp.sizes()
    applicable = (
        not decomp.transitivity_violations and decomp.threshold <= code.n // 2
    )
    return {
        "bound": bound,
        "max_size": max(sizes, default=0),
        "applicable": applicable,
        "holds": (not applicable) or all(s <= bound for s in sizes),
    }


def binomial_bound_audit(n: int, betas: Iterable[float]) -> dict:
    """C(n, floor(beta n)) <= 2^{2 sqrt(beta) n} over a beta grid."""
    worst = None
    ok = True
    for beta in betas:
        lhs = comb(n, floor(beta * n))
        rhs = 2.0 ** (2.0 * sqrt(beta) * n)
        if lhs > rhs:
            ok = False
            worst = beta
    return {"n": n, "holds": ok, "first_failure": worst}


@dataclass(frozen=True)
class GapProfile:
    """Sorted histogram of coset distances over G^delta."""

    basis: str
    delta: float
    histogram: tuple[tuple[int, int], ...]  # (distance, multiplicity)
    gap_interval: tuple[int, int]           # widest empty interval

    def distances(self) -> list[int]:
        return [d for d, _ in self.histogram]


def _gap_profile(
    basis: str, delta: float, members: Sequence[int], family: CosetFamily, n: int
) -> GapProfile:
    from collections import Counter

    span = family.span()
    counter: Counter[int] = Counter()
    if n <= 63 and members:
        arr = np.asarray(members, dtype=np.uint64)
        best = np.full(len(arr), n, dtype=np.int64)
        for s in span:
            np.minimum(best, np.bitwise_count(arr ^ np.uint64(s)).astype(np.int64), out=best)
        counter = Counter(int(b) for b in best)
    else:
        for y in members:
            counter[min(((y ^ s).bit_count()) for s in span)] += 1
    hist = tuple(sorted(counter.items()))
    values = [d for d, _ in hist]
    gap = (values[0], values[0]) if values else (0, 0)
    widest = -1
    for lo, hi in zip(values, values[1:]):
        if hi - lo > widest:
            widest = hi - lo
            gap = (lo, hi)
    return GapProfile(basis, delta, hist, gap)


@dataclass(frozen=True)
class Property1SideReport:
    basis: str
    member_count: int
    profile: GapProfile
    violations: tuple[int, ...]
    passes: bool
    fitted_c1: float | None
    fitted_c2: float | None


@dataclass(frozen=True)
class Property1Report:
    delta: float
    c1: float | None
    c2: float | None
    z_side: Property1SideReport
    x_side: Property1SideReport

    @property
    def passes(self) -> bool:
        return self.z_side.passes and self.x_side.passes


def property1_check(
    code: CssCode,
    delta: float,
    c1: float | None = None,
    c2: float | None = None,
    cap: int = GDELTA_ENUM_CAP,
) -> Property1Report:
    """Scan both G^delta sets for the distance dichotomy.

    With constants supplied, every member must satisfy |y|_S <= c1 delta n or
    |y|_S >= c2 n; every violator is returned. The empirical profile and the
    best-fit constants (widest empty distance interval) are always reported.
    """
    sides = {}
    for basis in ("Z", "X"):
        gset = enumerate_gdelta(code, basis, delta, cap=cap)
        if not gset.exhaustive:
            raise CapExceeded("property 1 scan needs the exhaustive regime")
        family = _stabilizer_family(code, basis)
        profile = _gap_profile(basis, delta, gset.members, family, code.n)
        violations: list[int] = []
        if c1 is not None and c2 is not None and gset.members:
            arr = np.asarray(gset.members, dtype=np.uint64)
            best = np.full(len(arr), code.n, dtype=np.int64)
            for s in family.span():
                np.minimum(
                    best,
                    np.bitwise_count(arr ^ np.uint64(s)).astype(np.int64),
                    out=best,
                )
            low = c1 * delta * code.n
            high = c2 * code.n
            bad = (best > low) & (best < high)
            violations = [int(v) for v in arr[bad]]
        lo, hi = profile.gap_interval
        fitted_c1 = (lo / (delta * code.n)) if delta > 0 else None
        fitted_c2 = hi / code.n if hi > lo else None
        sides[basis] = Property1SideReport(
            basis=basis,
            member_count=len(gset.members),
            profile=profile,
            violations=tuple(violations),
            passes=not violations,
            fitted_c1=fitted_c1,
            fitted_c2=fitted_c2,
        )
    return Property1Report(delta, c1, c2, sides["Z"], sides["X"])


@dataclass(frozen=True)
class NltsConstants:
    """Clustering constants plus the energy scale of a pipeline run."""

    c1: float
    c2: float
    delta0: float
    epsilon: float
    epsilon1: float | None = None

    def __post_init__(self):
        if min(self.c1, self.c2, self.delta0) <= 0:
            raise DimensionMismatch("c1, c2, delta0 must be positive")
        if self.epsilon < 0:
            raise DimensionMismatch("epsilon must be nonnegative")


def canonical_epsilon1(code: CssCode, epsilon: float) -> float:
    m_min = min(code.m_x, code.m_z)
    if m_min == 0:
        raise DegenerateCode("mass bounds need checks on both sides")
    return 200.0 * code.n * epsilon / m_min


@dataclass(frozen=True)
class MassBoundReport:
    energy: float
    epsilon: float
    epsilon1: float
    energy_within_budget: bool
    mass_z: float
    mass_x: float
    bound_z: float
    bound_x: float
    markov_holds: bool
    concentration_199_200: bool


def mass_bound_check(
    psi: StateVector,
    code: CssCode,
    epsilon: float,
    epsilon1: float | None = None,
) -> MassBoundReport:
    """Markov bound: D(G^{eps1}) >= 1 - eps n / (eps1 m), both bases, exactly.

    With the canonical eps1 = 200 n eps / min(m_x, m_z) the bounds reduce to
    1 - min(m)/(200 m) >= 199/200 and survive eps = 0.
    """
    h = StabilizerHamiltonian.from_code(code)
    d_z, d_x = measurement_distributions(psi)
    energy = energy_from_distributions(d_z, d_x, h)
    budget_ok = energy <= epsilon * code.n + 1e-9
    m_min = min(code.m_x, code.m_z)
    if epsilon1 is None:
        eps1 = canonical_epsilon1(code, epsilon)
        bound_z = 1.0 - m_min / (200.0 * code.m_z)
        bound_x = 1.0 - m_min / (200.0 * code.m_x)
    else:
        eps1 = epsilon1
        if eps1 <= 0:
            bound_z = bound_x = -inf if epsilon > 0 else 0.0
        else:
            bound_z = 1.0 - epsilon * code.n / (eps1 * code.m_z)
            bound_x = 1.0 - epsilon * code.n / (eps1 * code.m_x)
    mass_z = d_z.mass(enumerate_gdelta(code, "Z", eps1).members)
    mass_x = d_x.mass(enumerate_gdelta(code, "X", eps1).members)
    markov = mass_z >= bound_z - 1e-12 and mass_x >= bound_x - 1e-12
    return MassBoundReport(
        energy=energy,
        epsilon=epsilon,
        epsilon1=eps1,
        energy_within_budget=budget_ok,
        mass_z=mass_z,
        mass_x=mass_x,
        bound_z=bound_z,
        bound_x=bound_x,
        markov_holds=bool(markov),
        concentration_199_200=bool(
            mass_z >= 199 / 200 - 1e-12 and mass_x >= 199 / 200 - 1e-12
        ),
    )


@dataclass(frozen=True)
class Lemma1Report:
    epsilon1: float
    threshold: int
    hypothesis_met: bool
    max_mass_z: float
    max_mass_x: float
    dichotomy_holds: bool
    z_decomposition: ClusterDecomposition
    x_decomposition: ClusterDecomposition
    size_bound_z: dict
    size_bound_x: dict


def lemma1_check(
    psi: StateVector, code: CssCode, constants: NltsConstants
) -> Lemma1Report:
    """No-concentration dichotomy, asserted only under its hypothesis
    2 c1 eps1 <= ((k-1)/4n)^2; otherwise reported with hypothesis_met=False."""
    eps1 = (
        constants.epsilon1
        if constants.epsilon1 is not None
        else canonical_epsilon1(code, constants.epsilon)
    )
    threshold = floor(2.0 * constants.c1 * eps1 * code.n)
    hypothesis = 2.0 * constants.c1 * eps1 <= ((code.k - 1) / (4.0 * code.n)) ** 2 + 1e-15
    d_z, d_x = measurement_distributions(psi)
    g_z = enumerate_gdelta(code, "Z", eps1)
    g_x = enumerate_gdelta(code, "X", eps1)
    dec_z = cluster_decompose(g_z, code, threshold)
    dec_x = cluster_decompose(g_x, code, threshold)
    masses_z = cluster_masses(dec_z, d_z)
    masses_x = cluster_masses(dec_x, d_x)
    max_z = max(masses_z, default=0.0)
    max_x = max(masses_x, default=0.0)
    dichotomy = max_z < 99 / 100 or max_x < 99 / 100
    return Lemma1Report(
        epsilon1=eps1,
        threshold=threshold,
        hypothesis_met=bool(hypothesis),
        max_mass_z=max_z,
        max_mass_x=max_x,
        dichotomy_holds=bool(dichotomy),
        z_decomposition=dec_z,
        x_decomposition=dec_x,
        size_bound_z=cluster_size_bound_audit(dec_z, code),
        size_bound_x=cluster_size_bound_audit(dec_x, code),
    )


@dataclass(frozen=True)
class SpreadCertificate:
    cluster_indices_m: tuple[int, ...]
    cluster_indices_m_prime: tuple[int, ...]
    mass_m: float
    mass_m_prime: float
    separation: float
    depth_bound: float


def spread_certificate(
    decomp: ClusterDecomposition, dist: MeasurementDistribution
) -> SpreadCertificate:
    """Greedy split of the clustered mass into two far-apart 1/400 halves."""
    masses = cluster_masses(decomp, dist)
    total = sum(masses)
    if any(m >= 99 / 100 for m in masses):
        raise PreconditionFailed("one cluster dominates (mass >= 99/100)")
    if total < 199 / 200 - 1e-12:
        raise PreconditionFailed(f"clustered mass {total} below 199/200")
    chosen: list[int] = []
    acc = 0.0
    for i, m in enumerate(masses):
        chosen.append(i)
        acc += m
        if acc > 1 / 400:
            break
    rest = [i for i in range(len(masses)) if i not in chosen]
    mass_m = acc
    mass_m_prime = sum(masses[i] for i in rest)
    if not rest or mass_m_prime < 1 / 400 - 1e-12:
        raise PreconditionFailed("residual mass below 1/400")
    sep = min(
        (decomp.inter_hamming[a, b] for a in chosen for b in rest),
        default=inf,
    )
    bound = (
        depth_lower_bound(sep, decomp.n, 1 / 400) if sep not in (inf, 0) else -inf
    )
    return SpreadCertificate(
        tuple(chosen), tuple(rest), mass_m, mass_m_prime, float(sep), bound
    )


@dataclass(frozen=True)
class ReductionResult:
    reducer: int | None
    start_weight: int
    final_weight: int
    exhaustive: bool


def weight_reduction_search(
    x: BitVector,
    code: CssCode,
    basis: str = "X",
    budget: int = 2,
    span_cap: int = 20,
) -> ReductionResult:
    """Search the opposite stabilizer group for y with |x + y| < |x|.

    For an X-side string the group is C_z^perp (row space of H_z). Exhaustive
    over the span when its dimension allows, otherwise XORs of up to `budget`
    check rows. Absence of a reducer is a legitimate outcome.
    """
    h = code.h_z if basis == "X" else code.h_x
    rank = h.rank()
    start = x.weight()
    best_word = None
    best_weight = start
    if rank <= span_cap:
        basis_rows = [v.bits for v in h.row_space_basis()]
        for s in iter_span(basis_rows):
            w = (x.bits ^ s).bit_count()
            if w < best_weight and s != 0:
                best_weight = w
                best_word = s
        return ReductionResult(best_word, start, best_weight, True)
    from itertools import combinations

    for r in range(1, budget + 1):
        for rows in combinations(h.rows, r):
            s = 0
            for row in rows:
                s ^= row
            w = (x.bits ^ s).bit_count()
            if w < best_weight and s != 0:
                best_weight = w
                best_word = s
    return ReductionResult(best_word, start, best_weight, False)


def iterate_weight_reduction(
    x: BitVector, code: CssCode, basis: str = "X", budget: int = 2
) -> tuple[BitVector, int]:
    """Apply weight reduction until no reducer exists; returns (vector, steps)."""
    current = x
    steps = 0
    while True:
        result = weight_reduction_search(current, code, basis, budget)
        if result.reducer is None:
            return current, steps
        current = BitVector(current.n, current.bits ^ result.reducer)
        steps += 1


def claim1_constants(
    params, delta: int, x: BalancedProductComplex, code: CssCode
) -> tuple[float, float]:
    """(c1, c2) = (Delta^{3-2 lambda}/256, kappa Delta^{1/2-lambda}/16 * |V1|/n)."""
    lam = params.lambda_exp
    c1 = delta ** (3.0 - 2.0 * lam) / 256.0
    c2 = (params.kappa * delta ** (0.5 - lam) / 16.0) * (x.group.order / code.n)
    return c1, c2


@dataclass(frozen=True)
class ExceptionalVertexReport:
    vertex_count: int      # |S|
    exceptional: tuple[int, ...]
    degree_threshold: float
    violated_fraction: float
    bound_rhs: float
    bound_holds: bool


def exceptional_vertices(
    x_vec: BitVector,
    code: CssCode,
    x: BalancedProductComplex,
    pair: LocalCodePair,
    lambda_exp: float,
) -> ExceptionalVertexReport:
    """Exceptional-vertex accounting in the subgraph of the V1 face graph
    induced by an X-side string.

    A vertex is exceptional if its induced degree reaches Delta^{3/2-lambda}
    or its local view violates a check of the X-side local code. The size
    inequality |S_e| <= 256|S|/Delta^{1-2 lambda} + 2 delta m_x is evaluated
    and reported, not asserted (it is a theorem only under the robustness
    hypotheses, which toy instances do not meet).
    """
    if code.n != x.n_faces:
        raise DimensionMismatch("code and complex disagree on qubit count")
    delta_gen = x.delta
    bits = x_vec.bits
    degrees: dict[int, int] = {}
    for fid, face in enumerate(x.faces):
        if (bits >> fid) & 1:
            for v in face.corners_v1:
                degrees[v] = degrees.get(v, 0) + 1
    s_vertices = sorted(degrees)
    c1_gens = [v.bits for v in pair.c1().generator.row_space_basis()]
    exceptional = []
    deg_threshold = delta_gen ** (1.5 - lambda_exp)
    for v in s_vertices:
        view = 0
        for pos, fid in enumerate(x.v1_views[v]):
            if (bits >> fid) & 1:
                view |= 1 << pos
        violated = any(((g & view).bit_count() & 1) for g in c1_gens)
        if degrees[v] >= deg_threshold or violated:
            exceptional.append(v)
    m_x = code.m_x
    violations = sum(
        ((row & bits).bit_count() & 1) for row in code.h_x.rows
    )
    delta_frac = violations / m_x if m_x else 0.0
    rhs = 256.0 * len(s_vertices) / delta_gen ** (1.0 - 2.0 * lambda_exp) + 2.0 * delta_frac * m_x
    return ExceptionalVertexReport(
        vertex_count=len(s_vertices),
        exceptional=tuple(exceptional),
        degree_threshold=deg_threshold,
        violated_fraction=delta_frac,
        bound_rhs=rhs,
        bound_holds=bool(len(exceptional) <= rhs + 1e-12),
    )
