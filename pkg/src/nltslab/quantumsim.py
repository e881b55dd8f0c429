"""Exact statevector simulation of layered circuits, the Z/X measurement
distributions, the measurement-uncertainty inequality, and the Chebyshev
amplification machinery behind the circuit-depth lower bound.

Basis convention: computational index b encodes qubit q as bit q (LSB first),
so numpy axis n-1-q addresses qubit q once a state is reshaped to (2,)*n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import inf, log2, sqrt
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionCap,
    DimensionMismatch,
    EnvelopeFailure,
    NotNormalized,
)

STATEVECTOR_QUBIT_CAP = 26
DENSE_OPERATOR_QUBIT_CAP = 10
NORM_TOL = 1e-12
DIST_TOL = 1e-9

_SQ2 = 1.0 / np.sqrt(2.0)
GATE_MATRICES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}
GATE_MATRICES["CX"] = GATE_MATRICES["CNOT"]


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    matrix: np.ndarray

    @classmethod
    def named(cls, name: str, qubits: Sequence[int]) -> "Gate":
        if name not in GATE_MATRICES:
            raise DimensionMismatch(f"unknown gate {name!r}")
        mat = GATE_MATRICES[name]
        if mat.shape[0] != 2 ** len(qubits):
            raise DimensionMismatch(
                f"gate {name} acts on {int(np.log2(mat.shape[0]))} qubits, got {len(qubits)}"
            )
        return cls(name, tuple(qubits), mat)

    @classmethod
    def custom(cls, matrix, qubits: Sequence[int], name: str = "U") -> "Gate":
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (2 ** len(qubits),) * 2:
            raise DimensionMismatch(f"matrix shape {mat.shape} vs {len(qubits)} qubits")
        if not np.allclose(mat @ mat.conj().T, np.eye(mat.shape[0]), atol=1e-10):
            raise DimensionMismatch("custom gate matrix is not unitary")
        return cls(name, tuple(qubits), mat)


@dataclass(frozen=True)
class LayeredCircuit:
    """Gates grouped into layers; gates within a layer act on disjoint qubits."""

    n: int
    layers: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        for layer in self.layers:
            used: set[int] = set()
            for gate in layer:
                for q in gate.qubits:
                    if not 0 <= q < self.n:
                        raise DimensionMismatch(f"qubit {q} outside 0..{self.n - 1}")
                    if q in used:
                        raise DimensionMismatch(
                            f"qubit {q} used twice within one layer"
                        )
                    used.add(q)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def lightcone(self, q: int) -> set[int]:
        """Input qubits that can influence output qubit q (size <= 2^depth)."""
        cone = {q}
        for layer in reversed(self.layers):
            for gate in layer:
                if cone & set(gate.qubits):
                    cone |= set(gate.qubits)
        return cone

    def gates_outside_cone(self, q: int) -> "LayeredCircuit":
        """The circuit with every gate outside q's lightcone deleted."""
        cone = {q}
        kept_layers = []
        for layer in reversed(self.layers):
            kept = []
            for gate in layer:
                if cone & set(gate.qubits):
                    cone |= set(gate.qubits)
                    kept.append(gate)
            kept_layers.append(tuple(kept))
        return LayeredCircuit(self.n, tuple(reversed(kept_layers)))

    def to_json(self) -> dict:
        layers = []
        for layer in self.layers:
            out = []
            for g in layer:
                entry: dict = {"gate": g.name, "q": list(g.qubits)}
                if g.name not in GATE_MATRICES:
                    entry["matrix"] = [
                        [[z.real, z.imag] for z in row] for row in g.matrix
                    ]
                out.append(entry)
            layers.append(out)
        return {"n": self.n, "layers": layers}

    @classmethod
    def from_json(cls, spec: dict | str) -> "LayeredCircuit":
        if isinstance(spec, str):
            spec = json.loads(spec)
        layers = []
        for layer in spec["layers"]:
            gates = []
            for entry in layer:
                if "matrix" in entry:
                    mat = np.array(
                        [[complex(re, im) for re, im in row] for row in entry["matrix"]]
                    )
                    gates.append(Gate.custom(mat, entry["q"], entry.get("gate", "U")))
                else:
                    gates.append(Gate.named(entry["gate"], entry["q"]))
            layers.append(tuple(gates))
        return cls(int(spec["n"]), tuple(layers))


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (2**self.n,):
            raise DimensionMismatch(
                f"expected {2**self.n} amplitudes, got {self.amplitudes.shape}"
            )
        norm = float(np.linalg.norm(self.amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"norm {norm} is not 1")

    @classmethod
    def computational_zero(cls, n: int) -> "StateVector":
        amp = np.zeros(2**n, dtype=complex)
        amp[0] = 1.0
        return cls(n, amp)

    @classmethod
    def basis_state(cls, n: int, index: int) -> "StateVector":
        amp = np.zeros(2**n, dtype=complex)
        amp[index] = 1.0
        return cls(n, amp)

    @classmethod
    def uniform_over(cls, n: int, indices: Iterable[int]) -> "StateVector":
        idx = sorted(set(indices))
        amp = np.zeros(2**n, dtype=complex)
        amp[idx] = 1.0 / sqrt(len(idx))
        return cls(n, amp)


def _apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply a gate to a (2,)*n (+ trailing batch axes) tensor."""
    k = len(gate.qubits)
    axes = [n - 1 - q for q in gate.qubits]
    moved = np.moveaxis(psi, axes, range(k))
    rest = moved.shape[k:]
    flat = moved.reshape(2**k, -1)
    flat = gate.matrix @ flat
    return np.moveaxis(flat.reshape((2,) * k + rest), range(k), axes)


def simulate(
    circuit: LayeredCircuit, cap: int = STATEVECTOR_QUBIT_CAP
) -> StateVector:
    """Exact statevector of circuit |0...0>."""
    if circuit.n > cap:
        raise DimensionCap(f"n = {circuit.n} exceeds statevector cap {cap}")
    psi = np.zeros((2,) * circuit.n, dtype=complex)
    psi[(0,) * circuit.n] = 1.0
    for layer in circuit.layers:
        for gate in layer:
            psi = _apply_gate(psi, gate, circuit.n)
    return StateVector(circuit.n, psi.reshape(-1))


def circuit_unitary(
    circuit: LayeredCircuit, cap: int = DENSE_OPERATOR_QUBIT_CAP
) -> np.ndarray:
    """Dense 2^n x 2^n unitary of the circuit (memory-gated)."""
    if circuit.n > cap:
        raise DimensionCap(f"n = {circuit.n} exceeds dense-operator cap {cap}")
    dim = 2**circuit.n
    u = np.eye(dim, dtype=complex).reshape((2,) * circuit.n + (dim,))
    for layer in circuit.layers:
        for gate in layer:
            u = _apply_gate(u, gate, circuit.n)
    return u.reshape(dim, dim)


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, F[y] = sum_x (-1)^{x.y} a[x]."""
    a = np.array(a)
    n = len(a)
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0, :] + a[:, 1, :], a[:, 0, :] - a[:, 1, :]), axis=1)
        h *= 2
    return a.reshape(-1)


@dataclass(frozen=True)
class MeasurementDistribution:
    basis: str  # "Z" | "X"
    n: int
    probs: np.ndarray

    def __post_init__(self):
        total = float(self.probs.sum())
        if abs(total - 1.0) > DIST_TOL:
            raise NotNormalized(f"{self.basis} distribution sums to {total}")

    def mass(self, indices: Iterable[int]) -> float:
        idx = np.fromiter(set(indices), dtype=np.int64)
        if idx.size == 0:
            return 0.0
        return float(self.probs[idx].sum())

    def collision_probability(self) -> float:
        return float(np.sum(self.probs**2))

    def marginal_one(self, q: int) -> float:
        """Probability that qubit q measures 1."""
        idx = np.arange(2**self.n, dtype=np.int64)
        return float(self.probs[(idx >> q) & 1 == 1].sum())


def measurement_distributions(
    psi: StateVector,
) -> tuple[MeasurementDistribution, MeasurementDistribution]:
    """(D_z, D_x): standard-basis and Hadamard-basis outcome distributions."""
    d_z = np.abs(psi.amplitudes) ** 2
    had = fwht(psi.amplitudes) / sqrt(2**psi.n)
    d_x = np.abs(had) ** 2
    return (
        MeasurementDistribution("Z", psi.n, d_z),
        MeasurementDistribution("X", psi.n, d_x),
    )


@dataclass(frozen=True)
class Fact1Report:
    lhs: float          # D_x(T)
    mass_z: float       # D_z(S)
    term_gentle: float  # 2 sqrt(1 - D_z(S))
    term_counting: float  # sqrt(|S||T|/2^n)
    rhs: float
    slack: float
    holds: bool


def fact1_check(
    psi: StateVector, s: Iterable[int], t: Iterable[int]
) -> Fact1Report:
    """Uncertainty inequality D_x(T) <= 2 sqrt(1 - D_z(S)) + sqrt(|S||T|/2^n)."""
    s_idx = set(s)
    t_idx = set(t)
    d_z, d_x = measurement_distributions(psi)
    lhs = d_x.mass(t_idx)
    mass_z = d_z.mass(s_idx)
    term_gentle = 2.0 * sqrt(max(0.0, 1.0 - mass_z))
    term_counting = sqrt(len(s_idx) * len(t_idx) / 2**psi.n)
    rhs = term_gentle + term_counting
    slack = rhs - lhs
    return Fact1Report(
        lhs, mass_z, term_gentle, term_counting, rhs, slack, slack >= -1e-12
    )


def random_layered_circuit(
    n: int,
    depth: int,
    rng: np.random.Generator,
    two_qubit_fraction: float = 0.5,
    gate_pool: Sequence[str] = ("H", "T", "X", "Z", "S"),
) -> LayeredCircuit:
    """Seeded random circuit: disjoint random pairings per layer."""
    layers = []
    for _ in range(depth):
        perm = rng.permutation(n)
        gates = []
        i = 0
        while i < n:
            if i + 1 < n and rng.random() < two_qubit_fraction:
                kind = "CNOT" if rng.random() < 0.5 else "CZ"
                gates.append(Gate.named(kind, (int(perm[i]), int(perm[i + 1]))))
                i += 2
            else:
                name = gate_pool[int(rng.integers(0, len(gate_pool)))]
                gates.append(Gate.named(name, (int(perm[i]),)))
                i += 1
        layers.append(tuple(gates))
    return LayeredCircuit(n, tuple(layers))


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    amp = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amp /= np.linalg.norm(amp)
    return StateVector(n, amp)


def _chebyshev_t(f: int, t):
    """T_f(t) on longdouble scalars/arrays via the stable closed forms."""
    t = np.asarray(t, dtype=np.longdouble)
    out = np.empty_like(t)
    inside = np.abs(t) <= 1.0
    above = t > 1.0
    below = t < -1.0
    out[inside] = np.cos(f * np.arccos(t[inside]))
    out[above] = np.cosh(f * np.arccosh(t[above]))
    sign = np.longdouble(-1.0 if f % 2 else 1.0)
    out[below] = sign * np.cosh(f * np.arccosh(-t[below]))
    return out


@dataclass(frozen=True)
class AgspEnvelopeReport:
    max_abs_value: float
    envelope: float
    worst_point: float
    ok: bool


@dataclass(frozen=True)
class AgspPolynomial:
    """Degree-f Chebyshev amplification polynomial for spectrum {0, 1/m, ..., 1}.

    P = T_f composed with the affine map sending [1/m, 1] onto [-1, 1],
    normalized so P(0) = 1 exactly; for m = 1 the interval degenerates and the
    construction's limit (1 - x)^f is used.
    """

    m: int
    f: int
    _denominator: np.longdouble = field(init=False, repr=False)

    def __post_init__(self):
        if self.m == 1:
            denom = np.longdouble(1.0)
        else:
            # same code path as evaluate_extended, so P(0) divides to exactly 1
            denom = _chebyshev_t(self.f, self._mu(0.0))
            if not np.isfinite(denom):
                raise EnvelopeFailure(
                    f"normalization overflowed for m={self.m}, f={self.f}"
                )
        object.__setattr__(self, "_denominator", denom)

    def _mu(self, x):
        lo = np.longdouble(1.0) / self.m
        return (2.0 * np.asarray(x, dtype=np.longdouble) - lo - 1.0) / (1.0 - lo)

    def evaluate_extended(self, x):
        """Evaluation in extended (longdouble) precision."""
        x = np.asarray(x, dtype=np.longdouble)
        if self.m == 1:
            return (1.0 - x) ** self.f
        return _chebyshev_t(self.f, self._mu(x)) / self._denominator

    def evaluate(self, x) -> float | np.ndarray:
        res = self.evaluate_extended(x)
        if np.isscalar(x) or np.asarray(x).ndim == 0:
            return float(res)
        return res.astype(np.float64)

    def chebyshev_coefficients(self) -> np.polynomial.chebyshev.Chebyshev:
        """Chebyshev-basis representation (numpy Chebyshev object)."""
        from numpy.polynomial import chebyshev as C
        from numpy.polynomial import polynomial as P

        if self.m == 1:
            # (1 - x)^f in the power basis, converted
            from math import comb

            coefs = [comb(self.f, j) * (-1.0) ** j for j in range(self.f + 1)]
            return P.Polynomial(coefs).convert(kind=C.Chebyshev)
        coef = np.zeros(self.f + 1)
        coef[self.f] = float(1.0 / self._denominator)
        return C.Chebyshev(coef, domain=[1.0 / self.m, 1.0])

    def envelope_report(self) -> AgspEnvelopeReport:
        """Pointwise |P(i/m)| <= exp(-f^2/100m) audit in extended precision."""
        pts = np.arange(1, self.m + 1, dtype=np.longdouble) / self.m
        vals = np.abs(self.evaluate_extended(pts))
        envelope = np.exp(np.longdouble(-self.f * self.f) / (100.0 * self.m))
        worst = int(np.argmax(vals - envelope))
        return AgspEnvelopeReport(
            max_abs_value=float(vals[worst]),
            envelope=float(envelope),
            worst_point=float(pts[worst]),
            ok=bool(np.all(vals <= envelope)),
        )


def chebyshev_agsp(m: int, f: int) -> AgspPolynomial:
    """Build the amplification polynomial and verify its envelope numerically."""
    if not 1 <= m:
        raise DimensionMismatch("m must be >= 1")
    if not 1 <= f:
        raise DimensionMismatch("degree f must be >= 1")
    poly = AgspPolynomial(m, f)
    if poly.evaluate(0.0) != 1.0:
        raise EnvelopeFailure("P(0) != 1 after normalization")
    report = poly.envelope_report()
    if not report.ok:
        raise EnvelopeFailure(
            f"envelope exceeded at x={report.worst_point}: "
            f"|P| = {report.max_abs_value} > {report.envelope}"
        )
    return poly


@dataclass(frozen=True)
class AgspProjectorReport:
    n: int
    depth: int
    f: int
    spectrum_on_grid: bool
    operator_norm: float
    bound: float
    holds: bool


def agsp_projector_check(
    circuit: LayeredCircuit, f: int, cap: int = DENSE_OPERATOR_QUBIT_CAP
) -> AgspProjectorReport:
    """Dense audit of the approximate ground-state projector bound.

    G = E_i U |1><1|_i U-dagger has spectrum {0, 1/n, ..., 1} with unique
    ground state U|0^n>; P(G) built from the amplification polynomial must be
    exp(-f^2/(100 2^t n))-close to that ground-state projector in operator
    norm. Ancilla-free circuits only (m = n).
    """
    n = circuit.n
    if n > cap:
        raise DimensionCap(f"n = {n} exceeds dense-operator cap {cap}")
    u = circuit_unitary(circuit, cap)
    dim = 2**n
    weights = np.array([bin(b).count("1") for b in range(dim)], dtype=float) / n
    g = (u * weights) @ u.conj().T
    eigs, vecs = np.linalg.eigh(g)
    snapped = np.round(eigs * n) / n
    spectrum_ok = bool(
        np.all(np.abs(eigs - snapped) <= 1e-9)
        and np.all(snapped >= -1e-12)
        and np.all(snapped <= 1 + 1e-12)
    )
    poly = chebyshev_agsp(n, f)
    p_of_g = (vecs * poly.evaluate(np.clip(snapped, 0.0, 1.0))) @ vecs.conj().T
    rho = u[:, 0]
    diff = np.outer(rho, rho.conj()) - p_of_g
    op_norm = float(np.max(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))
    bound = float(np.exp(-(f**2) / (100.0 * (2**circuit.depth) * n)))
    return AgspProjectorReport(
        n=n,
        depth=circuit.depth,
        f=f,
        spectrum_on_grid=spectrum_ok,
        operator_norm=op_norm,
        bound=bound,
        holds=bool(op_norm <= bound + 1e-9),
    )


def depth_lower_bound(u: float, n: int, mu: float) -> float:
    """(1/3) log2(u^2 / (400 n log2(1/mu))); may be <= 0 (vacuous)."""
    if not 0 < mu < 1:
        raise DimensionMismatch(f"mu must lie in (0,1), got {mu}")
    if u <= 0:
        return -inf
    denom = 400.0 * n * log2(1.0 / mu)
    return log2(u * u / denom) / 3.0


def set_distance(s1: Iterable[int], s2: Iterable[int]) -> float:
    """Minimum Hamming distance between two sets of basis strings."""
    a = np.fromiter(set(s1), dtype=np.uint64)
    b = np.fromiter(set(s2), dtype=np.uint64)
    if a.size == 0 or b.size == 0:
        return inf
    xo = a[:, None] ^ b[None, :]
    return float(np.bitwise_count(xo).min())


@dataclass(frozen=True)
class Fact2Report:
    depth: int
    distance: float
    p1: float
    p2: float
    overlap: float          # sqrt(p1 p2) = |Pi_S1 |rho><rho| Pi_S2|_inf
    central_bound: float    # exp(-u^2 / (400 8^t n))
    central_holds: bool
    mu: float
    depth_bound: float
    rearranged_holds: bool
    passes: bool


def fact2_check(
    circuit: LayeredCircuit, s1: Iterable[int], s2: Iterable[int]
) -> Fact2Report:
    """Audit the well-spread depth bound on a concrete circuit.

    Central inequality: sqrt(p(S1) p(S2)) <= exp(-u^2/(400 8^t n)); the
    rearranged form t >= depth_lower_bound(u, n, mu) is audited alongside.
    A theorem: valid inputs can never report passes=False.
    """
    psi = simulate(circuit)
    d_z, _ = measurement_distributions(psi)
    s1 = set(s1)
    s2 = set(s2)
    p1 = d_z.mass(s1)
    p2 = d_z.mass(s2)
    u = set_distance(s1, s2)
    t = circuit.depth
    overlap = sqrt(p1 * p2)
    central_bound = float(
        np.exp(-(u**2) / (400.0 * (8.0**t) * circuit.n))
    ) if u != inf else 1.0
    central_holds = overlap <= central_bound + 1e-12
    mu = min(p1, p2)
    if 0 < mu < 1:
        bound = depth_lower_bound(u if u != inf else 0, circuit.n, mu)
        rearranged = t >= bound
    else:
        bound = -inf
        rearranged = True
    return Fact2Report(
        depth=t,
        distance=u,
        p1=p1,
        p2=p2,
        overlap=overlap,
        central_bound=central_bound,
        central_holds=central_holds,
        mu=mu,
        depth_bound=bound,
        rearranged_holds=rearranged,
        passes=central_holds or rearranged,
    )
