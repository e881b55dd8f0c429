"""The commuting frustration-free stabilizer Hamiltonian of a CSS code.

Every H_z row w contributes a term (1 - Z^w)/2 and every H_x row a term
(1 - X^w)/2, so the energy of a basis state counts violated checks. Energies
of general states are computed from the exact measurement distributions,
which reaches far beyond the dense-operator regime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .css import CssCode
from .errors import DimensionCap, DimensionMismatch
from .gf2 import BitVector
from .quantumsim import (
    MeasurementDistribution,
    StateVector,
    fwht,
    measurement_distributions,
)

DENSE_HAMILTONIAN_QUBIT_CAP = 12


@dataclass(frozen=True)
class StabilizerHamiltonian:
    """Term lists stored symbolically as (basis, support) bit masks."""

    n: int
    z_supports: tuple[int, ...]
    x_supports: tuple[int, ...]
    code: CssCode | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_code(cls, code: CssCode) -> "StabilizerHamiltonian":
        return cls(code.n, code.h_z.rows, code.h_x.rows, code)

    @classmethod
    def from_terms(
        cls, n: int, z_supports: Iterable[int], x_supports: Iterable[int]
    ) -> "StabilizerHamiltonian":
        return cls(n, tuple(z_supports), tuple(x_supports), None)

    @property
    def num_terms(self) -> int:
        return len(self.z_supports) + len(self.x_supports)

    def to_json(self) -> list[dict]:
        out = []
        for w in self.z_supports:
            out.append({"basis": "Z", "support": BitVector(self.n, w).support()})
        for w in self.x_supports:
            out.append({"basis": "X", "support": BitVector(self.n, w).support()})
        return [
            {"basis": t["basis"], "support": list(t["support"])} for t in out
        ]

    def violation_counts(self, basis: str) -> np.ndarray:
        """|H y| for every basis string y at once, via one Walsh transform.

        sum_w (-1)^{w.y} over term supports is the transform of the support
        multiplicity function, and the violation count is (m - that)/2.
        """
        key = f"viol_{basis}"
        if key not in self._cache:
            supports = self.z_supports if basis == "Z" else self.x_supports
            f = np.zeros(2**self.n)
            for w in supports:
                f[w] += 1.0
            counts = (len(supports) - fwht(f)) / 2.0
            self._cache[key] = np.rint(counts).astype(np.int64)
        return self._cache[key]


def energy_z_basis(h: StabilizerHamiltonian, y: BitVector | int) -> int:
    """Number of violated Z checks on the basis string y."""
    bits = y.bits if isinstance(y, BitVector) else y
    if isinstance(y, BitVector) and y.n != h.n:
        raise DimensionMismatch(f"state length {y.n} vs {h.n} qubits")
    return sum(((w & bits).bit_count() & 1) for w in h.z_supports)


def energy_x_basis(h: StabilizerHamiltonian, x: BitVector | int) -> int:
    bits = x.bits if isinstance(x, BitVector) else x
    if isinstance(x, BitVector) and x.n != h.n:
        raise DimensionMismatch(f"state length {x.n} vs {h.n} qubits")
    return sum(((w & bits).bit_count() & 1) for w in h.x_supports)


def energy_expectation(psi: StateVector, h: StabilizerHamiltonian) -> float:
    """tr(H psi) = E_{y~D_z}|H_z y| + E_{x~D_x}|H_x x|, exactly."""
    if psi.n != h.n:
        raise DimensionMismatch(f"state on {psi.n} qubits, terms on {h.n}")
    d_z, d_x = measurement_distributions(psi)
    return energy_from_distributions(d_z, d_x, h)


def energy_from_distributions(
    d_z: MeasurementDistribution,
    d_x: MeasurementDistribution,
    h: StabilizerHamiltonian,
) -> float:
    return float(
        d_z.probs @ h.violation_counts("Z") + d_x.probs @ h.violation_counts("X")
    )


def dense_hamiltonian(
    h: StabilizerHamiltonian, cap: int = DENSE_HAMILTONIAN_QUBIT_CAP
) -> np.ndarray:
    """2^n x 2^n matrix: diag of Z violations plus the Hadamard conjugate of
    the X violations."""
    if h.n > cap:
        raise DimensionCap(f"n = {h.n} exceeds dense cap {cap}")
    dim = 2**h.n
    mat = np.diag(h.violation_counts("Z").astype(float)).astype(complex)
    diag_x = np.diag(h.violation_counts("X").astype(float)).astype(complex)
    # conjugate by H^(x)n: unnormalized transform on both sides / 2^n
    step = np.apply_along_axis(fwht, 0, diag_x)
    step = np.apply_along_axis(fwht, 1, step)
    return mat + step / dim


def pauli_matrix(basis: str, support: int, n: int) -> np.ndarray:
    """Dense Z^w or X^w for cross-checks."""
    dim = 2**n
    idx = np.arange(dim)
    if basis == "Z":
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & support) & 1)
        return np.diag(signs).astype(complex)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[idx ^ support, idx] = 1.0
    return mat


def commuting_check(h: StabilizerHamiltonian) -> bool:
    """Symbolic pairwise commutation: X/Z term pairs need even overlap."""
    return all(
        ((wx & wz).bit_count() & 1) == 0
        for wx in h.x_supports
        for wz in h.z_supports
    )


def ground_space_dimension(h: StabilizerHamiltonian) -> int:
    """2^k from the parameter identity (requires a code-backed Hamiltonian)."""
    if h.code is None:
        raise DimensionMismatch("ground-space dimension needs a code-backed H")
    return 2**h.code.k


def ground_space_dimension_by_diagonalization(
    h: StabilizerHamiltonian,
    tol: float = 1e-9,
    cap: int = DENSE_HAMILTONIAN_QUBIT_CAP,
) -> int:
    """Exact-diagonalization cross-check: count eigenvalues within tol of 0."""
    eigs = np.linalg.eigvalsh(dense_hamiltonian(h, cap))
    return int(np.sum(np.abs(eigs) <= tol))


def ground_state(h: StabilizerHamiltonian, logical_rep: int = 0) -> StateVector:
    """A code ground state: uniform superposition over a C_x^perp coset.

    logical_rep picks the coset representative (any C_z codeword works).
    """
    if h.code is None:
        raise DimensionMismatch("ground states need a code-backed Hamiltonian")
    coset = [logical_rep ^ s for s in h.code.x_stabilizers().span()]
    return StateVector.uniform_over(h.n, coset)
