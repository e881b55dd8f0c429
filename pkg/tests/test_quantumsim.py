"""Statevector simulation, measurement distributions, uncertainty, AGSP."""

from __future__ import annotations

from math import inf, log2, sqrt

import numpy as np
import pytest

from nltslab.errors import DimensionCap, DimensionMismatch, NotNormalized
from nltslab.quantumsim import (
    AgspPolynomial,
    Gate,
    LayeredCircuit,
    StateVector,
    agsp_projector_check,
    chebyshev_agsp,
    circuit_unitary,
    depth_lower_bound,
    fact1_check,
    fact2_check,
    fwht,
    measurement_distributions,
    random_layered_circuit,
    random_state,
    set_distance,
    simulate,
)

from oracles import dense_circuit_unitary


def bell_circuit() -> LayeredCircuit:
    return LayeredCircuit(
        2, ((Gate.named("H", (0,)),), (Gate.named("CNOT", (0, 1)),))
    )


class TestSimulate:
    def test_empty_circuit(self):
        psi = simulate(LayeredCircuit(3, ()))
        assert psi.amplitudes[0] == 1.0
        assert np.count_nonzero(psi.amplitudes) == 1

    def test_single_hadamard(self):
        psi = simulate(LayeredCircuit(1, ((Gate.named("H", (0,)),),)))
        assert np.allclose(psi.amplitudes, [1 / sqrt(2), 1 / sqrt(2)])

    def test_depth3_random_vs_dense_matrix_chain_oracle(self):
        rng = np.random.default_rng(8)
        c = random_layered_circuit(8, 3, rng)
        psi = simulate(c)
        ref = dense_circuit_unitary(c, 8)[:, 0]
        assert np.max(np.abs(psi.amplitudes - ref)) < 1e-10

    def test_unitarity_preserved(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            c = random_layered_circuit(6, 4, rng)
            psi = simulate(c)
            assert abs(np.linalg.norm(psi.amplitudes) - 1.0) < 1e-12

    def test_dimension_cap(self):
        with pytest.raises(DimensionCap):
            simulate(LayeredCircuit(30, ()), cap=26)

    def test_layer_disjointness_enforced(self):
        with pytest.raises(DimensionMismatch):
            LayeredCircuit(
                2, ((Gate.named("H", (0,)), Gate.named("X", (0,))),)
            )

    def test_custom_gate_and_json_roundtrip(self):
        mat = np.array([[0, 1j], [1j, 0]])
        c = LayeredCircuit(
            2,
            (
                (Gate.custom(mat, (1,)),),
                (Gate.named("CZ", (0, 1)),),
            ),
        )
        back = LayeredCircuit.from_json(c.to_json())
        assert np.allclose(
            simulate(c).amplitudes, simulate(back).amplitudes
        )

    def test_non_unitary_custom_rejected(self):
        with pytest.raises(DimensionMismatch):
            Gate.custom(np.array([[1, 0], [0, 2]]), (0,))


class TestDistributions:
    def test_zero_state(self):
        d_z, d_x = measurement_distributions(StateVector.computational_zero(4))
        assert d_z.probs[0] == 1.0
        assert np.allclose(d_x.probs, 1 / 16)

    def test_plus_state(self):
        plus = LayeredCircuit(
            3, (tuple(Gate.named("H", (q,)) for q in range(3)),)
        )
        d_z, d_x = measurement_distributions(simulate(plus))
        assert np.allclose(d_z.probs, 1 / 8)
        assert d_x.probs[0] == pytest.approx(1.0)

    def test_bell_state_hand_oracle(self):
        # (|00> + |11>)/sqrt2: both bases put mass 1/2 on {00, 11}
        d_z, d_x = measurement_distributions(simulate(bell_circuit()))
        assert np.allclose(d_z.probs, [0.5, 0, 0, 0.5])
        assert np.allclose(d_x.probs, [0.5, 0, 0, 0.5])

    def test_parseval(self):
        rng = np.random.default_rng(10)
        for n in (2, 5, 8):
            d_z, d_x = measurement_distributions(random_state(n, rng))
            assert abs(d_z.probs.sum() - 1) < 1e-9
            assert abs(d_x.probs.sum() - 1) < 1e-9

    def test_fwht_linearity_against_direct_sum(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=16)
        f = fwht(a)
        for y in range(16):
            direct = sum(
                a[x] * (-1) ** bin(x & y).count("1") for x in range(16)
            )
            assert abs(f[y] - direct) < 1e-9


class TestFact1:
    def test_point_mass_trivial(self):
        psi = StateVector.computational_zero(4)
        rep = fact1_check(psi, {0}, set(range(5)))
        assert rep.holds
        assert rep.lhs == pytest.approx(5 / 16)  # uniform D_x on any 5 strings

    def test_full_sets_trivial(self):
        rng = np.random.default_rng(12)
        psi = random_state(4, rng)
        rep = fact1_check(psi, set(range(16)), set(range(16)))
        assert rep.term_counting == pytest.approx(4.0)
        assert rep.holds

    def test_randomized_trials_never_violate(self):
        rng = np.random.default_rng(13)
        min_slack = inf
        for _ in range(300):
            n = int(rng.integers(2, 8))
            psi = random_state(n, rng)
            size_s = int(rng.integers(1, 2**n + 1))
            size_t = int(rng.integers(1, 2**n + 1))
            s = set(map(int, rng.choice(2**n, size=size_s, replace=False)))
            t = set(map(int, rng.choice(2**n, size=size_t, replace=False)))
            rep = fact1_check(psi, s, t)
            assert rep.holds
            min_slack = min(min_slack, rep.slack)
        assert min_slack >= 0

    def test_collision_probability_bound(self):
        # support exactly on S forces sum_x D_x(x)^2 <= |S|/2^n
        rng = np.random.default_rng(14)
        for _ in range(50):
            n = int(rng.integers(2, 8))
            size_s = int(rng.integers(1, 2**n + 1))
            s = sorted(map(int, rng.choice(2**n, size=size_s, replace=False)))
            amp = np.zeros(2**n, dtype=complex)
            amp[s] = rng.normal(size=size_s) + 1j * rng.normal(size=size_s)
            amp /= np.linalg.norm(amp)
            _, d_x = measurement_distributions(StateVector(n, amp))
            assert d_x.collision_probability() <= size_s / 2**n + 1e-12


class TestLightcone:
    def test_size_bound(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            c = random_layered_circuit(8, 3, rng)
            for q in range(8):
                assert len(c.lightcone(q)) <= 2**c.depth

    def test_gate_deletion_preserves_marginal(self):
        rng = np.random.default_rng(16)
        for _ in range(10):
            c = random_layered_circuit(7, 2, rng)
            q = int(rng.integers(0, 7))
            full = measurement_distributions(simulate(c))[0].marginal_one(q)
            pruned = c.gates_outside_cone(q)
            small = measurement_distributions(simulate(pruned))[0].marginal_one(q)
            assert abs(full - small) < 1e-10


class TestAgsp:
    def test_p0_exact_and_bounded_on_interval(self):
        for m, f in [(2, 3), (8, 5), (64, 64)]:
            poly = chebyshev_agsp(m, f)
            assert poly.evaluate(0.0) == 1.0
            xs = np.linspace(1 / m, 1, 50)
            assert np.all(np.abs(poly.evaluate(xs)) <= 1.0 + 1e-12)

    def test_m1_direct_recurrence_oracle(self):
        # T-recurrence limit at a degenerate interval is (1-x)^f
        poly = chebyshev_agsp(1, 6)
        assert poly.evaluate(1.0) == 0.0
        assert abs(poly.evaluate(1.0)) <= np.exp(-(6**2) / 100)
        assert poly.evaluate(0.5) == pytest.approx(0.5**6)

    def test_m16_f16_vs_mpmath_oracle(self):
        import mpmath as mp

        poly = chebyshev_agsp(16, 16)
        with mp.workdps(50):
            lo = mp.mpf(1) / 16
            mu = lambda x: (2 * x - lo - 1) / (1 - lo)
            denom = mp.chebyt(16, mu(mp.mpf(0)))
            for i in range(1, 17):
                x = mp.mpf(i) / 16
                exact = mp.chebyt(16, mu(x)) / denom
                ours = poly.evaluate(float(x))
                assert abs(ours - float(exact)) < 1e-12
                assert abs(exact) <= mp.exp(-mp.mpf(16**2) / (100 * 16))

    def test_envelope_full_grid_small(self):
        for m in (1, 2, 5, 16):
            for f in (1, 3, 16):
                rep = chebyshev_agsp(m, f).envelope_report()
                assert rep.ok

    def test_chebyshev_coefficient_representation(self):
        poly = chebyshev_agsp(8, 5)
        cheb = poly.chebyshev_coefficients()
        xs = np.linspace(0, 1, 23)
        assert np.allclose(cheb(xs), poly.evaluate(xs), atol=1e-9)
        poly1 = chebyshev_agsp(1, 4)
        cheb1 = poly1.chebyshev_coefficients()
        assert np.allclose(cheb1(xs), (1 - xs) ** 4, atol=1e-9)


class TestAgspProjector:
    def test_identity_circuit_diagonal(self):
        rep = agsp_projector_check(LayeredCircuit(4, ()), f=4)
        assert rep.spectrum_on_grid
        assert rep.holds

    def test_hadamard_layer(self):
        c = LayeredCircuit(4, (tuple(Gate.named("H", (q,)) for q in range(4)),))
        rep = agsp_projector_check(c, f=6)
        assert rep.spectrum_on_grid and rep.holds

    def test_random_depth2(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            c = random_layered_circuit(6, 2, rng)
            rep = agsp_projector_check(c, f=int(rng.integers(2, 12)))
            assert rep.spectrum_on_grid and rep.holds

    def test_cap(self):
        with pytest.raises(DimensionCap):
            agsp_projector_check(LayeredCircuit(11, ()), f=2)


class TestDepthBound:
    def test_vacuous_case(self):
        assert depth_lower_bound(100, 100, 1 / 400) <= 0

    def test_worked_case_direct_arithmetic(self):
        # independent arithmetic: (1/3) log2(1e12 / (400e6 log2 400))
        expected = log2(1e12 / (400e6 * log2(400))) / 3
        got = depth_lower_bound(1e6, 10**6, 1 / 400)
        assert got == pytest.approx(expected)
        assert abs(got - 2.7) < 0.1

    def test_mu_domain(self):
        with pytest.raises(DimensionMismatch):
            depth_lower_bound(10, 10, 1.5)

    def test_set_distance(self):
        assert set_distance({0b000}, {0b111}) == 3
        assert set_distance({1, 2}, {2}) == 0
        assert set_distance(set(), {1}) == inf


class TestFact2:
    def test_bell_pair(self):
        rep = fact2_check(bell_circuit(), {0b00}, {0b11})
        assert rep.distance == 2
        assert rep.overlap == pytest.approx(0.5)
        assert rep.passes

    def test_sampled_circuits_no_counterexamples(self):
        rng = np.random.default_rng(18)
        for _ in range(100):
            n = int(rng.integers(2, 8))
            t = int(rng.integers(0, 4))
            c = random_layered_circuit(n, t, rng)
            s1 = set(map(int, rng.choice(2**n, size=rng.integers(1, 2**n // 2 + 1), replace=False)))
            s2 = set(map(int, rng.choice(2**n, size=rng.integers(1, 2**n // 2 + 1), replace=False)))
            rep = fact2_check(c, s1, s2)
            assert rep.passes
