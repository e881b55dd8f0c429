"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

from __future__ import annotations

import time
from itertools import permutations
from math import comb, inf, log2

import numpy as np
import pytest

from nltslab.classical_codes import LocalCodePair, full_code, repetition_code
from nltslab.clustering import (
    NltsConstants,
    binomial_bound_audit,
    cluster_decompose,
    cluster_size_bound_audit,
    enumerate_gdelta,
    lemma1_check,
    mass_bound_check,
    xor_closure_audit,
    _pairwise_coset_distances,
    _stabilizer_family,
)
from nltslab.css import css_distance, quantum_tanner, steane_code
from nltslab.groups_graphs import (
    BipartiteGraph,
    FiniteGroup,
    GeneratorSet,
    build_balanced_product,
    small_set_expansion_check,
)
from nltslab.gf2 import BitVector, is_orthogonal
from nltslab.hamiltonian import (
    StabilizerHamiltonian,
    commuting_check,
    dense_hamiltonian,
    energy_expectation,
    ground_space_dimension,
    ground_space_dimension_by_diagonalization,
)
from nltslab.harness import ExperimentConfig, emit, nlts_epsilon, run_pipeline
from nltslab.quantumsim import (
    agsp_projector_check,
    chebyshev_agsp,
    depth_lower_bound,
    fact1_check,
    fact2_check,
    measurement_distributions,
    random_layered_circuit,
    random_state,
    simulate,
)

CONFIG_DIR = __import__("pathlib").Path(__file__).parent.parent / "configs"


def _passline(num: int, name: str):
    print(f"[acceptance {num:>2}] {name}: PASS")


def _s3_index(p):
    return sorted(permutations(range(3))).index(p)


def tanner_fixtures():
    """(label, complex, pair) for the small-group grid; built fresh each call."""
    z6 = build_balanced_product(
        FiniteGroup.cyclic(6), GeneratorSet((1, 5), "right"), GeneratorSet((2, 4), "left")
    )
    z5 = build_balanced_product(
        FiniteGroup.cyclic(5), GeneratorSet((1, 4), "right"), GeneratorSet((2, 3), "left")
    )
    s3 = build_balanced_product(
        FiniteGroup.symmetric(3),
        GeneratorSet((_s3_index((1, 2, 0)), _s3_index((2, 0, 1))), "right"),
        GeneratorSet((_s3_index((1, 0, 2)), _s3_index((0, 2, 1))), "left"),
    )
    d4 = build_balanced_product(
        FiniteGroup.dihedral(4), GeneratorSet((4, 5, 6), "right"), GeneratorSet((1, 3, 2), "left")
    )
    rep2, full2 = repetition_code(2), full_code(2)
    rep3 = repetition_code(3)
    from nltslab.classical_codes import parity_code

    par3 = parity_code(3)
    return [
        ("z6/rep,rep", z6, LocalCodePair(rep2, rep2)),
        ("z6/rep,full", z6, LocalCodePair(rep2, full2)),
        ("z5/rep,rep", z5, LocalCodePair(rep2, rep2)),
        ("z5/full,full", z5, LocalCodePair(full2, full2)),
        ("s3/rep,rep", s3, LocalCodePair(rep2, rep2)),
        ("s3/rep,full", s3, LocalCodePair(rep2, full2)),
        ("d4/rep3,rep3", d4, LocalCodePair(rep3, rep3)),
        ("d4/par3,rep3", d4, LocalCodePair(par3, rep3)),
    ]


@pytest.fixture(scope="module")
def small_codes():
    """Steane plus every Tanner fixture with n <= 20 and k >= 1."""
    codes = [("steane", steane_code())]
    for label, x, pair in tanner_fixtures():
        code = quantum_tanner(x, pair)
        if code.n <= 20 and code.k >= 1 and code.m_x and code.m_z:
            codes.append((label, code))
    return codes


def test_criterion_01_css_validity():
    """H_x H_z^T = 0 and n = k + r_x + r_z on every fixture, < 1 s each."""
    fixtures = tanner_fixtures()
    groups = {label.split("/")[0] for label, _, _ in fixtures}
    pairs = {label.split("/")[1] for label, _, _ in fixtures}
    assert len(groups) >= 3 and len(pairs) >= 2
    for label, x, pair in fixtures:
        t0 = time.perf_counter()
        code = quantum_tanner(x, pair)
        assert is_orthogonal(code.h_x, code.h_z), label
        assert code.n == code.k + code.r_x + code.r_z, label
        assert time.perf_counter() - t0 < 1.0, f"{label} exceeded 1 s"
    _passline(1, "CSS validity (orthogonality + parameter identity)")


def test_criterion_02_hamiltonian_ground_space():
    """Commutation and ground-space dimension 2^k by exact diagonalization."""
    t0 = time.perf_counter()
    checked = []
    for label, x, pair in [("steane", None, None)] + [
        (l, x, p) for l, x, p in tanner_fixtures() if l == "z5/rep,rep"
    ]:
        code = steane_code() if label == "steane" else quantum_tanner(x, pair)
        h = StabilizerHamiltonian.from_code(code)
        assert commuting_check(h), label
        assert code.n <= 12
        expected = ground_space_dimension(h)
        assert expected == 2**code.k
        assert ground_space_dimension_by_diagonalization(h, tol=1e-9) == expected
        checked.append(label)
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0, f"diagonalization took {elapsed:.1f} s"
    assert len(checked) == 2
    _passline(2, f"Hamiltonian ground space = 2^k on {checked} in {elapsed:.1f} s")


def test_criterion_03_energy_identity():
    """tr(H psi) equals the distribution-side energy within 1e-9, 100 states."""
    code = steane_code()
    h = StabilizerHamiltonian.from_code(code)
    dense = dense_hamiltonian(h)
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(100):
        depth = int(rng.integers(0, 4))
        psi = simulate(random_layered_circuit(7, depth, rng))
        via_dist = energy_expectation(psi, h)
        via_dense = float(np.real(psi.amplitudes.conj() @ dense @ psi.amplitudes))
        worst = max(worst, abs(via_dist - via_dense))
    assert worst <= 1e-9, f"worst deviation {worst}"
    _passline(3, f"energy identity, worst deviation {worst:.2e}")


def test_criterion_04_markov_mass_bound():
    """D(G^{eps1}) >= 1 - eps n/(eps1 m): zero violations over 100 trials."""
    code = steane_code()
    h = StabilizerHamiltonian.from_code(code)
    rng = np.random.default_rng(404)
    violations = 0
    for _ in range(100):
        depth = int(rng.integers(0, 4))
        psi = simulate(random_layered_circuit(7, depth, rng))
        eps = energy_expectation(psi, h) / code.n
        rep = mass_bound_check(psi, code, eps)
        assert rep.energy_within_budget
        violations += not rep.markov_holds
        violations += not rep.concentration_199_200
    assert violations == 0
    _passline(4, "Markov mass bound, 100 trials, zero violations")


def test_criterion_05_cluster_structure(small_codes):
    """delta = 0, threshold 0: exactly 2^k clusters at inter-distance d.

    Per basis the inter-cluster distance equals that side's distance (d_z for
    Z, d_x for X); d = min of the two.
    """
    for label, code in small_codes:
        d_x, d_z, d = css_distance(code)
        for basis, expected in (("Z", d_z), ("X", d_x)):
            gset = enumerate_gdelta(code, basis, 0.0)
            dec = cluster_decompose(gset, code, 0)
            assert dec.cluster_count == 2**code.k, label
            assert dec.min_inter_hamming == expected, label
        assert min(d_x, d_z) == d
    _passline(5, f"cluster structure on {[l for l, _ in small_codes]}")


def test_criterion_06_xor_closure_and_triangle(small_codes):
    """Full-enumeration XOR-closure and triangle-inequality audits (n <= 20)."""
    deltas = {"steane": (0.0, 1 / 3)}
    for label, code in small_codes:
        for delta in deltas.get(label, (0.0,)):
            for basis in ("Z", "X"):
                gset = enumerate_gdelta(code, basis, delta)
                assert gset.exhaustive
                assert xor_closure_audit(gset, code) == [], (label, delta, basis)
                members = list(gset.members)
                fam = _stabilizer_family(code, basis)
                dmat = _pairwise_coset_distances(members, fam, code.n)
                for k in range(len(members)):
                    lhs = dmat
                    rhs = dmat[:, k : k + 1] + dmat[k : k + 1, :]
                    assert np.all(lhs <= rhs), (label, delta, basis)
    _passline(6, "XOR-closure and triangle inequality, zero violations")


def test_criterion_07_cluster_size_and_binomial_bounds(small_codes):
    """Size bound on every enumerated decomposition; binomial grid to n = 26."""
    audited = 0
    for label, code in small_codes:
        for basis in ("Z", "X"):
            for delta, threshold in ((0.0, 0), (1 / 3, 0)):
                gset = enumerate_gdelta(code, basis, delta)
                dec = cluster_decompose(gset, code, threshold)
                audit = cluster_size_bound_audit(dec, code)
                assert audit["holds"], (label, basis, delta)
                audited += 1
    rng = np.random.default_rng(707)
    code = steane_code()
    h = StabilizerHamiltonian.from_code(code)
    consts = lambda eps: NltsConstants(
        c1=1.0, c2=3 / 7, delta0=0.34, epsilon=eps
    )
    for _ in range(10):
        psi = simulate(random_layered_circuit(7, int(rng.integers(0, 4)), rng))
        eps = energy_expectation(psi, h) / 7
        rep = lemma1_check(psi, code, consts(eps))
        assert rep.size_bound_z["holds"] and rep.size_bound_x["holds"]
        audited += 2
    for n in (7, 10, 12, 20, 26):
        grid = [i / 52 for i in range(1, 53)]
        assert binomial_bound_audit(n, grid)["holds"], n
    _passline(7, f"size bound on {audited} decompositions + binomial grid")


def test_criterion_08_fact1_randomized():
    """>= 10^4 randomized (state, S, T) triples at n in [2, 10]: no violations."""
    rng = np.random.default_rng(808)
    trials = 10_000
    min_slack = inf
    for i in range(trials):
        n = int(rng.integers(2, 11))
        psi = random_state(n, rng)
        dim = 2**n
        s = set(np.nonzero(rng.random(dim) < rng.random())[0].tolist())
        t = set(np.nonzero(rng.random(dim) < rng.random())[0].tolist())
        rep = fact1_check(psi, s, t)
        assert rep.holds, f"trial {i}"
        min_slack = min(min_slack, rep.slack)
    assert min_slack >= 0
    _passline(8, f"fact 1 over {trials} triples, min slack {min_slack:.4g}")


def test_criterion_09_agsp():
    """P(0) = 1 exactly and the envelope for every m, f <= 64; projector check
    over 50 random circuits at n <= 6, t <= 2."""
    for m in range(1, 65):
        for f in range(1, 65):
            poly = chebyshev_agsp(m, f)  # raises on any envelope failure
            assert poly.evaluate(0.0) == 1.0
    rng = np.random.default_rng(909)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        t = int(rng.integers(0, 3))
        circuit = random_layered_circuit(n, t, rng)
        rep = agsp_projector_check(circuit, f=int(rng.integers(2, 12)))
        assert rep.spectrum_on_grid
        assert rep.holds
    _passline(9, "AGSP envelope grid 64x64 and 50 projector circuits")


def test_criterion_10_fact2():
    """Worked depth-bound values and >= 10^3 sampled circuit instances."""
    vacuous = depth_lower_bound(100, 100, 1 / 400)
    assert vacuous <= 0
    worked = depth_lower_bound(1e6, 10**6, 1 / 400)
    independent = log2(1e12 / (400 * 1e6 * log2(400))) / 3
    assert worked == pytest.approx(independent, abs=1e-12)
    assert abs(worked - 2.7) <= 0.1
    rng = np.random.default_rng(1010)
    trials = 1000
    for i in range(trials):
        n = int(rng.integers(2, 9))
        t = int(rng.integers(0, 4))
        circuit = random_layered_circuit(n, t, rng)
        dim = 2**n
        s1 = set(np.nonzero(rng.random(dim) < rng.random())[0].tolist()) or {0}
        s2 = set(np.nonzero(rng.random(dim) < rng.random())[0].tolist()) or {dim - 1}
        assert fact2_check(circuit, s1, s2).passes, f"trial {i}"
    _passline(10, f"fact 2: worked values exact, {trials} circuits clean")


def test_criterion_11_small_set_expansion():
    """Expansion fixtures with gamma < 1/2: |Hy| >= (1-2 gamma) d |y| for all
    y of weight < alpha |L| (|L| <= 14)."""
    fixtures = []
    # perfect matching, d = 1, gamma = 0
    fixtures.append(
        ("matching", BipartiteGraph(8, 8, tuple((i, i) for i in range(8))), 0.0, 1.0)
    )
    # circulant 3-regular with difference set {0, 1, 5}: any two left vertices
    # share at most one check
    edges = tuple((v, (v + s) % 12) for v in range(12) for s in (0, 1, 5))
    fixtures.append(("circulant12", BipartiteGraph(12, 12, edges), 0.45, 0.25))
    # 2-regular chain neighborhoods at small alpha
    edges2 = tuple((v, (v + s) % 14) for v in range(14) for s in (0, 1))
    fixtures.append(("cycle14", BipartiteGraph(14, 14, edges2), 0.25, 0.2))
    for label, g, gamma, alpha in fixtures:
        assert g.n_left <= 14
        rep = small_set_expansion_check(g, gamma=gamma, alpha=alpha)
        assert rep.exhaustive and rep.is_expanding, label
        assert gamma < 0.5
        d = g.left_regular_degree()
        h = g.to_check_matrix()
        from itertools import combinations

        max_w = int(np.floor(alpha * g.n_left))
        for w in range(1, max_w + 1):
            for supp in combinations(range(g.n_left), w):
                y = 0
                for v in supp:
                    y |= 1 << v
                violated = h.mul_vec(BitVector(g.n_left, y)).weight()
                assert violated >= (1 - 2 * gamma) * d * w - 1e-12, (label, supp)
    _passline(11, "small-set expansion implies the check-weight bound")


def test_criterion_12_epsilon_calculator():
    """Closed form on the arithmetic example; k = 1 gives exactly zero."""
    from types import SimpleNamespace

    steane = steane_code()
    consts = NltsConstants(c1=1.0, c2=3 / 7, delta0=0.34, epsilon=0.0)
    assert nlts_epsilon(steane, consts) == 0.0
    n = 10**6
    fake = SimpleNamespace(n=n, k=n // 10, m_x=n, m_z=n)
    got = nlts_epsilon(fake, NltsConstants(c1=1.0, c2=0.1, delta0=0.01, epsilon=0.0))
    by_hand = min(((n // 10 - 1) / (4 * n)) ** 2, 0.01, 0.1 / 2) / (400 * 1.0) * (n / n)
    assert got == pytest.approx(by_hand, abs=1e-18)
    assert got == pytest.approx(1.5625e-6, rel=1e-3)
    _passline(12, "formal epsilon threshold calculator")


def test_criterion_13_determinism(tmp_path):
    """Same config and seed give byte-identical report.json across runs."""
    cfg = ExperimentConfig.from_file(CONFIG_DIR / "steane.json")
    emit(run_pipeline(cfg, seed=7), tmp_path / "run1")
    emit(run_pipeline(cfg, seed=7), tmp_path / "run2")
    a = (tmp_path / "run1" / "report.json").read_bytes()
    b = (tmp_path / "run2" / "report.json").read_bytes()
    assert a == b
    _passline(13, "pipeline determinism (byte-identical reports)")
