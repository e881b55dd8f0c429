"""Experiment configuration, the formal epsilon-threshold calculator, the
end-to-end pipeline, report emission, and the command-line interface.

Reports are byte-stable under a fixed seed: every value in report.json is a
deterministic function of (config, seed); wall-clock timings go to a separate
timing.json so the main report can be compared byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from math import inf
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from . import __version__
from .classical_codes import (
    LinearCode,
    LocalCodePair,
    full_code,
    parity_code,
    repetition_code,
    zero_code,
)
from .clustering import (
    NltsConstants,
    binomial_bound_audit,
    cluster_decompose,
    cluster_masses,
    cluster_size_bound_audit,
    enumerate_gdelta,
    lemma1_check,
    mass_bound_check,
    property1_check,
    spread_certificate,
    xor_closure_audit,
)
from .css import CssCode, css_distance, ldpc_profile, new_css, quantum_tanner, steane_code
from .errors import (
    CapExceeded,
    ConfigError,
    DegenerateCode,
    IoFailure,
    NltsLabError,
    PreconditionFailed,
)
from .gf2 import BitMatrix
from .groups_graphs import (
    BalancedProductComplex,
    FiniteGroup,
    GeneratorSet,
    build_balanced_product,
    spectral_lambda,
    square_graphs,
)
from .hamiltonian import StabilizerHamiltonian, commuting_check, energy_expectation
from .quantumsim import (
    agsp_projector_check,
    chebyshev_agsp,
    fact1_check,
    fact2_check,
    measurement_distributions,
    random_layered_circuit,
    random_state,
    simulate,
)

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "code"],
    "properties": {
        "name": {"type": "string"},
        "code": {"type": "object", "required": ["kind"]},
        "delta_grid": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "constants": {
            "type": "object",
            "properties": {
                "c1": {"type": "number", "exclusiveMinimum": 0},
                "c2": {"type": "number", "exclusiveMinimum": 0},
                "delta0": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "circuits": {
            "type": "object",
            "properties": {
                "depth_min": {"type": "integer", "minimum": 0},
                "depth_max": {"type": "integer", "minimum": 0},
                "trials": {"type": "integer", "minimum": 0},
            },
        },
        "facts": {"type": "object"},
        "caps": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

DEFAULT_CAPS = {
    "enum_dim": 20,
    "statevector_qubits": 26,
    "dense_qubits": 12,
    "distance_qubits": 26,
}

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "name",
        "parameters",
        "property1",
        "clusters",
        "simulation",
        "facts",
        "provenance",
    ],
}

LOCAL_CODE_BUILTINS = {
    "repetition": repetition_code,
    "parity": parity_code,
    "full": full_code,
    "zero": zero_code,
}


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    code_spec: dict
    delta_grid: tuple[float, ...]
    constants: dict | None
    circuits: dict
    facts: dict
    caps: dict
    seed: int

    @classmethod
    def from_json(cls, spec: dict | str) -> "ExperimentConfig":
        if isinstance(spec, str):
            try:
                spec = json.loads(spec)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config is not valid JSON: {exc}") from exc
        errors = sorted(
            Draft202012Validator(CONFIG_SCHEMA).iter_errors(spec),
            key=lambda e: e.json_path,
        )
        if errors:
            raise ConfigError(
                "; ".join(f"{e.json_path}: {e.message}" for e in errors)
            )
        caps = dict(DEFAULT_CAPS)
        caps.update(spec.get("caps", {}))
        circuits = {"depth_min": 0, "depth_max": 3, "trials": 20}
        circuits.update(spec.get("circuits", {}))
        facts = {
            "fact1_trials": 400,
            "fact2_trials": 100,
            "qubits_min": 2,
            "qubits_max": 6,
            "agsp_max_m": 16,
            "agsp_circuits": 5,
        }
        facts.update(spec.get("facts", {}))
        return cls(
            name=spec["name"],
            code_spec=spec["code"],
            delta_grid=tuple(spec.get("delta_grid", [0.0])),
            constants=spec.get("constants"),
            circuits=circuits,
            facts=facts,
            caps=caps,
            seed=int(spec.get("seed", 0)),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_json(text)


def _build_group(spec: dict) -> FiniteGroup:
    if "table" in spec:
        return FiniteGroup.from_json(spec)
    name = spec.get("name")
    if name == "cyclic":
        return FiniteGroup.cyclic(int(spec["order"]))
    if name == "dihedral":
        return FiniteGroup.dihedral(int(spec["order"]))
    if name == "symmetric":
        return FiniteGroup.symmetric(int(spec["degree"]))
    raise ConfigError(f"unknown group spec: {spec}")


def _build_local_code(spec: dict) -> LinearCode:
    if "name" in spec:
        name = spec["name"]
        if name not in LOCAL_CODE_BUILTINS:
            raise ConfigError(f"unknown local code {name!r}")
        return LOCAL_CODE_BUILTINS[name](int(spec["length"]))
    try:
        return LinearCode.from_json(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad local code spec: {exc}") from exc


def _parse_check_matrix(spec) -> BitMatrix:
    if isinstance(spec, dict) and "ones" in spec:
        return BitMatrix.from_triplets(spec)
    if isinstance(spec, dict) and "text" in spec:
        return BitMatrix.from_text(spec["text"])
    if isinstance(spec, list):
        return BitMatrix.from_dense(np.array(spec))
    raise ConfigError(f"unrecognized check-matrix spec: {type(spec)}")


@dataclass
class BuildResult:
    code: CssCode
    complex: BalancedProductComplex | None
    pair: LocalCodePair | None


class StageFailure(NltsLabError):
    """A pipeline stage failed; carries the stage tag and the original error."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        super().__init__(f"stage {stage!r}: {cause}")
        self.__cause__ = cause


def build_code(cfg: ExperimentConfig) -> BuildResult:
    spec = cfg.code_spec
    kind = spec.get("kind")
    try:
        if kind == "steane":
            return BuildResult(steane_code(), None, None)
        if kind == "css":
            code = new_css(
                _parse_check_matrix(spec["h_x"]),
                _parse_check_matrix(spec["h_z"]),
                name=cfg.name,
            )
            return BuildResult(code, None, None)
        if kind == "quantum_tanner":
            group = _build_group(spec["group"])
            gens_a = GeneratorSet(tuple(int(a) for a in spec["generators_a"]), "right")
            gens_b = GeneratorSet(tuple(int(b) for b in spec["generators_b"]), "left")
            x = build_balanced_product(group, gens_a, gens_b)
            pair = LocalCodePair(
                _build_local_code(spec["local_a"]),
                _build_local_code(spec["local_b"]),
            )
            code = quantum_tanner(x, pair, name=cfg.name)
            return BuildResult(code, x, pair)
    except NltsLabError:
        raise
    except KeyError as exc:
        raise ConfigError(f"code spec missing field {exc}") from exc
    raise ConfigError(f"unknown code kind {kind!r}")


def nlts_epsilon(code: CssCode, constants: NltsConstants) -> float:
    """The energy-density threshold of the formal statement:
    (1/400 c1) (min(m_x, m_z)/n) min{((k-1)/4n)^2, delta0, c2/2}."""
    if code.k < 1:
        raise DegenerateCode(f"k = {code.k} has no logical qubits")
    lead = min(code.m_x, code.m_z) / code.n / (400.0 * constants.c1)
    inner = min(
        ((code.k - 1) / (4.0 * code.n)) ** 2,
        constants.delta0,
        constants.c2 / 2.0,
    )
    return lead * inner


def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        value = float(value)
    if isinstance(value, float):
        if value == inf:
            return "inf"
        if value == -inf:
            return "-inf"
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def run_pipeline(cfg: ExperimentConfig, seed: int | None = None) -> dict:
    """Build -> parameters -> Property 1 grid -> clusters -> circuit trials ->
    fact audits, all deterministic under the seed; values in the returned
    report are produced by the module operations, never recomputed inline."""
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    timings: dict[str, float] = {}
    report: dict = {"name": cfg.name}

    def stage(tag: str):
        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, exc_type, exc, tb):
                timings[tag] = time.perf_counter() - self.t0
                if exc is not None and not isinstance(exc, StageFailure):
                    raise StageFailure(tag, exc) from exc

        return _Timer()

    with stage("build"):
        built = build_code(cfg)
        code = built.code

    with stage("params"):
        params = {
            "n": code.n,
            "k": code.k,
            "m_x": code.m_x,
            "m_z": code.m_z,
            "r_x": code.r_x,
            "r_z": code.r_z,
            "identity_n_eq_k_plus_ranks": code.n == code.k + code.r_x + code.r_z,
            "ldpc": ldpc_profile(code),
            "commuting": commuting_check(StabilizerHamiltonian.from_code(code)),
        }
        if code.n <= cfg.caps["distance_qubits"]:
            d_x, d_z, d = css_distance(code)
            params["d_x"], params["d_z"], params["d"] = d_x, d_z, d
        constants = None
        if cfg.constants:
            constants = NltsConstants(
                c1=cfg.constants["c1"],
                c2=cfg.constants["c2"],
                delta0=cfg.constants["delta0"],
                epsilon=0.0,
            )
            params["nlts_epsilon"] = nlts_epsilon(code, constants)
        if built.complex is not None:
            g0, g1 = square_graphs(built.complex)
            params["square_graph_lambda"] = {
                "g0": spectral_lambda(g0).lam,
                "g1": spectral_lambda(g1).lam,
                "bound_4delta": 4.0 * built.complex.delta,
            }
        report["parameters"] = params

    with stage("property1"):
        prop_entries = []
        for delta in cfg.delta_grid:
            rep = property1_check(
                code,
                delta,
                c1=cfg.constants.get("c1") if cfg.constants else None,
                c2=cfg.constants.get("c2") if cfg.constants else None,
            )
            prop_entries.append(
                {
                    "delta": delta,
                    "passes": rep.passes,
                    "z": _side_entry(rep.z_side),
                    "x": _side_entry(rep.x_side),
                }
            )
        report["property1"] = prop_entries

    with stage("clusters"):
        cluster_block = {}
        for basis in ("Z", "X"):
            gset = enumerate_gdelta(code, basis, 0.0)
            dec = cluster_decompose(gset, code, 0)
            audit = cluster_size_bound_audit(dec, code)
            cluster_block[basis] = {
                "count": dec.cluster_count,
                "expected_2k": 2**code.k,
                "sizes": dec.sizes(),
                "min_inter_hamming": dec.min_inter_hamming,
                "transitivity_violations": len(dec.transitivity_violations),
                "xor_closure_violations": len(xor_closure_audit(gset, code)),
                "size_bound": audit,
            }
        report["clusters"] = cluster_block

    with stage("simulate"):
        trials = []
        h = StabilizerHamiltonian.from_code(code)
        depth_lo = cfg.circuits["depth_min"]
        depth_hi = cfg.circuits["depth_max"]
        for t in range(cfg.circuits["trials"]):
            depth = int(rng.integers(depth_lo, depth_hi + 1))
            circuit = random_layered_circuit(code.n, depth, rng)
            psi = simulate(circuit, cap=cfg.caps["statevector_qubits"])
            energy = energy_expectation(psi, h)
            eps = energy / code.n
            mass = mass_bound_check(psi, code, eps)
            entry = {
                "trial": t,
                "depth": depth,
                "energy": energy,
                "epsilon1": mass.epsilon1,
                "mass_z": mass.mass_z,
                "mass_x": mass.mass_x,
                "markov_holds": mass.markov_holds,
                "concentration_199_200": mass.concentration_199_200,
            }
            if cfg.constants:
                lemma_consts = NltsConstants(
                    c1=cfg.constants["c1"],
                    c2=cfg.constants["c2"],
                    delta0=cfg.constants["delta0"],
                    epsilon=eps,
                )
                lem = lemma1_check(psi, code, lemma_consts)
                entry["lemma1"] = {
                    "hypothesis_met": lem.hypothesis_met,
                    "max_mass_z": lem.max_mass_z,
                    "max_mass_x": lem.max_mass_x,
                    "dichotomy_holds": lem.dichotomy_holds,
                    "size_bound_z_holds": lem.size_bound_z["holds"],
                    "size_bound_x_holds": lem.size_bound_x["holds"],
                }
                entry["spread"] = _spread_entry(lem, psi, circuit)
            trials.append(entry)
        report["simulation"] = {
            "trials": trials,
            "markov_violations": sum(not t["markov_holds"] for t in trials),
        }

    with stage("facts"):
        f1_min_slack = inf
        f1_violations = 0
        for _ in range(cfg.facts["fact1_trials"]):
            n = int(rng.integers(cfg.facts["qubits_min"], cfg.facts["qubits_max"] + 1))
            psi = random_state(n, rng)
            size_s = int(rng.integers(1, 2**n + 1))
            size_t = int(rng.integers(1, 2**n + 1))
            s = set(map(int, rng.choice(2**n, size=size_s, replace=False)))
            tset = set(map(int, rng.choice(2**n, size=size_t, replace=False)))
            rep = fact1_check(psi, s, tset)
            f1_min_slack = min(f1_min_slack, rep.slack)
            f1_violations += not rep.holds
        f2_violations = 0
        for _ in range(cfg.facts["fact2_trials"]):
            n = int(rng.integers(cfg.facts["qubits_min"], cfg.facts["qubits_max"] + 1))
            depth = int(rng.integers(0, 4))
            circuit = random_layered_circuit(n, depth, rng)
            size = max(1, 2 ** (n - 1))
            s1 = set(map(int, rng.choice(2**n, size=rng.integers(1, size + 1), replace=False)))
            s2 = set(map(int, rng.choice(2**n, size=rng.integers(1, size + 1), replace=False)))
            f2_violations += not fact2_check(circuit, s1, s2).passes
        agsp_grid_ok = True
        max_m = cfg.facts["agsp_max_m"]
        for m in range(1, max_m + 1):
            for f in range(1, max_m + 1):
                poly = chebyshev_agsp(m, f)
                agsp_grid_ok &= poly.envelope_report().ok and poly.evaluate(0.0) == 1.0
        agsp_projector_ok = True
        for _ in range(cfg.facts["agsp_circuits"]):
            n = int(rng.integers(2, 7))
            circuit = random_layered_circuit(n, int(rng.integers(0, 3)), rng)
            rep = agsp_projector_check(circuit, f=int(rng.integers(2, 10)))
            agsp_projector_ok &= rep.holds and rep.spectrum_on_grid
        binom = binomial_bound_audit(
            min(code.n, 26), [i / 50 for i in range(1, 51)]
        )
        report["facts"] = {
            "fact1": {
                "trials": cfg.facts["fact1_trials"],
                "violations": f1_violations,
                "min_slack": f1_min_slack,
            },
            "fact2": {
                "trials": cfg.facts["fact2_trials"],
                "violations": f2_violations,
            },
            "agsp": {
                "grid_max": max_m,
                "grid_ok": agsp_grid_ok,
                "projector_circuits": cfg.facts["agsp_circuits"],
                "projector_ok": agsp_projector_ok,
            },
            "binomial_bound": binom,
        }

    report["provenance"] = {
        "seed": cfg.seed if seed is None else seed,
        "version": __version__,
        "config_name": cfg.name,
    }
    report["violations_found"] = _count_violations(report)
    return _jsonify(report) | {"_timings": timings}


def _side_entry(side) -> dict:
    return {
        "members": side.member_count,
        "histogram": [list(pair) for pair in side.profile.histogram],
        "gap_interval": list(side.profile.gap_interval),
        "fitted_c1": side.fitted_c1,
        "fitted_c2": side.fitted_c2,
        "violations": len(side.violations),
        "passes": side.passes,
    }


def _spread_entry(lem, psi, circuit) -> dict:
    d_z, _ = measurement_distributions(psi)
    try:
        cert = spread_certificate(lem.z_decomposition, d_z)
    except PreconditionFailed as exc:
        return {"available": False, "reason": str(exc)}
    clusters = lem.z_decomposition.clusters
    s1 = set()
    for i in cert.cluster_indices_m:
        s1 |= set(clusters[i])
    s2 = set()
    for i in cert.cluster_indices_m_prime:
        s2 |= set(clusters[i])
    f2 = fact2_check(circuit, s1, s2)
    return {
        "available": True,
        "mass_m": cert.mass_m,
        "mass_m_prime": cert.mass_m_prime,
        "separation": cert.separation,
        "depth_bound": cert.depth_bound,
        "depth_bound_respected": circuit.depth >= cert.depth_bound,
        "fact2_passes": f2.passes,
    }


def _count_violations(report: dict) -> int:
    count = 0
    for entry in report.get("property1", []):
        count += (not entry["passes"]) if entry.get("delta") is not None else 0
    for basis in report.get("clusters", {}).values():
        count += basis["transitivity_violations"]
        count += basis["xor_closure_violations"]
        count += 0 if basis["size_bound"]["holds"] else 1
        count += 0 if basis["count"] == basis["expected_2k"] else 1
    sim = report.get("simulation", {})
    count += sim.get("markov_violations", 0)
    facts = report.get("facts", {})
    if facts:
        count += facts["fact1"]["violations"]
        count += facts["fact2"]["violations"]
        count += 0 if facts["agsp"]["grid_ok"] else 1
        count += 0 if facts["agsp"]["projector_ok"] else 1
        count += 0 if facts["binomial_bound"]["holds"] else 1
    return count


def emit(report: dict, out_dir: str | Path, formats: tuple[str, ...] = ("json", "csv", "text")) -> list[Path]:
    """Write report artifacts; report.json is byte-stable (timings separate)."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        timings = report.pop("_timings", {})
        if "json" in formats:
            errors = list(Draft202012Validator(REPORT_SCHEMA).iter_errors(report))
            if errors:
                raise IoFailure(f"report failed schema validation: {errors[0].message}")
            path = out / "report.json"
            path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
            written.append(path)
            tpath = out / "timing.json"
            tpath.write_text(json.dumps(_jsonify(timings), sort_keys=True, indent=2) + "\n")
            written.append(tpath)
        if "csv" in formats:
            for entry in report.get("property1", []):
                for basis in ("z", "x"):
                    name = f"gap_profile_delta{entry['delta']:g}_{basis}.csv"
                    path = out / name
                    with path.open("w", newline="") as fh:
                        writer = csv.writer(fh)
                        writer.writerow(["coset_distance", "multiplicity"])
                        writer.writerows(entry[basis]["histogram"])
                    written.append(path)
            trials = report.get("simulation", {}).get("trials", [])
            if trials:
                path = out / "mass_table.csv"
                with path.open("w", newline="") as fh:
                    writer = csv.writer(fh)
                    writer.writerow(
                        ["trial", "depth", "energy", "epsilon1", "mass_z", "mass_x", "markov_holds"]
                    )
                    for t in trials:
                        writer.writerow(
                            [t["trial"], t["depth"], t["energy"], t["epsilon1"],
                             t["mass_z"], t["mass_x"], t["markov_holds"]]
                        )
                written.append(path)
        if "text" in formats:
            path = out / "summary.txt"
            path.write_text(_text_summary(report))
            written.append(path)
        return written
    except OSError as exc:
        raise IoFailure(f"cannot write to {out}: {exc}") from exc


def _text_summary(report: dict) -> str:
    buf = io.StringIO()
    p = report.get("parameters", {})
    print(f"run: {report.get('name')}", file=buf)
    print(
        f"code: n={p.get('n')} k={p.get('k')} d={p.get('d', '?')} "
        f"m=({p.get('m_x')},{p.get('m_z')}) r=({p.get('r_x')},{p.get('r_z')})",
        file=buf,
    )
    if "nlts_epsilon" in p:
        print(f"epsilon threshold: {p['nlts_epsilon']:.6g}", file=buf)
    for entry in report.get("property1", []):
        print(
            f"property1 delta={entry['delta']:g}: passes={entry['passes']} "
            f"gap_z={entry['z']['gap_interval']} gap_x={entry['x']['gap_interval']}",
            file=buf,
        )
    for basis, block in report.get("clusters", {}).items():
        print(
            f"clusters[{basis}]: count={block['count']} (2^k={block['expected_2k']}) "
            f"min_dist={block['min_inter_hamming']}",
            file=buf,
        )
    sim = report.get("simulation", {})
    print(
        f"simulation: {len(sim.get('trials', []))} trials, "
        f"markov violations={sim.get('markov_violations')}",
        file=buf,
    )
    facts = report.get("facts", {})
    if facts:
        print(
            f"fact1: {facts['fact1']['violations']} violations "
            f"(min slack {facts['fact1']['min_slack']:.4g}); "
            f"fact2: {facts['fact2']['violations']} violations; "
            f"agsp grid ok: {facts['agsp']['grid_ok']}",
            file=buf,
        )
    print(f"total violations: {report.get('violations_found')}", file=buf)
    return buf.getvalue()


EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_CAP = 3


def _load(args) -> ExperimentConfig:
    if not args.config:
        raise ConfigError("--config is required")
    cfg = ExperimentConfig.from_file(args.config)
    if args.max_n is not None:
        built = build_code(cfg)
        if built.code.n > args.max_n:
            raise CapExceeded(
                f"code has n = {built.code.n} > --max-n {args.max_n}"
            )
    return cfg


def _cmd_build(args) -> int:
    cfg = _load(args)
    built = build_code(cfg)
    blob = built.code.to_json()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "code.json").write_text(json.dumps(blob, sort_keys=True, indent=2) + "\n")
        print(f"wrote {out / 'code.json'}")
    else:
        print(json.dumps(blob["parameters"], sort_keys=True))
    return EXIT_PASS


def _cmd_params(args) -> int:
    cfg = _load(args)
    built = build_code(cfg)
    code = built.code
    params = {
        "n": code.n,
        "k": code.k,
        "m_x": code.m_x,
        "m_z": code.m_z,
        "r_x": code.r_x,
        "r_z": code.r_z,
    }
    if code.n <= cfg.caps["distance_qubits"]:
        d_x, d_z, d = css_distance(code)
        params.update({"d_x": d_x, "d_z": d_z, "d": d})
    if cfg.constants:
        constants = NltsConstants(
            c1=cfg.constants["c1"], c2=cfg.constants["c2"],
            delta0=cfg.constants["delta0"], epsilon=0.0,
        )
        params["nlts_epsilon"] = nlts_epsilon(code, constants)
    print(json.dumps(_jsonify(params), sort_keys=True))
    return EXIT_PASS


def _cmd_verify_property1(args) -> int:
    cfg = _load(args)
    code = build_code(cfg).code
    deltas = [args.delta] if args.delta is not None else list(cfg.delta_grid)
    worst = EXIT_PASS
    for delta in deltas:
        rep = property1_check(
            code,
            delta,
            c1=cfg.constants.get("c1") if cfg.constants else None,
            c2=cfg.constants.get("c2") if cfg.constants else None,
        )
        print(
            json.dumps(
                _jsonify(
                    {
                        "delta": delta,
                        "passes": rep.passes,
                        "z": _side_entry(rep.z_side),
                        "x": _side_entry(rep.x_side),
                    }
                ),
                sort_keys=True,
            )
        )
        if not rep.passes:
            worst = EXIT_VIOLATION
    return worst


def _cmd_clusters(args) -> int:
    cfg = _load(args)
    code = build_code(cfg).code
    delta = args.delta if args.delta is not None else 0.0
    out = {}
    violations = 0
    for basis in ("Z", "X"):
        gset = enumerate_gdelta(code, basis, delta)
        threshold = 0 if delta == 0 else int(args.threshold or 0)
        dec = cluster_decompose(gset, code, threshold)
        audit = cluster_size_bound_audit(dec, code)
        out[basis] = {
            "members": len(gset),
            "count": dec.cluster_count,
            "sizes": dec.sizes(),
            "min_inter_hamming": dec.min_inter_hamming,
            "transitivity_violations": len(dec.transitivity_violations),
            "size_bound": audit,
        }
        violations += len(dec.transitivity_violations) + (0 if audit["holds"] else 1)
    print(json.dumps(_jsonify(out), sort_keys=True))
    return EXIT_VIOLATION if violations else EXIT_PASS


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    report = run_pipeline(cfg, seed=args.seed)
    sim = report["simulation"]
    print(
        json.dumps(
            _jsonify(
                {
                    "trials": len(sim["trials"]),
                    "markov_violations": sim["markov_violations"],
                }
            )
        )
    )
    if args.out:
        emit(report, args.out, _formats(args))
    return EXIT_VIOLATION if sim["markov_violations"] else EXIT_PASS


def _cmd_facts(args) -> int:
    cfg = _load(args)
    report = run_pipeline(cfg, seed=args.seed)
    facts = report["facts"]
    print(json.dumps(_jsonify(facts), sort_keys=True))
    bad = (
        facts["fact1"]["violations"]
        + facts["fact2"]["violations"]
        + (0 if facts["agsp"]["grid_ok"] else 1)
        + (0 if facts["agsp"]["projector_ok"] else 1)
    )
    return EXIT_VIOLATION if bad else EXIT_PASS


def _cmd_report(args) -> int:
    cfg = _load(args)
    report = run_pipeline(cfg, seed=args.seed)
    violations = report["violations_found"]
    out = args.out or "out"
    files = emit(report, out, _formats(args))
    for f in files:
        print(f"wrote {f}")
    return EXIT_VIOLATION if violations else EXIT_PASS


def _formats(args) -> tuple[str, ...]:
    if args.format:
        return tuple(args.format)
    return ("json", "csv", "text")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nltslab",
        description="quantum Tanner CSS codes and low-energy clustering checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "build": _cmd_build,
        "params": _cmd_params,
        "verify-property1": _cmd_verify_property1,
        "clusters": _cmd_clusters,
        "simulate": _cmd_simulate,
        "facts": _cmd_facts,
        "report": _cmd_report,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--delta", type=float, default=None, help="delta override")
        p.add_argument("--threshold", type=int, default=None, help="cluster threshold")
        p.add_argument("--max-n", type=int, default=None, help="refuse larger codes")
        p.add_argument(
            "--format",
            action="append",
            choices=["json", "csv", "text"],
            help="emit formats (repeatable)",
        )
        p.set_defaults(fn=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except StageFailure as exc:
        cause = exc.__cause__
        print(f"pipeline failure: {exc}", file=sys.stderr)
        if isinstance(cause, (ConfigError, DegenerateCode)):
            return EXIT_CONFIG
        if isinstance(cause, CapExceeded):
            return EXIT_CAP
        return EXIT_VIOLATION
    except IoFailure as exc:
        print(f"io failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
