"""Config ingestion, the epsilon calculator, pipeline runs, emission, CLI."""

from __future__ import annotations

import json
from pathlib import Path
from types import SimpleNamespace

import pytest

from nltslab.clustering import NltsConstants
from nltslab.errors import ConfigError, DegenerateCode
from nltslab.harness import (
    EXIT_CAP,
    EXIT_CONFIG,
    EXIT_PASS,
    EXIT_VIOLATION,
    ExperimentConfig,
    StageFailure,
    build_code,
    emit,
    main,
    nlts_epsilon,
    run_pipeline,
)

CONFIG_DIR = Path(__file__).parent.parent / "configs"
GOLDEN_DIR = Path(__file__).parent / "golden"


def steane_cfg() -> ExperimentConfig:
    return ExperimentConfig.from_file(CONFIG_DIR / "steane.json")


class TestConfig:
    def test_valid_config_loads(self):
        cfg = steane_cfg()
        assert cfg.name == "steane-golden"
        assert cfg.delta_grid == (0.0, 0.34)
        assert cfg.caps["enum_dim"] == 20

    def test_schema_rejects_unknown_keys(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"name": "x", "code": {"kind": "steane"}, "bogus": 1})

    def test_schema_rejects_missing_code(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_json({"name": "x"})

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_file("/nonexistent/path.json")

    def test_build_from_all_fixture_configs(self):
        for name in ("steane.json", "z6_tanner.json", "z5_tanner.json"):
            cfg = ExperimentConfig.from_file(CONFIG_DIR / name)
            built = build_code(cfg)
            assert built.code.n == built.code.k + built.code.r_x + built.code.r_z


class TestNltsEpsilon:
    def test_k1_degenerate_zero(self):
        cfg = steane_cfg()
        code = build_code(cfg).code
        consts = NltsConstants(c1=1.0, c2=0.4, delta0=0.3, epsilon=0.0)
        assert nlts_epsilon(code, consts) == 0.0

    def test_worked_arithmetic(self):
        # c1=1, c2=0.1, delta0=0.01, k/n = 0.1 at large n, m = n
        n = 10**6
        fake = SimpleNamespace(n=n, k=n // 10, m_x=n, m_z=n)
        consts = NltsConstants(c1=1.0, c2=0.1, delta0=0.01, epsilon=0.0)
        got = nlts_epsilon(fake, consts)
        expected = min(((n // 10 - 1) / (4 * n)) ** 2, 0.01, 0.05) / 400.0
        assert got == pytest.approx(expected)
        assert got == pytest.approx(1.5625e-6, rel=1e-3)

    def test_scaling_in_c1(self):
        n = 1000
        fake = SimpleNamespace(n=n, k=100, m_x=n, m_z=n)
        base = nlts_epsilon(fake, NltsConstants(c1=1.0, c2=0.1, delta0=0.01, epsilon=0))
        double = nlts_epsilon(fake, NltsConstants(c1=2.0, c2=0.1, delta0=0.01, epsilon=0))
        assert double == pytest.approx(base / 2)

    def test_k0_raises(self):
        fake = SimpleNamespace(n=10, k=0, m_x=5, m_z=5)
        with pytest.raises(DegenerateCode):
            nlts_epsilon(fake, NltsConstants(c1=1.0, c2=0.1, delta0=0.01, epsilon=0))


class TestPipeline:
    def test_steane_end_to_end(self, tmp_path):
        report = run_pipeline(steane_cfg())
        assert report["clusters"]["Z"]["count"] == 2
        assert report["clusters"]["Z"]["min_inter_hamming"] == 3
        assert report["violations_found"] == 0
        assert report["simulation"]["markov_violations"] == 0
        files = emit(report, tmp_path)
        assert (tmp_path / "report.json").exists()

    def test_steane_matches_stored_golden(self, tmp_path):
        report = run_pipeline(steane_cfg())
        emit(report, tmp_path)
        golden = GOLDEN_DIR / "steane_report.json"
        assert golden.exists(), "golden fixture missing; regenerate via demos"
        assert (tmp_path / "report.json").read_bytes() == golden.read_bytes()

    def test_z6_tanner_golden(self, tmp_path):
        cfg = ExperimentConfig.from_file(CONFIG_DIR / "z6_tanner.json")
        report = run_pipeline(cfg)
        assert report["parameters"]["n"] == 12
        assert report["violations_found"] == 0
        emit(report, tmp_path)
        golden = GOLDEN_DIR / "z6_report.json"
        assert golden.exists()
        assert (tmp_path / "report.json").read_bytes() == golden.read_bytes()

    def test_determinism_byte_identical(self, tmp_path):
        cfg = steane_cfg()
        emit(run_pipeline(cfg, seed=7), tmp_path / "a")
        emit(run_pipeline(cfg, seed=7), tmp_path / "b")
        a = (tmp_path / "a" / "report.json").read_bytes()
        b = (tmp_path / "b" / "report.json").read_bytes()
        assert a == b

    def test_degenerate_config_stops_with_stage_tag(self):
        cfg = ExperimentConfig.from_file(CONFIG_DIR / "degenerate_k0.json")
        with pytest.raises(StageFailure) as err:
            run_pipeline(cfg)
        assert err.value.stage == "params"
        assert isinstance(err.value.__cause__, DegenerateCode)


class TestEmit:
    def test_csv_row_counts_match_histogram(self, tmp_path):
        report = run_pipeline(steane_cfg())
        hist_sizes = {
            f"gap_profile_delta{e['delta']:g}_{b}.csv": len(e[b]["histogram"])
            for e in report["property1"]
            for b in ("z", "x")
        }
        emit(report, tmp_path)
        for name, bins in hist_sizes.items():
            lines = (tmp_path / name).read_text().strip().splitlines()
            assert len(lines) == bins + 1  # header row

    def test_report_json_roundtrips_schema(self, tmp_path):
        report = run_pipeline(steane_cfg())
        emit(report, tmp_path)
        loaded = json.loads((tmp_path / "report.json").read_text())
        for key in ("name", "parameters", "property1", "clusters", "simulation", "facts", "provenance"):
            assert key in loaded

    def test_timing_kept_out_of_report(self, tmp_path):
        report = run_pipeline(steane_cfg())
        emit(report, tmp_path)
        loaded = json.loads((tmp_path / "report.json").read_text())
        assert "_timings" not in loaded
        assert (tmp_path / "timing.json").exists()


class TestCli:
    def test_params_exit_pass(self, capsys):
        rc = main(["params", "--config", str(CONFIG_DIR / "steane.json")])
        assert rc == EXIT_PASS
        out = json.loads(capsys.readouterr().out)
        assert out["n"] == 7 and out["d"] == 3

    def test_property1_pass(self):
        rc = main([
            "verify-property1", "--config", str(CONFIG_DIR / "steane.json"),
            "--delta", "0.0",
        ])
        assert rc == EXIT_PASS

    def test_property1_violation_exit(self, tmp_path):
        bad = {
            "name": "steane-bad-constants",
            "code": {"kind": "steane"},
            "delta_grid": [0.34],
            "constants": {"c1": 0.1, "c2": 0.42857142857142855, "delta0": 0.34},
            "seed": 1,
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        rc = main(["verify-property1", "--config", str(path)])
        assert rc == EXIT_VIOLATION

    def test_config_error_exit(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["params", "--config", str(path)]) == EXIT_CONFIG
        assert main(["params", "--config", "/no/such/file"]) == EXIT_CONFIG

    def test_cap_exceeded_exit(self):
        rc = main([
            "params", "--config", str(CONFIG_DIR / "steane.json"), "--max-n", "3",
        ])
        assert rc == EXIT_CAP

    def test_degenerate_maps_to_config_error(self):
        rc = main(["report", "--config", str(CONFIG_DIR / "degenerate_k0.json")])
        assert rc == EXIT_CONFIG

    def test_build_writes_code_json(self, tmp_path):
        rc = main([
            "build", "--config", str(CONFIG_DIR / "z6_tanner.json"),
            "--out", str(tmp_path),
        ])
        assert rc == EXIT_PASS
        blob = json.loads((tmp_path / "code.json").read_text())
        assert blob["parameters"]["n"] == 12

    def test_clusters_command(self, capsys):
        rc = main(["clusters", "--config", str(CONFIG_DIR / "z5_tanner.json")])
        assert rc == EXIT_PASS
        out = json.loads(capsys.readouterr().out)
        assert out["Z"]["count"] == 4  # 2^k with k=2
