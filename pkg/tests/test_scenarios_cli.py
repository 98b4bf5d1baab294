"""Scenario parsing, deterministic sampling, and the command-line interface."""

import json
from pathlib import Path

import numpy as np
import pytest

from disconn.cli import emit_report, main, run_scenario
from disconn.errors import ParseError, UnknownBuiltin
from disconn.groups import Translation
from disconn.manifolds import EuclideanChart
from disconn.scenarios import (load_scenario, one_form_builtin,
                               pair_map_builtin, rng_for)

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "scenarios"


def write_scenario(tmp_path, payload, name="s.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def minimal(**extra):
    cfg = {
        "name": "minimal",
        "seed": 1,
        "bundle": {"kind": "trivial",
                   "base": {"kind": "R^d", "dim": 2},
                   "group": {"kind": "U1"}},
    }
    cfg.update(extra)
    return cfg


class TestParsing:
    def test_unknown_key_rejected(self, tmp_path):
        path = write_scenario(tmp_path, minimal(extra_key=1))
        with pytest.raises(ParseError):
            load_scenario(path)

    def test_missing_seed_rejected(self, tmp_path):
        cfg = minimal()
        del cfg["seed"]
        path = write_scenario(tmp_path, cfg)
        with pytest.raises(ParseError):
            load_scenario(path)

    def test_bad_tolerance_rejected(self, tmp_path):
        cfg = minimal(checks=[{"name": "exp_log_roundtrip",
                               "tolerance": -1.0}])
        path = write_scenario(tmp_path, cfg)
        with pytest.raises(ParseError):
            load_scenario(path)

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            load_scenario(str(path))


class TestBuiltins:
    def test_unknown_one_form(self):
        with pytest.raises(UnknownBuiltin):
            one_form_builtin("no_such_form", EuclideanChart(2),
                             Translation(1))

    def test_polynomial_one_form(self):
        spec = {"name": "polynomial",
                "terms": [{"coeff": 3.0, "powers": [2, 0], "dx": 1}]}
        omega = one_form_builtin(spec, EuclideanChart(2), Translation(1))
        # 3 x^2 dy at x = 2 on (0, 1).
        assert omega.value([2.0, 5.0], [0.0, 1.0])[0] == pytest.approx(12.0)

    def test_unknown_pair_map(self):
        with pytest.raises(UnknownBuiltin):
            pair_map_builtin("no_such_map", Translation(1))

    def test_quadratic_pair_map_const(self):
        rule, name = pair_map_builtin(
            {"name": "quadratic_f", "f": {"const": 2.0}}, Translation(1))
        assert name == "quadratic_f"
        assert rule(np.array([0.0]), np.array([3.0]))[0] == pytest.approx(18.0)


class TestSampling:
    def test_stream_determinism(self):
        a = rng_for(42, 3).uniform(size=5)
        b = rng_for(42, 3).uniform(size=5)
        assert np.array_equal(a, b)

    def test_streams_independent(self):
        a = rng_for(42, 3).uniform(size=5)
        b = rng_for(42, 4).uniform(size=5)
        assert not np.array_equal(a, b)


class TestRunScenario:
    def test_bundled_nonuniqueness_passes(self):
        report = run_scenario(str(SCENARIO_DIR / "nonuniqueness.json"))
        assert report.passed
        assert any(c.name == "distinctness" for c in report.checks)

    def test_zero_checks_is_trivially_passing(self, tmp_path):
        report = run_scenario(write_scenario(tmp_path, minimal()))
        assert report.passed
        assert report.checks == []

    def test_failing_check_reported(self, tmp_path):
        cfg = minimal(connection={"kind": "local", "omega": "x_dy"},
                      checks=[{"name": "closed_form", "tolerance": 1e-8,
                               "samples": 3}])
        report = run_scenario(write_scenario(tmp_path, cfg))
        assert not report.passed
        assert report.checks[0].max_defect > 0.1


class TestEmitReport:
    def make_report(self, tmp_path):
        cfg = minimal(checks=[{"name": "exp_log_roundtrip",
                               "tolerance": 1e-10, "samples": 5}])
        return run_scenario(write_scenario(tmp_path, cfg))

    def test_json_omits_wall_time(self, tmp_path):
        out = emit_report(self.make_report(tmp_path), "json")
        payload = json.loads(out)
        assert payload["passed"] is True
        assert "wall_time_ms" not in json.dumps(payload)

    def test_json_deterministic_bytes(self, tmp_path):
        a = emit_report(self.make_report(tmp_path), "json")
        b = emit_report(self.make_report(tmp_path), "json")
        assert a == b

    def test_table_shows_status_and_time(self, tmp_path):
        out = emit_report(self.make_report(tmp_path), "table")
        assert "PASS" in out
        assert " ms " in out or "ms" in out.splitlines()[1]


class TestCli:
    def test_run_pass_exit_zero(self, tmp_path, capsys):
        cfg = minimal(checks=[{"name": "exp_log_roundtrip",
                               "tolerance": 1e-10, "samples": 5}])
        path = write_scenario(tmp_path, cfg)
        assert main(["run", path]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_run_fail_exit_one(self, tmp_path, capsys):
        cfg = minimal(connection={"kind": "local", "omega": "x_dy"},
                      checks=[{"name": "closed_form", "tolerance": 1e-8,
                               "samples": 3}])
        path = write_scenario(tmp_path, cfg)
        assert main(["run", path]) == 1
        assert "FAIL" in capsys.readouterr().out

    def test_missing_file_exit_two(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "absent.json")]) == 2
        assert "error" in capsys.readouterr().err

    def test_bad_fd_step_exit_two(self, tmp_path, capsys):
        path = write_scenario(tmp_path, minimal())
        assert main(["run", path, "--fd-step", "1.0"]) == 2

    def test_verify_all_empty_dir_exit_two(self, tmp_path, capsys):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["verify-all", str(empty)]) == 2

    def test_verify_all_mixed_exit_one(self, tmp_path, capsys):
        write_scenario(tmp_path, minimal(), "a.json")
        cfg = minimal(connection={"kind": "local", "omega": "x_dy"},
                      checks=[{"name": "closed_form", "tolerance": 1e-8,
                               "samples": 3}])
        write_scenario(tmp_path, cfg, "b.json")
        assert main(["verify-all", str(tmp_path)]) == 1

    def test_json_format_flag(self, tmp_path, capsys):
        cfg = minimal(checks=[{"name": "exp_log_roundtrip",
                               "tolerance": 1e-10, "samples": 5}])
        path = write_scenario(tmp_path, cfg)
        assert main(["run", path, "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["scenario"] == "minimal"

    def test_retraction_override_breaks_equivariance(self, tmp_path):
        cfg = minimal(connection={"kind": "local", "omega": "zero"},
                      checks=[{"name": "retraction_equivariance",
                               "tolerance": 1e-8, "samples": 10}])
        path = write_scenario(tmp_path, cfg)
        assert main(["run", path]) == 0
        assert main(["run", path, "--retraction", "skewed"]) == 1
