import json
import subprocess
import sys

import pytest


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "polaron2d", *args],
                          capture_output=True, text=True, timeout=300)


class TestBound:
    def test_json_payload(self):
        proc = run_cli("bound", "--mass", "2.0", "--binding", "-1.0",
                       "--lambda", "1.0", "--format", "json")
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert set(payload) == {"mass_ratio", "binding_energy", "lambda",
                                "mu", "gamma", "alpha_M", "residual",
                                "iterations", "optimized"}
        assert payload["mu"] < -1.0
        assert payload["gamma"] > 1.0
        assert not payload["optimized"]

    def test_supercritical_exit_code(self):
        proc = run_cli("bound", "--mass", "1.0", "--binding", "-1.0")
        assert proc.returncode == 2
        assert proc.stdout == ""
        assert "supercritical" in proc.stderr

    def test_optimize_dominates_fixed(self):
        fixed = json.loads(run_cli("bound", "--mass", "2.0", "--binding",
                                   "-1.0", "--lambda", "1.0", "--format",
                                   "json").stdout)
        best = json.loads(run_cli("bound", "--mass", "2.0", "--binding",
                                  "-1.0", "--optimize-lambda", "--format",
                                  "json").stdout)
        assert best["optimized"]
        assert best["mu"] >= fixed["mu"]

    def test_csv_header(self):
        proc = run_cli("bound", "--mass", "2.0", "--binding", "-1.0",
                       "--format", "csv")
        lines = proc.stdout.strip().splitlines()
        assert lines[0] == "M,E_B,lambda,mu,gamma,alpha_M,residual"
        assert len(lines) == 2

    def test_json_round_trips(self):
        out1 = run_cli("bound", "--mass", "2.0", "--binding", "-1.0",
                       "--format", "json").stdout
        out2 = run_cli("bound", "--mass", "2.0", "--binding", "-1.0",
                       "--format", "json").stdout
        assert out1 == out2
        payload = json.loads(out1)
        assert json.loads(json.dumps(payload)) == payload

    def test_usage_errors(self):
        assert run_cli("bound", "--binding", "-1.0").returncode == 1
        assert run_cli("bound", "--mass", "2.0",
                       "--binding", "1.0").returncode == 1
        assert run_cli("bound", "--mass", "2.0", "--binding", "-1.0",
                       "--lambda", "-3").returncode == 1


class TestGamma:
    def test_single_mass(self):
        proc = run_cli("gamma", "--mass", "2.0", "--format", "json")
        assert proc.returncode == 0
        rows = json.loads(proc.stdout)
        assert len(rows) == 1
        assert rows[0]["gamma"] == pytest.approx(20.312228625, abs=1e-6)

    def test_scan_csv(self):
        proc = run_cli("gamma", "--scan", "1.3:5.0:10", "--format", "csv")
        assert proc.returncode == 0
        lines = proc.stdout.strip().splitlines()
        assert lines[0] == "M,gamma,alpha_M"
        assert len(lines) == 11
        gammas = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a > b for a, b in zip(gammas, gammas[1:]))
        assert "strictly decreasing" in proc.stderr

    def test_scan_supercritical_rows_continue(self):
        proc = run_cli("gamma", "--scan", "1.0:2.0:5", "--format", "json")
        assert proc.returncode == 0
        rows = json.loads(proc.stdout)
        assert rows[0]["error"] is not None
        assert rows[-1]["error"] is None

    def test_supercritical_single_exit(self):
        assert run_cli("gamma", "--mass", "1.0").returncode == 2

    def test_needs_exactly_one_mode(self):
        assert run_cli("gamma").returncode == 1
        assert run_cli("gamma", "--mass", "2.0",
                       "--scan", "1.3:2:3").returncode == 1


class TestCriticalMass:
    def test_json_schema_and_window(self):
        proc = run_cli("critical-mass", "--format", "json")
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert set(payload) == {"m_star", "alpha_at_m_star", "residual"}
        assert 1.20 <= payload["m_star"] <= 1.225

    def test_deterministic_to_ten_digits(self):
        out1 = run_cli("critical-mass", "--tol", "1e-10",
                       "--format", "json").stdout
        out2 = run_cli("critical-mass", "--tol", "1e-10",
                       "--format", "json").stdout
        assert out1 == out2


class TestVerify:
    def test_integrals_pass(self):
        proc = run_cli("verify", "--suite", "integrals", "--samples", "100",
                       "--seed", "7", "--format", "json")
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["suite_passed"]
        names = {c["name"] for c in report["cases"]}
        assert names == {"resolvent_tail_integral", "cutoff_disk_area",
                         "sigma_minus_identity"}
        assert all(c["max_violation"] < 1e-10 for c in report["cases"]
                   if c["name"] == "resolvent_tail_integral")

    def test_byte_identical_reports(self):
        args = ("verify", "--suite", "monotonicity", "--samples", "200",
                "--seed", "7", "--format", "json")
        assert run_cli(*args).stdout == run_cli(*args).stdout

    def test_impossible_tolerance_exits_4(self):
        proc = run_cli("verify", "--suite", "monotonicity", "--samples", "50",
                       "--seed", "1", "--tol", "1e-30", "--format", "json")
        assert proc.returncode == 4
        report = json.loads(proc.stdout)
        assert not report["suite_passed"]
        failing = [c for c in report["cases"] if not c["passed"]]
        assert failing and all(c["worst_input"] for c in failing)

    def test_csv_format(self):
        proc = run_cli("verify", "--suite", "chain", "--samples", "10",
                       "--format", "csv")
        lines = proc.stdout.strip().splitlines()
        assert lines[0] == "name,samples_run,max_violation,tolerance,passed,worst_input"
        assert proc.returncode == 0


class TestCConstantFlags:
    def test_needs_mass_or_scan(self):
        assert run_cli("c-constant").returncode == 1

    def test_bad_scan_spec(self):
        assert run_cli("c-constant", "--scan", "nonsense").returncode == 1
        assert run_cli("c-constant", "--scan", "2:1:5").returncode == 1


class TestGlobalContract:
    def test_unknown_command_is_usage_error(self):
        assert run_cli("frobnicate").returncode == 1

    def test_bad_threads(self):
        assert run_cli("gamma", "--mass", "2.0", "--threads", "0").returncode == 1

    def test_json_stdout_clean_despite_diagnostics(self):
        proc = run_cli("gamma", "--scan", "1.0:2.0:4", "--format", "json")
        json.loads(proc.stdout)  # must parse as a single document
        assert proc.stderr != ""
