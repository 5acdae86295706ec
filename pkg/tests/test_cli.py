import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from fpabd import cli


def fx(name: str) -> str:
    return str(FIXTURES / name)


def call(*argv):
    report, code, text = cli.run(list(argv))
    # every report must survive the JSON encoder
    return json.loads(cli.emit_report(report)), code


class TestExitCodes:
    def test_positive(self):
        rep, code = call("sat", fx("rain.fp"))
        assert code == cli.EXIT_OK
        assert rep["verdict"] is True

    def test_negative(self):
        rep, code = call("entail", fx("rain.fp"), "--inline", "(>= (pr w) 1/5)")
        assert code == cli.EXIT_NEGATIVE
        assert rep["verdict"] is False
        assert rep["verified"] is True

    def test_missing_file(self, tmp_path):
        rep, code = call("sat", str(tmp_path / "absent.fp"))
        assert code == cli.EXIT_INPUT
        assert rep["error"] == "input error"

    def test_parse_error(self, tmp_path):
        bad = tmp_path / "bad.fp"
        bad.write_text("vars: p;\ntheory { (pr q) }\n")
        rep, code = call("sat", str(bad))
        assert code == cli.EXIT_INPUT
        assert "undeclared" in rep["detail"]

    def test_usage_error(self):
        assert cli.run(["bogus"])[1] == cli.EXIT_INPUT

    def test_variable_limit(self):
        rep, code = call("--max-vars", "2", "sat", fx("rain.fp"))
        assert code == cli.EXIT_LIMIT
        assert rep["error"] == "resource limit"

    def test_time_budget(self):
        rep, code = call("--budget", "200", "recognize", fx("rain.fp"), "--kind", "cem", "--solution", fx("theta_rain.fp"))
        assert code == cli.EXIT_LIMIT

    def test_wrong_problem_type(self):
        rep, code = call("recognize", fx("pqr.fp"), "--kind", "sufficient", "--solution", fx("eta_rain.fp"))
        assert code == cli.EXIT_INPUT


class TestReports:
    def test_classify_rain_prime(self):
        rep, code = call("classify", fx("rain_prime.fp"))
        assert code == cli.EXIT_OK
        assert rep["is_CIP"] is True
        assert rep["is_SPCF_AP"] is False

    def test_cem_entropy(self):
        rep, code = call("recognize", fx("rain.fp"), "--kind", "cem", "--solution", fx("theta_rain.fp"), "--hunt-granularity", "4")
        assert code == cli.EXIT_NEGATIVE
        assert rep["entropy"] == 1.685
        assert "theory formula 3" in rep["reason"]

    def test_minimal_defeater(self, tmp_path):
        rep, code = call("recognize", fx("rain.fp"), "--kind", "minimal", "--solution", fx("eta_rain.fp"))
        assert code == cli.EXIT_NEGATIVE
        assert "weaker" in rep["reason"]
        # the defeater is itself a sufficient solution
        weaker = tmp_path / "weaker.fp"
        weaker.write_text(rep["defeater"] + "\n")
        rep2, code2 = call("recognize", fx("rain.fp"), "--kind", "sufficient", "--solution", str(weaker))
        assert code2 == cli.EXIT_OK

    def test_prap_exists(self):
        rep, code = call("prap", "exists", fx("pqr.fp"))
        assert code == cli.EXIT_OK
        assert rep["solution"] == "p"

    def test_prap_preferred_negative(self):
        rep, code = call("prap", "preferred", fx("pqr.fp"), "--term", "(and q r)")
        assert code == cli.EXIT_NEGATIVE

    def test_solve_none(self):
        rep, code = call("solve", fx("rain_prime.fp"), "--mode", "sufficient")
        assert code == cli.EXIT_NEGATIVE
        assert rep["verdict"] == "none"

    def test_text_mode(self):
        report, code, text = cli.run(["--text", "classify", fx("traffic.fp")])
        out = cli.emit_report(report, text)
        assert "is_SPCF_AP: True" in out.splitlines()

    def test_timings_opt_in(self):
        rep, _ = call("sat", fx("rain.fp"))
        assert "timings" not in rep
        rep, _ = call("--timings", "sat", fx("rain.fp"))
        assert rep["timings"]["total_ms"] >= 0


class TestLoop:
    @pytest.mark.parametrize("problem, mode, kind", [("rain.fp", "full", "full"), ("traffic.fp", "sufficient", "sufficient")])
    def test_solution_recognized(self, tmp_path, problem, mode, kind):
        rep, code = call("solve", fx(problem), "--mode", mode)
        assert code == cli.EXIT_OK
        assert rep["verified"] is True
        sol = tmp_path / "solution.fp"
        sol.write_text(rep["solution"] + "\n")
        rep2, code2 = call("recognize", fx(problem), "--kind", kind, "--solution", str(sol))
        assert code2 == cli.EXIT_OK
        assert rep2["verdict"] is True

    def test_generated_problem_loads(self, tmp_path):
        out = tmp_path / "gen.fp"
        rep, code = call("--seed", "5", "harness", "gen", "--fragment", "SPCF", "--vars", "4", "--event-class", "CP", "--out", str(out))
        assert code == cli.EXIT_OK
        rep2, _ = call("classify", str(out))
        assert rep2["is_SPCF_AP"] is True


class TestConsoleScript:
    def _run(self, *argv):
        return subprocess.run([sys.executable, "-m", "fpabd.cli", *argv], capture_output=True, text=True)

    def test_byte_identical(self):
        a = self._run("solve", fx("rain.fp"), "--mode", "full")
        b = self._run("solve", fx("rain.fp"), "--mode", "full")
        assert a.returncode == 0
        assert a.stdout == b.stdout

    def test_exit_code_propagates(self):
        res = self._run("entail", fx("rain.fp"), "--inline", "(>= (pr w) 1/5)")
        assert res.returncode == 1
        assert json.loads(res.stdout)["verdict"] is False
