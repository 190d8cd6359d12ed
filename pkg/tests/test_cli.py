import json
import subprocess
import sys

import pytest

from extcalc.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, bundled_scenarios, main
from extcalc.verify import SUITES, from_json, parse_scenario, run_scenario, to_json, to_text

BUNDLED = ("flat-euclidean", "lorentz", "polar", "sphere-patch", "toy-torsion")

SMALL = """
name = small
dim = 2
points = 8
domain.x1 = (0.5, 2)
domain.x2 = (-1, 1)
[metric]
signature = (2, 0)
g[1][1] = 1
g[2][2] = x1^2
[connection]
levi_civita = true
[suites]
run = covariant, hodge
"""


@pytest.fixture
def small(tmp_path):
    p = tmp_path / "small.scn"
    p.write_text(SMALL)
    return p


class TestExitCodes:
    def test_pass(self, small, capsys):
        assert main(["verify", "--scenario", str(small)]) == EXIT_PASS
        doc = json.loads(capsys.readouterr().out)
        assert doc["summary"]["pass"] is True
        assert {s["suite"] for s in doc["summary"]["suites"]} == {"covariant", "hodge"}

    def test_fail_on_fault(self, tmp_path, capsys):
        p = tmp_path / "f.scn"
        p.write_text(SMALL.replace("points = 8", "points = 8\nfault = hodge"))
        assert main(["verify", "--scenario", str(p), "--format", "text"]) == EXIT_FAIL
        out = capsys.readouterr().out
        assert out.splitlines()[-1] == "FAIL hodge"
        assert "PASS covariant" in out

    def test_parse_error(self, tmp_path, capsys):
        p = tmp_path / "bad.scn"
        p.write_text(SMALL.replace("x1^2", "sin(x3)"))
        assert main(["verify", "--scenario", str(p)]) == EXIT_INPUT
        assert "line 10, column 15" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["verify", "--scenario", str(tmp_path / "nope.scn")]) == EXIT_INPUT
        assert main(["verify", "--scenario", "bundled:nope"]) == EXIT_INPUT

    def test_bad_points(self, small):
        assert main(["verify", "--scenario", str(small), "--points", "0"]) == EXIT_INPUT

    def test_bad_suite_option(self, small):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--scenario", str(small), "--suites", "hodge,nope"])
        assert info.value.code == 2

    def test_module_entry_point(self, small):
        res = subprocess.run([sys.executable, "-m", "extcalc", "verify", "--scenario", str(small),
                              "--format", "text"], capture_output=True, text=True, check=False)
        assert res.returncode == 0
        assert res.stdout.startswith("# scenario small")


class TestOptions:
    def test_overrides_reach_header(self, small, capsys):
        main(["verify", "--scenario", str(small), "--points", "5", "--seed", "7", "--suites", "hodge"])
        doc = json.loads(capsys.readouterr().out)
        assert (doc["header"]["points"], doc["header"]["seed"]) == (5, 7)
        assert {r["suite"] for r in doc["suites"]} == {"hodge"}
        assert all(r["points"] == 5 for r in doc["suites"])

    def test_tolerance_override(self, small, capsys):
        assert main(["verify", "--scenario", str(small), "--tol-first", "1e-30", "--suites", "covariant"]) == EXIT_FAIL
        doc = json.loads(capsys.readouterr().out)
        assert all(r["tol"] == 1e-30 for r in doc["suites"] if r["tier"] == "first")

    def test_listings(self, capsys):
        assert main(["list-suites"]) == EXIT_PASS
        assert capsys.readouterr().out.split() == list(SUITES)
        assert main(["list-scenarios"]) == EXIT_PASS
        assert tuple(n[:-4] for n in capsys.readouterr().out.split()) == BUNDLED
        assert [p.name[:-4] for p in bundled_scenarios()] == list(BUNDLED)


class TestReports:
    def test_schema(self, small):
        doc = json.loads(to_json(run_scenario(parse_scenario(SMALL))))
        assert {"seed", "version", "conventions"} <= set(doc["header"])
        for r in doc["suites"]:
            assert {"id", "eq", "points", "max_residual", "tol", "pass"} <= set(r)
        assert len(doc["suites"]) >= 1

    def test_json_round_trip(self):
        r = run_scenario(parse_scenario(SMALL))
        text = to_json(r)
        back = from_json(text)
        assert to_json(back) == text
        assert [c.id for c in back.results] == [c.id for c in r.results]
        assert back.passed == r.passed

    def test_round_trip_with_failure(self):
        r = run_scenario(parse_scenario(SMALL.replace("x1^2", "x1^2 - 1")))
        back = from_json(to_json(r))
        assert not back.passed
        assert to_json(back) == to_json(r)

    def test_evaluation_error_reports_point(self):
        sc = parse_scenario(SMALL.replace("x1^2", "sqrt(x1 - 1)"))
        r = run_scenario(sc)
        assert not r.passed
        bad = [c for c in r.results if not c.passed]
        assert all(c.error for c in bad)
        assert any(c.worst_point is not None and c.worst_point[0] <= 1.0 for c in bad)
        assert json.loads(to_json(r))["suites"][0]["max_residual"] is None

    def test_text_one_line_per_suite(self):
        r = run_scenario(parse_scenario(SMALL))
        lines = [l for l in to_text(r).splitlines() if not l.startswith(("#", " "))]
        assert [l.split()[1] for l in lines[:-1]] == ["covariant:", "hodge:"]
        assert lines[-1] == "PASS"

    def test_out_file_matches_stdout(self, small, tmp_path, capsys):
        main(["verify", "--scenario", str(small)])
        stdout = capsys.readouterr().out
        out = tmp_path / "r.json"
        main(["verify", "--scenario", str(small), "--out", str(out)])
        assert out.read_text() == stdout
        assert capsys.readouterr().out == ""


class TestCorpus:
    def test_bundled_corpus_passes(self, corpus_run):
        assert set(corpus_run) == set(BUNDLED)
        for name, (code, _, _) in corpus_run.items():
            assert code == EXIT_PASS, name

    def test_repeat_is_byte_identical(self, corpus_run, tmp_path):
        for name in ("polar", "toy-torsion", "sphere-patch"):
            out = tmp_path / f"{name}.json"
            main(["verify", "--scenario", f"bundled:{name}", "--out", str(out)])
            assert out.read_bytes() == corpus_run[name][2], name

    def test_every_identity_is_nontrivial_somewhere(self, corpus_run):
        """Each explicit two-sided check sees nonzero values in at least one scenario."""
        from extcalc.cli import _load
        from extcalc import fields as F
        from extcalc.verify.runner import sample_points
        from extcalc.verify.suites import Workbench
        seen = {}
        for name in BUNDLED:
            sc = _load(f"bundled:{name}")
            sc.points = 8
            wb = Workbench(sc)
            ctx = F.EvalContext(sample_points(sc))
            for suite in sc.suites:
                for chk in SUITES[suite][0](wb):
                    if chk.rhs is None or not isinstance(chk.lhs, F.Field):
                        continue
                    size = max(abs(chk.lhs.values(ctx)).max(initial=0), abs(chk.rhs.values(ctx)).max(initial=0))
                    seen[chk.id] = max(seen.get(chk.id, 0.0), float(size))
        assert seen
        flat = [k for k, v in seen.items() if v < 1e-12]
        assert flat == [], flat


class TestNegativeControls:
    def test_each_suite_has_a_control(self, negative_runs):
        assert {f"fault-{s}" for s in SUITES} <= set(negative_runs)

    @pytest.mark.parametrize("suite", list(SUITES))
    def test_fails_exactly_its_suite(self, negative_runs, suite):
        code, doc = negative_runs[f"fault-{suite}"]
        assert code == EXIT_FAIL
        failed = [s["suite"] for s in doc["summary"]["suites"] if not s["pass"]]
        assert failed == [suite]

    def test_incompatible_connection(self, negative_runs):
        code, doc = negative_runs["incompatible-gamma"]
        assert code == EXIT_FAIL
        failed = {s["suite"] for s in doc["summary"]["suites"] if not s["pass"]}
        assert failed == {"compatibility"}
        mcd1 = next(r for r in doc["suites"] if r["id"] == "MCD.1")
        assert not mcd1["pass"] and mcd1["max_residual"] > 1e-3
