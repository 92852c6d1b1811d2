import json
import subprocess
import sys

import pytest

from bihv.cli import main


@pytest.fixture
def run(tmp_path, capsys):
    def go(*argv):
        code = main(["--out", str(tmp_path / "out"), *argv])
        out = capsys.readouterr()
        return code, out.out, out.err
    go.out = tmp_path / "out"
    go.tmp = tmp_path
    return go


def test_check_all(run):
    code, out, _ = run("check", "--all")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 25 and lines[-1] == "24/24 identities pass"
    report = json.loads((run.out / "check" / "all" / "report.json").read_text())
    assert report["passed"] and len(report["verdicts"]) == 24


def test_check_single(run):
    code, out, _ = run("check", "P0")
    assert code == 0 and "ratio 1" in out


def test_check_unknown(run):
    code, _, err = run("check", "nosuch")
    assert code == 2 and "nosuch" in err


def test_check_needs_names(run):
    assert run("check")[0] == 2


def test_check_failure_exit_code(run, tmp_path, monkeypatch):
    import shutil
    from bihv.catalog.registry import Corpus
    target = tmp_path / "corpus"
    shutil.copytree(Corpus().directory, target)
    (target / "Lm20.poly").write_text("4*(n1 - 1)*psi*(n1*psi + 3*tau*phi) + (1 + phi^2)*(9*tau^2 - 5*Lm2)\n")
    code, out, _ = run("--corpus", str(target), "check", "Lm20")
    assert code == 1 and "FAIL" in out


def test_eliminate_builtin(run):
    code, out, _ = run("eliminate", "--builtin", "taup4", "taup3", "--var", "tau")
    assert code == 0
    assert "f2: deg_tau = 2" in out and "f1: deg_tau = 1" in out and "f0: deg_tau = 0" in out
    for name in ("taup0-a", "taup0-b", "taup0-c"):
        assert f"factor {name}: divides f0" in out
    d = run.out / "eliminate" / "taup4-taup3"
    assert sorted(p.name for p in d.iterdir()) == ["f0.poly", "f1.poly", "f2.poly", "report.json"]
    from bihv.catalog.parser import parse_expr
    from bihv.rings import lambda_ring
    f0 = parse_expr((d / "f0.poly").read_text(), lambda_ring())
    assert len(f0) == 616 and f0.degree("tau") == 0


def test_eliminate_self_stops(run):
    f = run.tmp / "f.poly"
    f.write_text("tau^3*phi + psi*tau - 1\n")
    code, out, _ = run("eliminate", str(f), str(f))
    assert code == 0 and "f2 = 0" in out


def test_eliminate_syntax_error_has_location(run):
    bad = run.tmp / "bad.poly"
    bad.write_text("tau^2\n + 3 phi\n")
    good = run.tmp / "good.poly"
    good.write_text("tau - 1\n")
    code, _, err = run("eliminate", str(bad), str(good))
    assert code == 2 and "line 2, column 6" in err


def test_eliminate_missing_file(run):
    assert run("eliminate", "nope.poly", "nope2.poly")[0] == 2


def test_chain_files(run):
    code, out, _ = run("chain", "--n1", "2", "--kmax", "3")
    assert code == 0
    d = run.out / "chain" / "n1-2-kmax-3"
    assert sorted(p.name for p in d.glob("P*.poly")) == ["P0.poly", "P1.poly", "P2.poly", "P3.poly"]
    assert "ratio 1" in out


def test_chain_p0_only(run):
    code, out, _ = run("chain", "--n1", "1", "--kmax", "0")
    assert code == 0
    assert [p.name for p in (run.out / "chain" / "n1-1-kmax-0").glob("P*.poly")] == ["P0.poly"]
    assert "proportional" in out


def test_chain_negative_kmax(run):
    assert run("chain", "--n1", "1", "--kmax", "-1")[0] == 2


def test_chain_size_guard(run):
    assert run("chain", "--n1", "3", "--kmax", "3", "--max-terms", "40")[0] == 3


def test_simulate_family(run):
    code, out, _ = run("simulate", "--k", "0", "--n1", "2", "--family", "k0", "--a", "1,-1",
                       "--c", "0,0", "--t0", "1", "--t1", "2", "--tol", "1e-6")
    assert code == 0 and "PASS" in out
    d = run.out / "simulate" / "k0-n1-2-K-0"
    header = (d / "trajectory.csv").read_text().splitlines()[0]
    assert header == "t,lm1,lm2,mu1,mu2,tau,P0,P1,P2,P3,odetau"


def test_simulate_const(run):
    code, out, _ = run("simulate", "--const", "--n1", "3", "--k", "1")
    assert code == 0
    report = json.loads((run.out / "simulate" / "const-n1-3-K-1" / "report.json").read_text())
    assert all(v == 0 for v in report["residual_max"].values())


def test_simulate_no_constant_solution(run):
    assert run("simulate", "--const", "--n1", "4", "--k", "1")[0] == 2


def test_simulate_missing_init(run):
    code, _, err = run("simulate", "--init", str(run.tmp / "missing.json"))
    assert code == 2 and "not found" in err


def test_simulate_schema_violation(run):
    doc = run.tmp / "bad.json"
    doc.write_text(json.dumps({"n1": 2, "t1": 1, "state": [1, 2, 3, 4], "extra": 1}))
    code, _, err = run("simulate", "--init", str(doc))
    assert code == 2 and "schema" in err


def test_simulate_json_family(run):
    doc = run.tmp / "fam.json"
    doc.write_text(json.dumps({"n1": 2, "K": "-1", "t0": 0, "t1": 1, "label": "km1",
                               "family": {"a": [2, -2], "c": ["-inf", "-inf"]}}))
    code, out, _ = run("simulate", "--init", str(doc))
    assert code == 0, out
    assert (run.out / "simulate" / "km1" / "trajectory.csv").exists()


def test_simulate_blowup_exit_3(run):
    doc = run.tmp / "blow.json"
    doc.write_text(json.dumps({"n1": 1, "K": 0, "t1": 2, "lm": [0], "mu": [1], "label": "blow"}))
    code, _, err = run("simulate", "--init", str(doc))
    assert code == 3 and "blow-up" in err
    rows = (run.out / "simulate" / "blow" / "trajectory.csv").read_text().splitlines()
    assert len(rows) > 2


def test_simulate_off_variety_fails(run):
    doc = run.tmp / "off.json"
    doc.write_text(json.dumps({"n1": 2, "K": 0, "t1": 0.5, "lm": [0.5, 0.1], "mu": [0.3, -0.2],
                               "label": "off"}))
    assert run("simulate", "--init", str(doc))[0] == 1


def test_simulate_random_family_is_seeded(run):
    args = ("simulate", "--k", "1", "--n1", "3", "--family", "random")
    assert run("--seed", "5", "--label", "a", *args)[0] == 0
    assert run("--seed", "5", "--label", "b", *args)[0] == 0
    a = (run.out / "simulate" / "a" / "report.json").read_text()
    b = (run.out / "simulate" / "b" / "report.json").read_text()
    assert a == b


def test_reports_are_byte_identical(run):
    run("--label", "one", "eliminate", "--builtin", "taup4", "taup3")
    run("--label", "two", "eliminate", "--builtin", "taup4", "taup3")
    for name in ("report.json", "f0.poly", "f1.poly", "f2.poly"):
        one = (run.out / "eliminate" / "one" / name).read_bytes()
        assert one == (run.out / "eliminate" / "two" / name).read_bytes()


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bihv.cli", "--out", str(tmp_path), "check", "P0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
