import json
import subprocess
import sys

import pytest

from nvsc.cli import main
from nvsc.novikov import NovikovSeries, parse
from nvsc.superpotential import SurfaceSpec, build


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def exit_code(*argv):
    with pytest.raises(SystemExit) as e:
        main(list(argv))
    return e.value.code


def test_superpotential_f3_right(capsys):
    code, out, _ = run(capsys, "superpotential", "--surface", "f3", "--chamber", "right")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["series"]["terms"]) == 6
    W = NovikovSeries.from_dict(doc["series"])
    assert W == parse("x + y + T^{A+2B}/(x*y^3) + T^B/y + 2T^{A+B}/y^2 + T^A*x/y", W.cutoff)


def test_superpotential_text(capsys):
    code, out, _ = run(capsys, "superpotential", "--surface", "f0", "--text")
    assert code == 0 and out.strip() == str(parse("y + T^B/y + T^{A/2}*x + T^{A/2}/x", 20))


def test_output_is_deterministic(capsys):
    a = run(capsys, "superpotential", "--surface", "f4", "--cutoff", "12")[1]
    b = run(capsys, "superpotential", "--surface", "f4", "--cutoff", "12")[1]
    assert a == b


def test_usage_errors():
    assert exit_code("scatter", "--cutoff", "-1") == 2
    assert exit_code("scatter", "--cutoff", "abc") == 2
    assert exit_code("superpotential", "--surface", "f3", "--chamber", "f4_series") == 2
    assert exit_code("superpotential", "--surface", "f4", "--nuA", "1", "--nuB", "2") == 2
    assert exit_code("wallcross", "solve", "--src", "nonsense") == 2
    assert exit_code("nope") == 2


def test_env_settings(capsys, monkeypatch):
    monkeypatch.setenv("NVSC_CUTOFF", "5")
    doc = json.loads(run(capsys, "superpotential", "--surface", "f4")[1])
    assert doc["series"]["cutoff"] == "5"
    # flags beat the environment
    doc = json.loads(run(capsys, "superpotential", "--surface", "f4", "--cutoff", "7")[1])
    assert doc["series"]["cutoff"] == "7"
    monkeypatch.setenv("NVSC_NU_A", "3")
    doc = json.loads(run(capsys, "superpotential", "--surface", "f4")[1])
    assert doc["series"]["nu"] == {"A": "3", "B": "1"}
    monkeypatch.setenv("NVSC_CUTOFF", "x")
    assert exit_code("superpotential", "--surface", "f4") == 2


def test_out_file(capsys, tmp_path):
    p = tmp_path / "w.json"
    code, out, _ = run(capsys, "superpotential", "--surface", "f3", "--out", str(p))
    assert code == 0 and out == ""
    assert len(json.loads(p.read_text())["series"]["terms"]) == 6
    code, out, _ = run(capsys, "superpotential", "--surface", "f3", "--out", "-")
    assert json.loads(out) == json.loads(p.read_text())


def test_wallcross_solve(capsys):
    code, out, _ = run(capsys, "wallcross", "solve")
    assert code == 0
    assert json.loads(out)["coeffs"] == ["1", "0", "0", "0", "0", "0"]


def test_wallcross_solve_f2(capsys):
    code, out, _ = run(capsys, "wallcross", "solve", "--src", "f4_alt", "--dst", "f2",
                       "--monomial", "T^{A/2}*x/y", "--expx", "-1", "--expy", "-1", "--cutoff", "16")
    assert code == 0
    assert json.loads(out)["coeffs"] == ["1", "0", "0", "0", "0", "0"]


def test_wallcross_inconsistent(capsys):
    code, out, _ = run(capsys, "wallcross", "solve", "--src", "expr:x + y", "--dst", "expr:x + 2y")
    doc = json.loads(out)
    assert code == 1 and doc["ok"] is False and doc["error"] == "Inconsistent"


def test_wallcross_gluing(capsys):
    assert run(capsys, "wallcross", "gluing", "--cutoff", "10")[0] == 0
    assert run(capsys, "wallcross", "gluing", "--cutoff", "10", "--h", "1")[0] == 1


def test_scatter_svg_and_json(capsys):
    code, out, _ = run(capsys, "scatter", "--cutoff", "12")
    assert code == 0 and out.startswith("<svg")
    code, out, _ = run(capsys, "scatter", "--cutoff", "12", "--emit", "json")
    doc = json.loads(out)
    assert [0, -1] in [w["dir"] for w in doc["walls"]]
    code, out2, _ = run(capsys, "scatter", "--cutoff", "12", "--json")
    assert out2 == out


def test_scatter_chamber_and_limit(capsys):
    code, out, _ = run(capsys, "scatter", "chamber-w", "--k", "1", "--cutoff", "12", "--emit", "text")
    assert code == 0
    assert out.strip() == str(parse("y + T^B/y + T^A/y + T^{A/2}*x + T^{A/2+B}/(x*y^2)", 12))
    code, out, _ = run(capsys, "scatter", "limit", "--sign", "minus", "--cutoff", "8")
    assert code == 0
    W = NovikovSeries.from_dict(json.loads(out)["series"])
    assert W == build(SurfaceSpec("F4", "minus"), 8)


def test_enumerate(capsys):
    code, out, _ = run(capsys, "enumerate-classes", "--surface", "f3", "--index", "2", "--side", "right")
    assert code == 0
    doc = json.loads(out)
    names = {c["name"] for c in doc["classes"]}
    assert names == {"beta1", "beta2", "-beta2+phi", "-beta1+3beta2+sigma", "2beta2+sigma", "beta1+beta2+sigma"}
    assert doc["raw_only"]


def test_obstruction(capsys):
    code, out, _ = run(capsys, "obstruction", "--n", "2", "--points", "2")
    assert code == 0
    assert json.loads(out)["degree"] == [1, 1]


def test_obstruction_not_a_line():
    assert exit_code("obstruction", "--n", "1", "--points", "0") == 2


def test_critical_values_f0(capsys):
    code, out, _ = run(capsys, "critical-values", "--surface", "f0")
    assert code == 0
    vals = json.loads(out)["values"]
    assert vals == pytest.approx([-1.5, -0.5, 0.5, 1.5], abs=1e-8)


def test_verify_all(capsys):
    code, out, _ = run(capsys, "verify-all", "--cutoff", "12")
    rows = [l for l in out.splitlines() if l[:2].strip().isdigit()]
    assert len(rows) >= 12
    assert code == 0
    assert all("PASS" in r for r in rows)


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "nvsc.cli", "scatter", "--cutoff", "-1"],
                       capture_output=True, text=True)
    assert r.returncode == 2
