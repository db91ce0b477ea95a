import csv
import io
import json
import os
from pathlib import Path

import pytest

from gfp_lab import cli, gfp
from gfp_lab.polycore import Polynomial

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("GFP_LAB_REGEN_GOLDEN") == "1"

CASES = {
    "registry.json": ["registry"],
    "registry_all.csv": ["registry", "--all", "--format", "csv"],
    "classify_fibonacci.json": ["classify", "--family", "fibonacci"],
    "classify_fermat.json": ["classify", "--family", "Fermat", "--n", "6"],
    "walk_16_-14.json": ["walk", "--c", "16", "--h", "-14"],
    "generator_-1_8.json": ["generator", "--c", "-1", "--k", "8", "--rows", "4"],
    "ergodicity_8_-3.json": ["ergodicity", "--c", "8", "--h", "-3"],
    "km_16_-14.json": ["km", "--c", "16", "--h", "-14", "--i", "0", "--j", "0", "--n", "10",
                       "--oracle", "power"],
    "roots_fermat_3.json": ["roots", "--family", "fermat", "--n", "3"],
    "expand_pell_6.json": ["expand", "--family", "pell", "--n", "6"],
    "gram_cheb1_3.csv": ["gram", "--family", "chebyshevT", "--n", "3"],
    "simulate_small.csv": ["simulate", "--trials", "20000", "--seed", "42"],
}


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, out=buf)
    return code, buf.getvalue()


def _parse(name, text):
    if name.endswith(".json"):
        return json.loads(text)
    return [[_num(c) for c in row] for row in csv.reader(io.StringIO(text))]


def _num(cell):
    try:
        return int(cell)
    except ValueError:
        pass
    try:
        return float(cell)
    except ValueError:
        return cell


def _same(a, b):
    # exact for strings and integers; floats may differ in the last few ulps across BLAS builds
    if isinstance(a, float) or isinstance(b, float):
        return isinstance(a, (int, float)) and isinstance(b, (int, float)) and abs(a - b) <= 1e-12 * max(1, abs(b))
    if isinstance(a, dict):
        return isinstance(b, dict) and a.keys() == b.keys() and all(_same(a[k], b[k]) for k in a)
    if isinstance(a, list):
        return isinstance(b, list) and len(a) == len(b) and all(map(_same, a, b))
    return type(a) is type(b) and a == b


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = run(CASES[name])
    assert code == 0
    path = GOLDEN / name
    if REGEN:
        path.write_text(text)
    assert _same(_parse(name, text), _parse(name, path.read_text()))


def test_registry_rows():
    rows = json.loads(run(["registry"])[1])
    assert len(rows) == 13
    assert rows[0]["name"] == "Fibonacci" and rows[-1]["name"] == "Vieta-Lucas"
    assert len(json.loads(run(["registry", "--all"])[1])) == 15


def test_classify_fibonacci():
    out = json.loads(run(["classify", "--family", "fibonacci"])[1])
    assert out["verdict"] == "NotOrthogonal"
    assert out["criterion"] == "linear_d_positive_g"


def test_walk_sixteen():
    out = json.loads(run(["walk", "--c", "16", "--h", "-14"])[1])
    assert out["matrix"][0][:2] == ["7/8", "1/8"]
    assert out["matrix"][1][:3] == ["1/16", "7/8", "1/16"]
    assert out["pi"][0] == "1" and set(out["pi"][1:]) == {"2"}
    assert out["ergodicity"]["verdict"] == "NotErgodic"


def test_km_power_agrees():
    rows = json.loads(run(["km", "--c", "16", "--h", "-14", "--n", "10", "--oracle", "power"])[1])
    assert [r["method"] for r in rows] == ["KarlinMcGregor", "MatrixPower"]
    assert abs(rows[0]["value"] - rows[1]["value"]) < 1e-12


def test_km_continuous_expm():
    rows = json.loads(run(["km", "--c", "-2", "--k", "4", "--t", "0.5", "--oracle", "expm"])[1])
    assert abs(rows[0]["value"] - rows[1]["value"]) < 1e-6


def test_simulate_deterministic():
    a = run(["simulate", "--trials", "5000", "--seed", "3"])[1]
    b = run(["simulate", "--trials", "5000", "--seed", "3"])[1]
    assert a == b
    rows = list(csv.DictReader(io.StringIO(a)))
    assert sum(int(r["count"]) for r in rows) == 5000


def test_floats_round_trip():
    out = json.loads(run(["binet", "--family", "fibonacci", "--n", "10", "--x", "1"])[1])
    assert out["binet"]["re"] == pytest.approx(55, abs=1e-9)
    assert float(repr(out["binet"]["re"])) == out["binet"]["re"]


@pytest.mark.parametrize("name", ["Fermat-Lucas", "Pell", "Jacobsthal", "Vieta"])
def test_json_round_trip_as_input(name, tmp_path):
    out = json.loads(run(["generate", "--family", name, "--n", "5"])[1])
    spec = json.dumps(out["family"])
    again = json.loads(run(["generate", "--family", spec, "--n", "5"])[1])
    assert again == out
    f = tmp_path / "fam.json"
    f.write_text(spec)
    assert json.loads(run(["generate", "--family-file", str(f), "--n", "5"])[1]) == out
    fam = gfp.lookup(name)
    assert [Polynomial(t) for t in out["terms"]] == [gfp.term(fam, n) for n in range(6)]


@pytest.mark.parametrize("argv", [
    ["registry", "--bogus"],
    ["walk", "--c", "16"],
    ["km", "--c", "16", "--h", "-14", "--k", "8", "--n", "1"],
    ["classify", "--family", "fibonacci", "--family-file", "x.json"],
    ["walk", "--c", "abc", "--h", "0"],
    ["registry", "--format", "xml"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert run(argv)[0] == 2


@pytest.mark.parametrize("argv,needle", [
    (["walk", "--c", "16", "--h", "1"], "h <= 0"),
    (["generator", "--c", "-1", "--k", "2"], "GeneratorAxiomViolation"),
    (["generator", "--c", "1", "--k", "8"], "c < 0"),
    (["classify", "--family", "tribonacci"], "tribonacci"),
    (["roots", "--family", "fibonacci", "--n", "1"], "NoRootsFound"),
    (["km", "--c", "16", "--h", "-14"], "--n"),
    (["km", "--c", "16", "--h", "-14", "--n", "2", "--oracle", "expm"], "continuous"),
    (["generate", "--family", "{not json", "--n", "2"], ""),
    (["generate", "--family-file", "/nonexistent/fam.json", "--n", "2"], "cannot read"),
])
def test_precondition_errors_exit_two(argv, needle, capsys):
    code, out = run(argv)
    assert code == 2 and out == ""
    assert needle in capsys.readouterr().err


def test_internal_error_exit_one(monkeypatch, capsys):
    def boom(args):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "cmd_registry", boom)
    assert run(["registry"])[0] == 1
    assert "internal error" in capsys.readouterr().err


def test_help_lists_every_flag(capsys):
    parser = cli.build_parser()
    sub = next(a for a in parser._actions if a.choices and "walk" in a.choices)
    assert set(sub.choices) == {"generate", "expand", "binet", "roots", "classify", "gram", "walk",
                                "generator", "km", "simulate", "ergodicity", "registry"}
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for flag in action.option_strings:
                assert flag in text, (name, flag)
    assert run(["--help"])[0] == 0
    assert "walk" in capsys.readouterr().out


@pytest.mark.parametrize("fmt", ["json", "csv", "table"])
def test_every_format_renders(fmt):
    for argv in (["registry"], ["walk", "--c", "8", "--h", "-3"], ["gram", "--family", "fermat", "--n", "3"],
                 ["km", "--c", "16", "--h", "-14", "--n", "3"], ["roots", "--family", "lucas", "--n", "4"]):
        code, text = run(argv + ["--format", fmt])
        assert code == 0 and text.strip()
