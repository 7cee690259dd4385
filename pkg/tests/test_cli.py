import json
import re

import pytest

from sylowtower.cli import main

from cli_cases import SAMPLES


@pytest.fixture
def run(monkeypatch, capsys):
    monkeypatch.chdir(SAMPLES)

    def go(*argv):
        code = main(list(argv))
        out = capsys.readouterr()
        return code, out.out, out.err

    return go


def test_sylow_count_on_inverted_example(run):
    code, out, _ = run("sylow-count", "example.json", "--prime", "2")
    assert code == 0 and out.strip() == "1"


def test_normality_reports_level_two(run):
    code, out, _ = run("normality", "example.json", "--prime", "2", "--json")
    rep = json.loads(out)
    assert code == 0
    m = rep["maps"][0] if "maps" in rep else rep
    assert m["status"] == "obstructed"
    assert [o["level"] for o in m["obstructions"]] == [2]


def test_decompose_bz6(run):
    code, out, _ = run("decompose", "bz6.json", "--json")
    assert code == 0 and len(json.loads(out)["factors"]) == 2


def test_cohomology_of_trivial_group(run):
    code, out, _ = run("cohomology", "--group", "trivial", "--module", "trivial:7", "--degree", "2")
    assert code == 0 and out.strip() == "0"
    code, out, _ = run("cohomology", "--group", "cyclic:2", "--module", "trivial:2", "--degree", "3")
    assert out.strip() == "Z/2"


def test_validate_and_run(run):
    code, out, _ = run("validate", "s3.json")
    assert code == 0 and "valid" in out
    code, out, _ = run("run", "s3.json", "--json")
    assert code == 0
    assert len(json.loads(out)["results"]) == 6


def test_burnside(run):
    code, out, _ = run("burnside", "fibration.json", "--prime", "2", "--json")
    assert code == 0
    assert "five" in out and "gamma" in out


ERROR = re.compile(r"^error\[(user-input|capacity|theory-violation)\] at \S.*: .+ \(hint: .+\)$")


@pytest.mark.parametrize("argv,where", [
    (("sylow-count", "example.json", "--prime", "4"), "--prime"),
    (("sylow-count", "missing.json", "--prime", "2"), "missing.json"),
    (("decompose", "example.json"), "K(Z/3,2)//Z2"),
    (("factor", "s3.json", "--map", "nope", "--prime", "2"), "s3.json#/maps"),
    (("sylow", "s3.json", "--prime", "2", "--tower", "Z"), "s3.json#/towers"),
    (("cohomology", "--group", "bogus:3", "--module", "trivial:2", "--degree", "1"), "groups"),
    (("frobnicate",), "<command line>"),
])
def test_errors_carry_class_location_hint(run, argv, where):
    code, out, err = run(*argv)
    assert code == 1
    line = err.strip().splitlines()[-1]
    assert ERROR.match(line), line
    assert where in line


def test_error_json(run):
    code, out, err = run("decompose", "example.json", "--json")
    assert code == 1
    e = json.loads(out)["error"]
    assert e["class"] == "user-input" and e["location"] and e["hint"]


def test_capacity_exit_code(run, monkeypatch):
    monkeypatch.setenv("SYLOWTOWER_MAX_DEGREE", "2")
    code, _, err = run("cohomology", "--group", "sym:3", "--module", "trivial:2", "--degree", "3")
    assert code == 2 and err.startswith("error[capacity]")


def test_bad_environment_value(run, monkeypatch):
    monkeypatch.setenv("SYLOWTOWER_MAX_CELLS", "lots")
    code, _, err = run("cohomology", "--group", "sym:3", "--module", "trivial:2", "--degree", "1")
    assert code == 1 and "env:SYLOWTOWER_MAX_CELLS" in err


def test_selftest(run):
    code, out, _ = run("selftest")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.strip().splitlines())
