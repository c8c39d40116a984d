"""Command-line interface: parsing, exit codes, determinism."""

import json

import pytest

from detline.cli import main, parse_loop, parse_monomial2
from detline.errors import ParseError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_parse_monomial_roundtrip():
    m = parse_monomial2("(2,-1)*z1^3*z2^-2")
    assert (m.mu, m.a, m.b) == (2 - 1j, 3, -2)
    assert parse_monomial2("(2,0)").a == 0
    assert parse_monomial2("z1").a == 1
    with pytest.raises(ParseError):
        parse_monomial2("(0,0)*z1")
    with pytest.raises(ParseError):
        parse_monomial2("nope")


def test_parse_loop():
    u = parse_loop("(1,0)*z^2")
    assert u.is_monomial and u.n == 2
    v = parse_loop("(2,0):(1,0)@0")
    assert not v.is_monomial
    with pytest.raises(ParseError):
        parse_loop("(1,0):(-1,0)@0")  # vanishes on the circle


def test_cocycle3_command(capsys):
    code, out = run(capsys, "cocycle3", "(2,0)", "(1,0)*z1", "(1,0)*z2")
    payload = json.loads(out)
    assert code == 0
    assert payload["value"]["re"] == pytest.approx(2.0)
    assert payload["agree"] is True

    code, out = run(capsys, "cocycle3", "(1,0)", "(1,0)", "(1,0)")
    assert code == 0 and json.loads(out)["value"]["re"] == pytest.approx(1.0)

    code, out = run(capsys, "cocycle3", "(2,0)*z1^-1", "(1,0)*z1", "(1,0)*z2")
    payload = json.loads(out)
    assert code == 0 and payload["closed_form"] is None and payload["agree"] is None


def test_parse_error_exit_code(capsys):
    code, _ = run(capsys, "cocycle3", "junk", "(1,0)", "(1,0)")
    assert code == 2


def test_pair_command(capsys):
    code, out = run(capsys, "pair", "(1,0)*z1", "(1,0)*z2", "(2,0)")
    payload = json.loads(out)
    assert code == 0
    assert payload["pairing"]["re"] == pytest.approx(2.0)
    assert payload["class_rep"]["re"] == pytest.approx(2.0)

    code, out = run(capsys, "pair", "(2,0)", "(3,0)", "(4,0)")
    assert code == 0 and json.loads(out)["pairing"]["re"] == pytest.approx(1.0)


def test_tame_command(capsys):
    code, out = run(capsys, "tame", "z", "(2,0)", "--numeric", "48", "--qpoints", "2048")
    payload = json.loads(out)
    assert code == 0
    assert payload["convention_exponent"] in (-1, 1)
    assert payload["integral_formula"]["re"] == pytest.approx(0.5, rel=1e-6)


def test_verify_command_and_determinism(capsys):
    code1, out1 = run(capsys, "verify", "--suite", "bipolar", "--trials", "4", "--seed", "3")
    code2, out2 = run(capsys, "verify", "--suite", "bipolar", "--trials", "4", "--seed", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["passed"] and payload["seed"] == 3

    code, out = run(capsys, "verify", "--suite", "torsion", "--trials", "0", "--seed", "1")
    assert code == 0  # vacuous pass


def test_cross_process_determinism():
    import subprocess
    import sys

    cmd = [sys.executable, "-m", "detline.cli", "verify", "--suite", "cocycle", "--trials", "3", "--seed", "12"]
    a = subprocess.run(cmd, capture_output=True, text=True)
    b = subprocess.run(cmd, capture_output=True, text=True)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
