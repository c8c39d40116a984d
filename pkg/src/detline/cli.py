"""Command-line front end: batch evaluation and JSON verification reports.

Exit codes: 0 success, 1 verification failure/mismatch, 2 invalid input,
3 numerical instability (window certification failed).
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import circle as ci
from . import cocycle3 as c3
from .errors import DetlineError, ParseError, Unstable
from .torus import Monomial2
from .verify import run_suite

_SCALAR = r"\(\s*(-?[\d.eE+]+)\s*,\s*(-?[\d.eE+-]+)\s*\)"


def _num(z: complex) -> dict:
    return {"re": float(f"{z.real:.17g}"), "im": float(f"{z.imag:.17g}")}


def _dump(payload) -> None:
    json.dump(payload, sys.stdout, sort_keys=True, separators=(",", ":"))
    sys.stdout.write("\n")


def parse_scalar(text: str) -> complex:
    m = re.fullmatch(_SCALAR, text.strip())
    if m:
        return complex(float(m.group(1)), float(m.group(2)))
    try:
        return complex(float(text))
    except ValueError as exc:
        raise ParseError(f"bad scalar {text!r}") from exc


def parse_monomial2(text: str) -> Monomial2:
    """Parse "(re,im)*z1^a*z2^b"; the scalar and either factor may be absent."""
    parts = [p.strip() for p in text.strip().split("*") if p.strip()]
    if not parts:
        raise ParseError("empty monomial")
    mu, a, b = 1.0 + 0.0j, 0, 0
    seen_scalar = False
    for p in parts:
        m = re.fullmatch(r"z1(?:\^(-?\d+))?", p)
        if m:
            a += int(m.group(1) or 1)
            continue
        m = re.fullmatch(r"z2(?:\^(-?\d+))?", p)
        if m:
            b += int(m.group(1) or 1)
            continue
        if seen_scalar:
            raise ParseError(f"unexpected factor {p!r} in {text!r}")
        mu = parse_scalar(p)
        seen_scalar = True
    if mu == 0:
        raise ParseError("monomial scalar must be nonzero")
    return Monomial2(mu, a, b)


def format_monomial2(m: Monomial2) -> str:
    return f"({m.mu.real:.17g},{m.mu.imag:.17g})*z1^{m.a}*z2^{m.b}"


def parse_loop(text: str) -> ci.Loop:
    """Parse "(re,im)*z^n" or a coefficient list "c0:c1:...@kmin"."""
    text = text.strip()
    if "@" in text or ":" in text:
        body, _, kmin = text.partition("@")
        k_min = int(kmin) if kmin else 0
        coeffs = [parse_scalar(c) for c in body.split(":") if c.strip()]
        if not coeffs:
            raise ParseError("empty coefficient list")
        try:
            return ci.Loop.laurent(coeffs, k_min)
        except DetlineError as exc:
            raise ParseError(str(exc)) from exc
    parts = [p.strip() for p in text.split("*") if p.strip()]
    mu, n = 1.0 + 0.0j, 0
    for p in parts:
        m = re.fullmatch(r"z(?:\^(-?\d+))?", p)
        if m:
            n += int(m.group(1) or 1)
        else:
            mu = parse_scalar(p)
    if mu == 0:
        raise ParseError("loop scalar must be nonzero")
    return ci.Loop.monomial(mu, n)


def cmd_cocycle3(args) -> int:
    g = parse_monomial2(args.g)
    h = parse_monomial2(args.h)
    k = parse_monomial2(args.k)
    value = c3.cocycle_c(g, h, k)
    payload = {
        "g": format_monomial2(g),
        "h": format_monomial2(h),
        "k": format_monomial2(k),
        "value": _num(value),
    }
    if min(g.a, g.b, h.a, h.b, k.a, k.b) >= 0:
        cf = c3.closed_form(g, h, k)
        agree = abs(value - cf) <= 1e-9 * max(abs(cf), 1e-300)
        payload["closed_form"] = _num(cf)
        payload["agree"] = bool(agree)
    else:
        payload["closed_form"] = None
        payload["agree"] = None
    _dump(payload)
    return 0 if payload["agree"] is not False else 1


def cmd_verify(args) -> int:
    report = run_suite(args.suite, args.trials, args.seed)
    _dump(report)
    return 0 if report["passed"] else 1


def cmd_pair(args) -> int:
    f = parse_monomial2(args.f)
    g = parse_monomial2(args.g)
    h = parse_monomial2(args.h)
    cyc = c3.HomologyCycle3.alternating(f, g, h)
    val = c3.pair_homology(cyc)
    _dump(
        {
            "pairing": _num(val),
            "class_rep": _num(c3.class_representative(val)),
        }
    )
    return 0


def cmd_tame(args) -> int:
    u = parse_loop(args.u)
    v = parse_loop(args.v)
    s = ci.convention_exponent(args.numeric)
    pairing = ci.steinberg_pairing(u, v, window_n=args.numeric)
    integral = ci.tame_symbol_formula(u, v, q_points=args.qpoints)
    _dump(
        {
            "determinant_pipeline": _num(pairing),
            "integral_formula": _num(integral),
            "convention_exponent": s,
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="detline",
        description="Determinant-line calculus: cocycles, pairings, tame symbols.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cocycle3", help="evaluate the 3-cochain on a monomial triple")
    p.add_argument("g")
    p.add_argument("h")
    p.add_argument("k")
    p.set_defaults(fn=cmd_cocycle3)

    p = sub.add_parser("verify", help="run a seeded property suite")
    p.add_argument("--suite", required=True, choices=["torsion", "perturbation", "category", "cocycle", "bipolar"])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("pair", help="pair the cochain with the alternating 3-cycle")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("h")
    p.set_defaults(fn=cmd_pair)

    p = sub.add_parser("tame", help="compare the pairing with the tame-symbol integral")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--numeric", type=int, default=64, metavar="N")
    p.add_argument("--qpoints", type=int, default=4096, metavar="Q")
    p.set_defaults(fn=cmd_tame)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except Unstable as exc:
        print(f"window instability: {exc}", file=sys.stderr)
        return 3
    except DetlineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
