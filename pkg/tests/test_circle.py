"""Circle loops: winding, the restricted cocycle, pairings, tame symbols."""

import numpy as np
import pytest

from detline import circle as ci
from detline.errors import BranchJump, Uncertified
from detline.windows import certify_stable
from detline.errors import Unstable

Z = ci.Loop.monomial(1.0, 1)
ONE = ci.Loop.monomial(1.0, 0)


def test_winding_numbers():
    assert ci.winding_number(ci.Loop.monomial(2.0, 3)) == 3
    assert ci.winding_number(ci.Loop.laurent([2.0, 1.0], 0)) == 0
    assert ci.winding_number(ci.Loop.monomial(1 + 1j, 0)) == 0
    assert ci.winding_number(ci.Loop.laurent([1.0, 3.0], 0)) == 1


def test_nonvanishing_certificate():
    with pytest.raises(Uncertified):
        ci.Loop.laurent([1.0, -1.0], 0)  # vanishes at z = 1


def test_loop_product_and_symbols():
    u = ci.Loop.laurent([2.0, 1.0], 0)
    w = u * Z
    assert ci.winding_number(w) == 1
    coeffs, tail = ci.symbol_coeffs(Z, ONE, band=4)
    assert coeffs[1] == pytest.approx(1.0) and abs(coeffs[0]) < 1e-12
    assert tail < 1e-10


def test_monomial_cocycle_values():
    lam = ci.Loop.monomial(0.8 + 0.7j, 0)
    assert ci.cres_cocycle(Z, lam) == pytest.approx(1.0)
    assert ci.cres_cocycle(lam, Z) == pytest.approx(1.0 / lam.mu)
    assert ci.cres_cocycle(ONE, ONE) == pytest.approx(1.0)


def test_monomial_cocycle_relation():
    rng = np.random.default_rng(5)
    for _ in range(20):
        def rl():
            return ci.Loop.monomial(
                rng.uniform(0.5, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi)),
                int(rng.integers(-3, 4)),
            )

        a, b, c = rl(), rl(), rl()
        lhs = ci.cres_cocycle(a, b) * ci.cres_cocycle(a * b, c)
        rhs = ci.cres_cocycle(a, b * c) * ci.cres_cocycle(b, c)
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_window_matches_monomial_pairing():
    pairs = [
        (Z, ci.Loop.monomial(0.8 + 0.7j, 0)),
        (ci.Loop.monomial(2.0, 2), ci.Loop.monomial(0.5, -1)),
    ]
    for u, v in pairs:
        pf = ci._cres_monomial(u, v) / ci._cres_monomial(v, u)
        pw = ci._cres_window(u, v, 48) / ci._cres_window(v, u, 48)
        assert pw == pytest.approx(pf, rel=1e-7)


def test_m_uni_cross_check():
    g = ci.Loop.laurent([2.0, 1.0], 0)
    h = ci.Loop.laurent([3.0, 0.5 + 0.2j], 0)
    cw = ci.cres_cocycle(g, h, window_n=64)
    assert cw == pytest.approx(ci.m_uni(g, h, 64), rel=1e-7)


def test_window_certification():
    g = ci.Loop.laurent([2.0, 1.0], 0)
    v1 = ci._cres_window(Z, g, 64)
    v2 = ci._cres_window(Z, g, 80)
    certify_stable(((), [v1]), ((), [v2]))
    with pytest.raises(Unstable):
        certify_stable(((0,), [1.0]), ((1,), [1.0]))


def test_tame_symbol_examples():
    lam = ci.Loop.monomial(0.8 + 0.7j, 0)
    assert ci.tame_symbol_formula(Z, lam) == pytest.approx(1.0 / lam.mu)
    assert ci.tame_symbol_formula(lam, Z) == pytest.approx(lam.mu, rel=1e-9)
    two_z = ci.Loop.laurent([2.0, 1.0], 0)
    assert ci.tame_symbol_formula(Z, two_z) == pytest.approx(0.5, rel=1e-6)


def test_branch_refinement():
    fast = ci.Loop.monomial(1.0, 2)
    with pytest.raises(BranchJump):
        ci.tame_symbol_formula(fast, Z, q_points=4)
    ci.tame_symbol_formula(fast, Z, q_points=512)


def test_convention_probe_and_agreement():
    s = ci.convention_exponent()
    assert s in (1, -1)
    for v in [ci.Loop.monomial(2.0, 0), ci.Loop.monomial(1 + 1j, 0), ci.Loop.laurent([2.0, 1.0], 0)]:
        pairing = ci.steinberg_pairing(Z, v, window_n=64)
        tame = ci.tame_symbol_formula(Z, v)
        assert pairing == pytest.approx(tame**s, rel=1e-6)


def test_pairing_bimultiplicative_and_antisymmetric():
    lam2 = ci.Loop.monomial(2.0, 0)
    p1 = ci.steinberg_pairing(Z, lam2)
    for a in (1, 2, 3):
        za = ci.Loop.monomial(1.0, a)
        assert ci.steinberg_pairing(za, lam2) == pytest.approx(p1**a, rel=1e-9)
    u, v = ci.Loop.monomial(1.5, 1), ci.Loop.monomial(0.7 + 0.2j, 2)
    assert ci.steinberg_pairing(u, v) * ci.steinberg_pairing(v, u) == pytest.approx(1.0)
    # constants pair trivially
    c1, c2 = ci.Loop.monomial(2.0, 0), ci.Loop.monomial(1 + 2j, 0)
    assert ci.steinberg_pairing(c1, c2) == pytest.approx(1.0)


def test_cohomologous_stability():
    # an alternative base object changes the cochain by the coboundary of
    # the connecting one-cochain
    rng = np.random.default_rng(17)

    def mktwist(seed):
        def tw(x):
            r = np.random.default_rng((seed, x.n & 0xFFFF, int(abs(x.mu) * 1e6) & 0xFFFFFF))
            return complex(r.uniform(0.5, 2) * np.exp(1j * r.uniform(0, 2 * np.pi)))

        return tw

    for t in range(6):
        def rl():
            return ci.Loop.monomial(
                rng.uniform(0.5, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi)),
                int(rng.integers(-2, 3)),
            )

        g, h = rl(), rl()
        base = int(rng.integers(-2, 3))
        tw = mktwist(100 + t)
        c0 = ci._cres_monomial(g, h)
        c1 = ci.cres_cochain_base(g, h, base, tw)
        b = lambda x: ci.base_change_cochain(x, base, tw)
        assert c0 / c1 == pytest.approx(b(g) * b(h) / b(g * h), rel=1e-9)
