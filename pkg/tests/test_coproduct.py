"""Hom-line categories: duality, composition, base change, group action."""

import numpy as np
import pytest

from detline import coproduct as cp
from detline._linalg import perm_sign_by_key
from detline.lattice import label_key
from detline.torus import Monomial2, RingIdempotent, SigmaIndex
from detline.verify import random_monomial, suite_category

E = Monomial2.one()
q = RingIdempotent.generator


def mono(mu, a, b):
    return Monomial2(mu, a, b)


@pytest.fixture(scope="module")
def ctx():
    return cp.Context(q(E))


def omega_labels(n, m, t, s):
    return [((x1, x2), 0) for x2 in range(s, t) for x1 in range(m, n)]


def shuffle_sign(*parts):
    labels = [l for part in parts for l in part]
    return perm_sign_by_key(labels, label_key)


def test_duality_phi_explicit(ctx):
    # the duality element is the omega-wedge pair on canonical frames
    for n1, m1, r2 in [(3, 1, 2), (2, 0, 3), (4, 2, 1), (1, 1, 4)]:
        lam = SigmaIndex(mono(1.3, m1, 1))
        mu = SigmaIndex(mono(0.7, n1, 2))
        s = ctx.phi(lam, mu, q(mono(1.0, 6, r2)))
        assert s == pytest.approx(1.0)
        deg_dual = ctx.line_deg(lam, mu, ctx.p0, q(mono(1.0, 6, r2)))
        deg_line = ctx.line_deg(lam, mu, q(mono(1.0, 6, r2)), ctx.p0)
        assert deg_dual == (n1 - m1) * r2 and deg_line == -(n1 - m1) * r2


def test_duality_identity_object(ctx):
    lam = SigmaIndex(mono(2.0, 2, 2))
    assert ctx.phi(lam, lam, q(mono(1, 3, 1))) == pytest.approx(1.0)


def test_zigzag(ctx):
    rng = np.random.default_rng(12)
    for _ in range(6):
        lam, mu = SigmaIndex(random_monomial(rng)), SigmaIndex(random_monomial(rng))
        e = q(random_monomial(rng))
        assert ctx.phi(lam, mu, e) * ctx.psi(lam, mu, e) == pytest.approx(1.0)


def test_unit_composition(ctx):
    u = cp.unit(ctx, q(mono(1, 1, 1)), q(mono(1, 2, 2)), SigmaIndex(mono(1.5, 2, 1)))
    assert cp.compose(u, u).coeff == pytest.approx(1.0)


def test_explicit_composition_sign(ctx):
    # frame composition carries the documented sign and shuffle factors
    for n1, m1, l1, s2, t2 in [(3, 2, 1, 1, 2), (2, 1, 0, 0, 2), (4, 2, 1, 2, 3), (3, 2, 0, 2, 1)]:
        kk = SigmaIndex(mono(1.1, l1, 0))
        hh = SigmaIndex(mono(0.9, m1, 1))
        gg = SigmaIndex(mono(1.7, n1, 2))
        qv, qu = q(mono(1, 0, s2)), q(mono(1, 9, t2))
        x = cp.HomElement(ctx, qv, qu, kk, hh, 1.0)
        y = cp.HomElement(ctx, qv, qu, hh, gg, 1.0)
        z = cp.compose(x, y)
        sign = (-1) ** ((n1 - m1) * (m1 - l1) * t2 * (t2 - s2))
        sh_s = shuffle_sign(omega_labels(m1, l1, s2, 0), omega_labels(n1, m1, s2, 0))
        sh_t = shuffle_sign(omega_labels(m1, l1, t2, 0), omega_labels(n1, m1, t2, 0))
        assert z.coeff == pytest.approx(sign * sh_s * sh_t)


def test_associativity_and_ternary(ctx):
    rng = np.random.default_rng(30)
    for _ in range(30):
        p, qq = q(random_monomial(rng)), q(random_monomial(rng))
        sigs = [SigmaIndex(random_monomial(rng)) for _ in range(4)]
        x = cp.HomElement(ctx, p, qq, sigs[0], sigs[1], complex(rng.standard_normal(), rng.standard_normal()))
        y = cp.HomElement(ctx, p, qq, sigs[1], sigs[2], complex(rng.standard_normal(), rng.standard_normal()))
        z = cp.HomElement(ctx, p, qq, sigs[2], sigs[3], complex(rng.standard_normal(), rng.standard_normal()))
        a1 = cp.compose(cp.compose(x, y), z)
        a2 = cp.compose(x, cp.compose(y, z))
        a3 = cp.ternary_compose(x, y, z)
        assert a1.coeff == pytest.approx(a2.coeff, rel=1e-9)
        assert a1.coeff == pytest.approx(a3.coeff, rel=1e-9)


def test_explicit_base_change_sign(ctx):
    for n1, m1, t2, s2, r2 in [(3, 1, 2, 1, 1), (2, 0, 3, 2, 2), (4, 2, 3, 1, 1), (3, 2, 1, 2, 1)]:
        hh = SigmaIndex(mono(1.2, m1, 1))
        gg = SigmaIndex(mono(2.0, n1, 0))
        qu, qv = q(mono(1, 5, t2)), q(mono(1, 2, s2))
        ctx_w = cp.Context(q(mono(1.0, 4, r2)))
        x = cp.HomElement(ctx_w, qu, qv, hh, gg, 1.0)
        y = cp.change_base(x, q(E))
        assert y.coeff == pytest.approx((-1) ** ((n1 - m1) * (t2 - s2) * r2))


def test_base_change_equivalence_relation(ctx):
    rng = np.random.default_rng(9)
    x = cp.HomElement(
        ctx, q(random_monomial(rng)), q(random_monomial(rng)),
        SigmaIndex(random_monomial(rng)), SigmaIndex(random_monomial(rng)), 1.5 + 0.5j,
    )
    assert cp.change_base(x, ctx.p0).coeff == pytest.approx(x.coeff)
    w1, w2 = q(random_monomial(rng)), q(random_monomial(rng))
    two_step = cp.change_base(cp.change_base(x, w1), w2)
    one_step = cp.change_base(x, w2)
    assert two_step.coeff == pytest.approx(one_step.coeff, rel=1e-9)


def test_group_action_explicit(ctx):
    for n1, m1, t2, s2, l1, l2 in [(3, 1, 2, 1, 1, 1), (2, 0, 1, 2, 2, 1), (2, 1, 3, 0, 0, 2)]:
        kap = 1.3 - 0.6j
        hh = SigmaIndex(mono(1.2, m1, 2))
        gg = SigmaIndex(mono(0.8, n1, 1))
        qu, qv = q(mono(1, 5, t2)), q(mono(1, 2, s2))
        x = cp.HomElement(ctx, qu, qv, hh, gg, 1.0)
        y = cp.group_act(mono(kap, l1, l2), x)
        expected = (-1) ** ((n1 - m1) * (t2 - s2) * l2) * kap ** ((n1 - m1) * (s2 - t2))
        assert y.coeff == pytest.approx(expected)
        assert y.lam.g.a == m1 + l1 and y.mu.g.a == n1 + l1


def test_group_action_unit_and_homomorphism(ctx):
    rng = np.random.default_rng(44)
    x = cp.HomElement(
        ctx, q(random_monomial(rng)), q(random_monomial(rng)),
        SigmaIndex(random_monomial(rng)), SigmaIndex(random_monomial(rng)), 0.9 + 0.2j,
    )
    assert cp.group_act(E, x).coeff == pytest.approx(x.coeff)
    g1, h1 = random_monomial(rng), random_monomial(rng)
    lhs = cp.group_act(h1, cp.group_act(g1, x))
    rhs = cp.group_act(h1 * g1, x)
    assert lhs.coeff == pytest.approx(rhs.coeff, rel=1e-9)


def test_category_suite():
    for c in suite_category(30, 20260810):
        assert c["passed"], c


def test_coproduct_of_unit_is_unit_pair(ctx):
    lam = SigmaIndex(mono(1.4, 2, 1))
    u = cp.unit(ctx, q(mono(1, 1, 2)), q(mono(1, 3, 1)), lam)
    pair = cp.coproduct(u, q(mono(1, 0, 2)))
    assert pair.coeff == pytest.approx(1.0)
    for leg in pair.legs:
        assert leg.coeff == pytest.approx(1.0)
        assert leg.lam == leg.mu == lam


def test_module_level_duality_wrappers(ctx):
    lam, mu = SigmaIndex(mono(1, 1, 0)), SigmaIndex(mono(1, 3, 2))
    e = q(mono(1, 2, 2))
    assert cp.duality_phi(ctx, e, lam, mu) * cp.duality_psi(ctx, e, lam, mu) == pytest.approx(1.0)
