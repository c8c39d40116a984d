"""The group 3-cochain on invertible monomials of the 2-torus.

The categorical pipeline computes the cochain value from the chosen
objects and connecting isomorphisms via coproduct, group action and
composition; the closed form is the independent oracle for nonnegative
exponents.  Values are compared either exactly in C^* or in the quotient
C^*/{+-1} via a canonical representative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import coproduct as cp
from .errors import ExponentRange
from .torus import Monomial2, RingIdempotent, SigmaIndex

_E = Monomial2.one()


def _q(u: Monomial2) -> RingIdempotent:
    return RingIdempotent.generator(u)


def _context() -> cp.Context:
    return cp.Context(_q(_E))


@dataclass(frozen=True)
class BetaChoice:
    """The connecting element b_{g,h}: canonical frames, coefficient one."""

    g: Monomial2
    h: Monomial2

    def element(self, ctx: cp.Context) -> cp.HomElement:
        return cp.HomElement(
            ctx, _q(self.g), _q(self.g * self.h), SigmaIndex(_E), SigmaIndex(self.g)
        )

    def degree(self, ctx: cp.Context) -> int:
        return self.element(ctx).degree


def beta_degree(g: Monomial2, h: Monomial2, ctx=None) -> int:
    """Degree of the connecting isomorphism beta_{g,h}."""
    ctx = ctx or _context()
    return BetaChoice(g, h).degree(ctx)


def cocycle_c(g: Monomial2, h: Monomial2, k: Monomial2, ctx=None) -> complex:
    """Value of the 3-cochain through the categorical pipeline."""
    ctx = ctx or _context()
    b_gh = BetaChoice(g, h).element(ctx)
    b_ghk = BetaChoice(g * h, k).element(ctx)
    b_ghk_big = BetaChoice(g, h * k).element(ctx)
    b_hk = BetaChoice(h, k).element(ctx)

    # decompose b_{g,hk} along q_{gh}; its first leg is b_{g,h} on the nose
    pair = cp.coproduct(b_ghk_big, _q(g * h))
    middle = pair.legs[1].scaled(pair.coeff / b_gh.coeff)

    # commute b_{g,h} past the inverse of b_{gh,k}
    sign = -1.0 if (b_gh.degree * b_ghk.degree) % 2 else 1.0

    ga = cp.group_act(g, b_hk)
    loop = cp.compose(cp.compose(cp.invert(b_ghk), middle), ga)
    if loop.lam != loop.mu:
        raise RuntimeError("pipeline did not return an automorphism")
    return complex(sign * loop.coeff)


def closed_form(g: Monomial2, h: Monomial2, k: Monomial2) -> complex:
    """Direct formula for the cochain, valid for nonnegative exponents."""
    n1, n2 = g.a, g.b
    m1, m2 = h.a, h.b
    l1, l2 = k.a, k.b
    if min(n1, n2, m1, m2, l1, l2) < 0:
        raise ExponentRange("closed form requires nonnegative exponents")
    eps = (
        (n1 * m2 + n1 * m1 + n2 * m1) * l2
        + n1 * n2 * m1 * l2
        + n1 * m1 * (n2 + m2 - 1) * (n2 + m2) // 2
        + n1 * m1 * (n2 + m2 + l2 - 1) * (n2 + m2 + l2) // 2
    )
    return complex(g.mu ** (m1 * l2) * (-1) ** (eps % 2))


def class_representative(z: complex) -> complex:
    """Canonical representative of a class in C^*/{+-1}."""
    z = complex(z)
    scale = abs(z)
    if scale == 0:
        raise ValueError("class representative of zero")
    if z.real < -1e-12 * scale:
        return -z
    if abs(z.real) <= 1e-12 * scale and z.imag < 0:
        return -z
    return z


def class_equal(a: complex, b: complex, rel=1e-9) -> bool:
    ra, rb = class_representative(a), class_representative(b)
    return abs(ra - rb) <= rel * max(abs(ra), abs(rb), 1e-300)


def verify_relation(
    g: Monomial2, h: Monomial2, k: Monomial2, l: Monomial2, ctx=None
) -> dict:
    """Twisted 3-cocycle relation with the explicit graded sign."""
    ctx = ctx or _context()
    sign = (-1.0) ** ((beta_degree(g, h, ctx) * beta_degree(k, l, ctx)) % 2)
    lhs = sign * cocycle_c(g * h, k, l, ctx) * cocycle_c(g, h, k * l, ctx)
    rhs = (
        cocycle_c(h, k, l, ctx)
        * cocycle_c(g, h * k, l, ctx)
        * cocycle_c(g, h, k, ctx)
    )
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "sign_exponent": (beta_degree(g, h, ctx) * beta_degree(k, l, ctx)) % 2,
        "residual": residual,
        "passed": residual <= 1e-9,
    }


@dataclass(frozen=True)
class HomologyCycle3:
    """Formal integer combination of ordered triples of monomials."""

    terms: tuple  # tuple of (coefficient, (g, h, k))

    @classmethod
    def alternating(cls, f: Monomial2, g: Monomial2, h: Monomial2) -> "HomologyCycle3":
        """The six-term alternating cycle attached to three commuting elements."""
        return cls(
            (
                (1, (f, g, h)),
                (-1, (f, h, g)),
                (1, (h, f, g)),
                (-1, (h, g, f)),
                (1, (g, h, f)),
                (-1, (g, f, h)),
            )
        )


def pair_homology(cycle: HomologyCycle3, ctx=None) -> complex:
    """Pairing of the cochain with a homology cycle, one factor per term."""
    ctx = ctx or _context()
    value = 1.0 + 0.0j
    for coeff, (a, b, c) in cycle.terms:
        if coeff == 0:
            continue
        value *= cocycle_c(a, b, c, ctx) ** coeff
    return value


def _log_path(values):
    """Continuous logarithm along a sampled path, principal at the start."""
    from .errors import BranchJump

    logs = np.empty(len(values), dtype=complex)
    logs[0] = np.log(values[0])
    for i in range(1, len(values)):
        step = values[i] / values[i - 1]
        d = np.log(step)
        if abs(d.imag) > np.pi / 2:
            raise BranchJump("log branch jump; refine the grid")
        logs[i] = logs[i - 1] + d
    return logs


def conjecture_probe(f: Monomial2, g: Monomial2, h: Monomial2, grid=256, ctx=None):
    """Exploratory comparison of the pairing with the integral formula.

    Returns (pairing value, formula value, ratio); nothing is asserted.
    """
    ctx = ctx or _context()
    pairing = pair_homology(HomologyCycle3.alternating(f, g, h), ctx)

    ts = np.linspace(0.0, 1.0, grid + 1)

    def ev(m: Monomial2, t, s):
        return m.mu * np.exp(2j * np.pi * (m.a * t + m.b * s))

    # area term: log(f)/(g h) dg ^ dh pulled back to the unit square
    jac = (2j * np.pi) ** 2 * (g.a * h.b - g.b * h.a)
    t2, s2 = np.meshgrid(ts, ts, indexing="ij")
    logf = np.log(f.mu) + 2j * np.pi * (f.a * t2 + f.b * s2)
    area = np.trapezoid(np.trapezoid(logf * jac, ts, axis=1), ts)
    term1 = np.exp(2.0 / (2j * np.pi) ** 2 * area)

    # boundary terms along {1} x [0,1] and [0,1] x {1}
    def boundary(fix_axis):
        if fix_axis == 0:
            gs = ev(g, 0.0, ts)
        else:
            gs = ev(g, ts, 0.0)
        logg = _log_path(gs)
        dh = 2j * np.pi * (h.b if fix_axis == 0 else h.a)
        return np.trapezoid(logg * dh, ts)

    w1f, w2f = f.a, f.b
    term2 = np.exp(-w1f / (1j * np.pi) * boundary(0) + w2f / (1j * np.pi) * boundary(1))
    term3 = h.mu ** (2 * (f.a * g.b - g.a * f.b))
    formula = term1 * term2 * term3
    ratio = pairing / formula
    return complex(pairing), complex(formula), complex(ratio)
