"""Bipolarized data on Z^2: monomials, quadrant projections and F/Omega ops.

Group elements are invertible monomials mu * z1^a * z2^b acting on
l2(Z^2) by multiplication; the two polarizing projections are the
coordinate half-plane indicators.  On the monomial subgroup every
operator in sight is an exact indicator operator, so the whole calculus
stays fiber-diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._intervals import Box, BoxUnion
from .errors import IdealViolation
from .lattice import FiberedLatticeOp, SlotSpace


@dataclass(frozen=True)
class Monomial2:
    """Invertible monomial mu * z1^a * z2^b on the 2-torus."""

    mu: complex
    a: int
    b: int

    def __post_init__(self):
        if self.mu == 0:
            raise ValueError("monomial scalar must be nonzero")
        object.__setattr__(self, "mu", complex(self.mu))

    def __mul__(self, other: "Monomial2") -> "Monomial2":
        return Monomial2(self.mu * other.mu, self.a + other.a, self.b + other.b)

    def inverse(self) -> "Monomial2":
        return Monomial2(1.0 / self.mu, -self.a, -self.b)

    @classmethod
    def one(cls) -> "Monomial2":
        return cls(1.0, 0, 0)

    def __str__(self):
        return f"({self.mu.real:g},{self.mu.imag:g})*z1^{self.a}*z2^{self.b}"


@dataclass(frozen=True)
class RingIdempotent:
    """Either the ring unit or a generator q_u of the free idempotent ring."""

    u: "Monomial2 | None"  # None encodes the unit 1

    @classmethod
    def unit(cls) -> "RingIdempotent":
        return cls(None)

    @classmethod
    def generator(cls, u: Monomial2) -> "RingIdempotent":
        return cls(u)

    @property
    def is_unit(self) -> bool:
        return self.u is None


@dataclass(frozen=True)
class SigmaIndex:
    """Index (g, sigma) with the canonical admissible family implicit."""

    g: Monomial2

    def act(self, k: Monomial2) -> "SigmaIndex":
        return SigmaIndex(k * self.g)


def quadrant(a=None, b=None) -> BoxUnion:
    """Indicator region {x1 >= a} cap {x2 >= b} (None drops a constraint)."""
    lo1 = (a, None) if a is not None else (None, None)
    lo2 = (b, None) if b is not None else (None, None)
    return BoxUnion(2, [Box((lo1, lo2))])


def sigma_region(lam: SigmaIndex, x: RingIdempotent) -> BoxUnion:
    """Support of sigma_k(x): P_{z1^l1} for the unit, P_{z1^l1} Q_{z2^t2} else."""
    if x.is_unit:
        return quadrant(a=lam.g.a)
    return quadrant(a=lam.g.a, b=x.u.b)


def projection_P(g: Monomial2) -> FiberedLatticeOp:
    """Conjugated half-plane projection P_g as a one-slot operator."""
    region = quadrant(a=g.a)
    space = SlotSpace([("h", BoxUnion.full(2))])
    return FiberedLatticeOp(space, space, {(0, 0): [(1.0, b) for b in region.canonical_boxes()]})


def projection_Q(u: Monomial2) -> FiberedLatticeOp:
    region = quadrant(b=u.b)
    space = SlotSpace([("h", BoxUnion.full(2))])
    return FiberedLatticeOp(space, space, {(0, 0): [(1.0, b) for b in region.canonical_boxes()]})


def sigma_apply(k: Monomial2, x: RingIdempotent) -> FiberedLatticeOp:
    """The canonical admissible representation on generators and the unit."""
    region = sigma_region(SigmaIndex(k), x)
    space = SlotSpace([("h", BoxUnion.full(2))])
    return FiberedLatticeOp(
        space, space, {(0, 0): [(1.0, b) for b in region.canonical_boxes()]}
    )


def _region_pairs(region: BoxUnion):
    return [(1.0, b) for b in region.canonical_boxes()]


def _check_ideal(p: RingIdempotent, q: RingIdempotent):
    if p.is_unit != q.is_unit:
        raise IdealViolation("idempotents do not differ by an ideal element")


def Omega_op(lam: SigmaIndex, mu: SigmaIndex, p: RingIdempotent) -> FiberedLatticeOp:
    """The involution-like operator on pi_lam(p)H + pi_mu(p)H."""
    A = sigma_region(lam, p)
    B = sigma_region(mu, p)
    dom = SlotSpace([("lam", A), ("mu", B)])
    inter = A.intersect(B)
    entries = {
        (0, 0): _region_pairs(A.subtract(inter)),
        (0, 1): _region_pairs(inter),
        (1, 0): _region_pairs(inter),
        (1, 1): [(-1.0, b) for b in B.subtract(inter).canonical_boxes()],
    }
    return FiberedLatticeOp(dom, dom, entries)


def F_op(
    lam: SigmaIndex, mu: SigmaIndex, p: RingIdempotent, q: RingIdempotent
) -> FiberedLatticeOp:
    """F(lam,mu)(p,q): pi_lam(p)H + pi_mu(q)H -> pi_lam(q)H + pi_mu(p)H."""
    _check_ideal(p, q)
    A = sigma_region(lam, RingIdempotent.unit())
    B = sigma_region(mu, RingIdempotent.unit())
    inter = A.intersect(B)
    omega = {
        (0, 0): [(1.0, b) for b in A.subtract(inter).canonical_boxes()],
        (0, 1): _region_pairs(inter),
        (1, 0): _region_pairs(inter),
        (1, 1): [(-1.0, b) for b in B.subtract(inter).canonical_boxes()],
    }
    dom = SlotSpace([("lam_p", sigma_region(lam, p)), ("mu_q", sigma_region(mu, q))])
    cod = SlotSpace([("lam_q", sigma_region(lam, q)), ("mu_p", sigma_region(mu, p))])
    return FiberedLatticeOp(dom, cod, omega)


def big_F(lams, pair, ps) -> FiberedLatticeOp:
    """n-slot F^{ij}: the (i,j) block is F(lam_i,lam_j)(p_i,p_j), rest diagonal."""
    i, j = pair
    if not (0 <= i < j < len(lams)):
        raise ValueError("need 0 <= i < j < n")
    _check_ideal(ps[i], ps[j])
    n = len(lams)
    tau = list(range(n))
    tau[i], tau[j] = j, i
    dom = SlotSpace(
        [(f"s{k}", sigma_region(lams[k], ps[k])) for k in range(n)]
    )
    cod = SlotSpace(
        [(f"s{k}", sigma_region(lams[k], ps[tau[k]])) for k in range(n)]
    )
    A = sigma_region(lams[i], RingIdempotent.unit())
    B = sigma_region(lams[j], RingIdempotent.unit())
    inter = A.intersect(B)
    entries = {
        (i, i): [(1.0, b) for b in A.subtract(inter).canonical_boxes()],
        (i, j): _region_pairs(inter),
        (j, i): _region_pairs(inter),
        (j, j): [(-1.0, b) for b in B.subtract(inter).canonical_boxes()],
    }
    for k in range(n):
        if k != i and k != j:
            entries[(k, k)] = _region_pairs(sigma_region(lams[k], ps[k]))
    return FiberedLatticeOp(dom, cod, entries)


def big_Omega(lams, pair, ps) -> FiberedLatticeOp:
    """n-slot Omega^{ij} on +_k pi_{lam_k}(p_k)H with p_i = p_j."""
    i, j = pair
    if not (0 <= i < j < len(lams)):
        raise ValueError("need 0 <= i < j < n")
    if ps[i] != ps[j]:
        raise IdealViolation("Omega^{ij} needs equal idempotents at i and j")
    n = len(lams)
    dom = SlotSpace([(f"s{k}", sigma_region(lams[k], ps[k])) for k in range(n)])
    A = sigma_region(lams[i], ps[i])
    B = sigma_region(lams[j], ps[j])
    inter = A.intersect(B)
    entries = {
        (i, i): [(1.0, b) for b in A.subtract(inter).canonical_boxes()],
        (i, j): _region_pairs(inter),
        (j, i): _region_pairs(inter),
        (j, j): [(-1.0, b) for b in B.subtract(inter).canonical_boxes()],
    }
    for k in range(n):
        if k != i and k != j:
            entries[(k, k)] = _region_pairs(sigma_region(lams[k], ps[k]))
    return FiberedLatticeOp(dom, dom, entries)


def gamma_projection(n: int, m: int, t: int, s: int) -> FiberedLatticeOp:
    """Finite-rank projection (P_{z1^m} - P_{z1^n})(Q_{z2^s} - Q_{z2^t})."""
    space = SlotSpace([("h", BoxUnion.full(2))])
    if n == m or t == s:
        return FiberedLatticeOp.zero(space, space)
    region = BoxUnion(2, [Box(((m, n), (s, t)))])
    return FiberedLatticeOp(space, space, {(0, 0): _region_pairs(region)})


def diagonal_difference_P(n: int) -> FiberedLatticeOp:
    """P - P_{z1^n} as a one-slot diagonal operator."""
    space = SlotSpace([("h", BoxUnion.full(2))])
    region = quadrant(a=0).subtract(quadrant(a=n))
    sign = 1.0 if n >= 0 else -1.0
    return FiberedLatticeOp(
        space,
        space,
        {(0, 0): [(sign, b) for b in quadrant(a=min(0, n)).subtract(quadrant(a=max(0, n))).canonical_boxes()]},
    )


def diagonal_difference_Q(m: int) -> FiberedLatticeOp:
    space = SlotSpace([("h", BoxUnion.full(2))])
    sign = 1.0 if m >= 0 else -1.0
    return FiberedLatticeOp(
        space,
        space,
        {(0, 0): [(sign, b) for b in quadrant(b=min(0, m)).subtract(quadrant(b=max(0, m))).canonical_boxes()]},
    )


def commutator_trace_norm(n: int, m: int) -> float:
    """Trace norm of (P - P_{z1^n})(Q - Q_{z2^m})."""
    prod = diagonal_difference_P(n).compose(diagonal_difference_Q(m))
    return prod.trace_norm()


def bipolar_verify(g: Monomial2, h: Monomial2, u: Monomial2, v: Monomial2) -> dict:
    """Trace-class checks for the conjugated projection differences."""
    Pg, Ph = projection_P(g), projection_P(h)
    Qu, Qv = projection_Q(u), projection_Q(v)
    comm = Pg.compose(Qu).sub(Qu.compose(Pg))
    prod = Pg.sub(Ph).compose(Qu.sub(Qv))
    report = {
        "commutator_finite": comm.is_finite_box(),
        "difference_finite": prod.is_finite_box(),
        "commutator_trace_norm": comm.trace_norm(),
        "difference_trace_norm": prod.trace_norm(),
    }
    return report


def assumption_check(triples) -> dict:
    """Finite-box checks of the two representation-family conditions.

    `triples` is an iterable of (lam, mu, nu, u, v) with SigmaIndex lam,
    mu, nu and Monomial2 generators u, v.
    """
    results = []
    for lam, mu, nu, u, v in triples:
        qu = RingIdempotent.generator(u)
        qv = RingIdempotent.generator(v)
        one = RingIdempotent.unit()
        d1 = sigma_apply_region_op(lam, qu).compose(sigma_apply_region_op(mu, one)).sub(
            sigma_apply_region_op(lam, one).compose(sigma_apply_region_op(mu, qu))
        )
        ideal = sigma_apply_region_op(lam, qu).sub(sigma_apply_region_op(lam, qv))
        d2 = ideal.compose(sigma_apply_region_op(mu, one)).compose(
            sigma_apply_region_op(nu, one)
        ).sub(ideal.compose(sigma_apply_region_op(nu, one)))
        results.append(
            {
                "condition1_finite": d1.is_finite_box(),
                "condition1_norm": d1.trace_norm() if d1.is_finite_box() else None,
                "condition2_finite": d2.is_finite_box(),
                "condition2_norm": d2.trace_norm() if d2.is_finite_box() else None,
            }
        )
    return {
        "samples": results,
        "all_finite": all(
            r["condition1_finite"] and r["condition2_finite"] for r in results
        ),
    }


def sigma_apply_region_op(lam: SigmaIndex, x: RingIdempotent) -> FiberedLatticeOp:
    """sigma_{lam}(x) as a one-slot diagonal operator on the full lattice."""
    region = sigma_region(lam, x)
    space = SlotSpace([("h", BoxUnion.full(2))])
    return FiberedLatticeOp(space, space, {(0, 0): _region_pairs(region)})
