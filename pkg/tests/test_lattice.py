"""Fibered lattice operators: algebra, kernels, determinants, windows."""

import numpy as np
import pytest

from detline._intervals import Box, BoxUnion
from detline.errors import NotDeterminantClass, NotFiniteRank, ShapeMismatch
from detline.lattice import FiberedLatticeOp, SlotSpace
from detline.torus import quadrant
from detline.windows import DenseOp, window_det, window_kernel_cokernel
from detline import circle as ci


def proj(region):
    space = SlotSpace([("h", BoxUnion.full(region.dim))])
    return FiberedLatticeOp(
        space, space, {(0, 0): [(1.0, b) for b in region.canonical_boxes()]}
    )


def test_region_algebra():
    q1, q2 = quadrant(a=2), quadrant(a=0, b=1)
    assert q1.intersect(q2) == quadrant(a=2, b=1)
    assert q1.subtract(q1).is_empty()
    comp = q1.complement()
    assert comp.contains((1, 5)) and not comp.contains((2, 5))
    assert BoxUnion(2, [Box(((0, 2), (0, 2)))]).size() == 4


def test_projection_idempotent_and_nesting():
    p = proj(quadrant(a=0))
    assert not p.compose(p).sub(p).entries
    p2, p1 = proj(quadrant(a=2)), proj(quadrant(a=1))
    assert not p2.compose(p1).sub(p2).entries  # half planes nest


def test_rectangle_product():
    n, m = 3, 2
    P, Pn = proj(quadrant(a=0)), proj(quadrant(a=n))
    Q, Qm = proj(quadrant(b=0)), proj(quadrant(b=m))
    prod = P.sub(Pn).compose(Q.sub(Qm))
    cells = prod.entries[(0, 0)]
    assert len(cells) == 1
    val, box = cells[0]
    assert val == 1.0 and box == Box(((0, n), (0, m)))
    assert prod.trace_norm() == pytest.approx(n * m)


def test_identity_kernel_cokernel_and_det():
    sp = SlotSpace([("a", quadrant(a=0)), ("b", quadrant(b=1))])
    ident = FiberedLatticeOp.identity(sp)
    ker, coker = ident.kernel_cokernel()
    assert ker == [] and coker == []
    assert ident.index() == 0
    assert ident.fredholm_det() == pytest.approx(1.0)


def test_rank_one_det_and_trace_norm():
    delta = 0.37 + 0.21j
    sp = SlotSpace([("h", BoxUnion.full(1))])
    op = FiberedLatticeOp(
        sp, sp, {(0, 0): [(1.0, Box(((None, None),))), (delta, Box(((4, 5),)))]}
    )
    assert op.fredholm_det() == pytest.approx(1 + delta)
    rank1 = FiberedLatticeOp(sp, sp, {(0, 0): [(delta, Box(((2, 3),)))]})
    assert rank1.trace_norm() == pytest.approx(abs(delta))
    zero = FiberedLatticeOp.zero(sp, sp)
    assert zero.trace_norm() == 0.0


def test_det_requires_identity_tail():
    sp = SlotSpace([("h", BoxUnion.full(1))])
    op = FiberedLatticeOp(sp, sp, {(0, 0): [(2.0, Box(((None, None),)))]})
    with pytest.raises(NotDeterminantClass):
        op.fredholm_det()
    with pytest.raises(NotFiniteRank):
        op.trace_norm()


def test_shape_mismatch():
    a = proj(quadrant(a=0))
    b = proj(BoxUnion(1, [Box(((0, None),))]))
    with pytest.raises(ShapeMismatch):
        a.compose(b)


def _random_detclass(rng, dim=2):
    sp = SlotSpace(
        [("a", BoxUnion.full(dim)), ("b", quadrant(a=-1) if dim == 2 else BoxUnion.full(dim))]
    )
    ident = FiberedLatticeOp.identity(sp)
    ents = {}
    for i in range(2):
        for j in range(2):
            cells = []
            for _ in range(2):
                lo = rng.integers(-2, 2, size=dim)
                box = Box(tuple((int(l), int(l) + int(rng.integers(1, 3))) for l in lo))
                cells.append((0.4 * complex(rng.standard_normal(), rng.standard_normal()), box))
            ents[(i, j)] = cells
    return ident.add(FiberedLatticeOp(sp, sp, ents))


def test_fredholm_det_dense_window_oracle():
    rng = np.random.default_rng(8)
    for _ in range(5):
        op = _random_detclass(rng)
        val = op.fredholm_det()
        pts = op.probe_points()
        labels = [(pt, s) for pt in pts for s in op.dom.active(pt)]
        pos = {l: i for i, l in enumerate(labels)}
        mat = np.eye(len(labels), dtype=complex)
        for pt in pts:
            m, d_a, c_a = op.fiber(pt)
            for r, i in enumerate(c_a):
                for c, j in enumerate(d_a):
                    mat[pos[(pt, i)], pos[(pt, j)]] = m[r, c]
        assert abs(val - np.linalg.det(mat)) <= 1e-10 * max(1.0, abs(val))


def test_fiber_locality_and_index_additivity():
    rng = np.random.default_rng(21)
    from detline.verify import random_fibered_op

    a = random_fibered_op(rng, 0, 1)
    b = random_fibered_op(rng, 1, -1)
    ba = b.compose(a)
    for pt in ba.probe_points():
        m_ba, _, _ = ba.fiber(pt)
        m_b, _, _ = b.fiber(pt)
        m_a, _, _ = a.fiber(pt)
        want = m_b @ m_a if m_a.size and m_b.size else np.zeros(m_ba.shape)
        assert np.allclose(m_ba, want, atol=1e-12)
    assert ba.index() == a.index() + b.index()


def test_det_multiplicativity():
    rng = np.random.default_rng(40)
    a = _random_detclass(rng)
    b = _random_detclass(rng)
    lhs = a.compose(b).fredholm_det()
    rhs = a.fredholm_det() * b.fredholm_det()
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_inverse_roundtrip():
    rng = np.random.default_rng(13)
    op = _random_detclass(rng)
    ident = FiberedLatticeOp.identity(op.dom)
    assert not op.compose(op.inverse()).sub(ident).entries


# -- windowed mode ----------------------------------------------------------


def test_window_shifted_identity():
    # bilateral shift between shifted windows: bijective, index zero
    n = 32
    op = DenseOp(list(range(n)), list(range(1, n + 1)), np.eye(n))
    ker, coker = window_kernel_cokernel(op)
    assert ker == [] and coker == [] and op.index() == 0
    assert window_det(DenseOp(list(range(n)), list(range(n)), np.eye(n))) == pytest.approx(1.0)


def test_window_compression_of_shift():
    one = ci.Loop.monomial(1.0, 0)
    z = ci.Loop.monomial(1.0, 1)
    for n in (8, 24):
        op = ci.WindowContext(n).toeplitz(z, one, n)
        ker, coker = op.kernel_cokernel()
        assert len(ker) == 0 and len(coker) == 1
        assert op.index() == -1
    # index of the compression equals minus the winding number
    u = ci.Loop.laurent([2.0, 1.0], 0)
    op = ci.WindowContext(24).toeplitz(u, one, 24)
    assert op.index() == -ci.winding_number(u) == 0


def test_window_matches_fibered_on_monomials():
    # windowed kernel data for a monomial symbol equals the exact labels
    one = ci.Loop.monomial(1.0, 0)
    zk = ci.Loop.monomial(1.0, 2)
    op = ci.WindowContext(16).toeplitz(one, zk, 16)  # symbol z^-2
    ker, coker = op.kernel_cokernel()
    assert coker == [] and len(ker) == 2
    assert {l for k in ker for l in k} == {0, 1}
    half = BoxUnion(1, [Box(((0, None),))])
    dom = SlotSpace([("P", half)])
    cod = SlotSpace([("Pz", BoxUnion(1, [Box(((2, None),))]))])
    exact = FiberedLatticeOp(dom, cod, {(0, 0): [(1.0, Box(((2, None),)))]})
    kex, cex = exact.kernel_cokernel()
    assert [next(iter(k))[0] for k in kex] == [(0,), (1,)] and cex == []


def test_not_fredholm_asymptotics():
    from detline.errors import NotFredholm

    sp = SlotSpace([("h", BoxUnion(1, [Box(((0, None),))]))])
    zero = FiberedLatticeOp.zero(sp, sp)
    with pytest.raises(NotFredholm):
        zero.kernel_cokernel()


def test_window_det_matches_fibered_det():
    # a monomial-mode determinant-class operator gives the same value
    # through the dense window once the window clears the breakpoints
    delta, eps = 0.4 + 0.2j, -0.3 + 0.1j
    sp = SlotSpace([("h", BoxUnion(1, [Box(((0, None),))]))])
    op = FiberedLatticeOp(
        sp,
        sp,
        {(0, 0): [(1.0, Box(((0, None),))), (delta, Box(((2, 3),))), (eps, Box(((5, 7),)))]},
    )
    want = op.fredholm_det()
    for n in (9, 16, 32):
        labels = list(range(n))
        mat = np.zeros((n, n), dtype=complex)
        for k in range(n):
            m, _, _ = op.fiber((k,))
            mat[k, k] = m[0, 0]
        assert window_det(DenseOp(labels, labels, mat)) == pytest.approx(want)
    assert want == pytest.approx((1 + delta) * (1 + eps) ** 2)
