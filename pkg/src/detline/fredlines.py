"""Determinant lines of Fredholm operators and their canonical maps.

Maps between determinant lines are stored as a single complex scalar
relative to canonical frames: the frame of |T| is (wedge of the canonical
kernel basis) tensor (dual wedge of the canonical cokernel
representatives), in presentation order.  Composing maps multiplies
scalars.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _linalg
from ._intervals import Box, BoxUnion
from .graded import ExactTriangle, GradedLine, GradedVectorSpace, torsion_of_triangle
from .lattice import FiberedLatticeOp, Presentation, SlotSpace, label_key
from .errors import (
    IndexMismatch,
    NotComplementary,
    NotQuasiIso,
    NotTraceClassDifference,
    ShapeMismatch,
)


@dataclass(frozen=True)
class LineMap:
    """Line isomorphism: tensor of source frames -> scalar * target frame."""

    scalar: complex
    degree_in: int
    degree_out: int


def det_line(op) -> GradedLine:
    """Determinant line of a certified Fredholm operator."""
    pres = op.presentation()
    return GradedLine(pres.degree, f"|ker {len(pres.ker)} (x) coker {len(pres.coker)}*|")


def _space_of(pres: Presentation, tag: str) -> GradedVectorSpace:
    even = tuple((tag, "k", i) for i in range(len(pres.ker)))
    odd = tuple((tag, "c", i) for i in range(len(pres.coker)))
    return GradedVectorSpace(even, odd)


def triangle_of_composition(T, S, ST=None):
    """Six-term exact triangle I(T) -> I(ST) -> I(S) of a composition."""
    if ST is None:
        ST = S.compose(T)
    pT, pS, pST = T.presentation(), S.presentation(), ST.presentation()
    i_plus = ST.express_in_kernel(list(pT.ker))
    i_minus = ST.coker_coords([S.apply(r) for r in pT.coker])
    q_plus = S.express_in_kernel([T.apply(k) for k in pST.ker])
    q_minus = S.coker_coords(list(pST.coker))
    d_plus = T.coker_coords(list(pS.ker))
    d_minus = np.zeros((len(pT.ker), len(pS.coker)))
    tri = ExactTriangle(
        U=_space_of(pT, "T"),
        V=_space_of(pST, "ST"),
        W=_space_of(pS, "S"),
        i_plus=i_plus,
        i_minus=i_minus,
        q_plus=q_plus,
        q_minus=q_minus,
        d_plus=d_plus,
        d_minus=d_minus,
    )
    return tri, ST


def torsion(T, S, ST=None) -> LineMap:
    """Torsion isomorphism |T| (x) |S| -> |ST| on canonical frames."""
    tri, ST = triangle_of_composition(T, S, ST)
    tor = torsion_of_triangle(tri)
    deg_in = T.presentation().degree + S.presentation().degree
    return LineMap(1.0 / tor.scalar, deg_in, ST.presentation().degree)


def torsion_chain(ops) -> LineMap:
    """|A1| (x) ... (x) |An| -> |An ... A1| for a composable chain.

    `ops` is listed in application order (A1 acts first).
    """
    scalar = 1.0 + 0.0j
    partial = ops[-1]
    for op in reversed(ops[:-1]):
        step = torsion(op, partial)
        scalar *= step.scalar
        partial = partial.compose(op)
    deg_in = sum(op.presentation().degree for op in ops)
    return LineMap(scalar, deg_in, partial.presentation().degree)


def quasi_map(phi, psi, T1, T2, check=True) -> LineMap:
    """Line map |T1| -> |T2| induced by a quasi-isomorphism (phi, psi)."""
    if check:
        lhs = psi.compose(T1)
        rhs = T2.compose(phi)
        diff = lhs.sub(rhs)
        if isinstance(diff, FiberedLatticeOp):
            if diff.entries:
                raise NotQuasiIso("psi T1 != T2 phi")
        elif diff.matrix.size and np.max(np.abs(diff.matrix)) > 1e-9:
            raise NotQuasiIso("psi T1 != T2 phi")
    p1, p2 = T1.presentation(), T2.presentation()
    if len(p1.ker) != len(p2.ker) or len(p1.coker) != len(p2.coker):
        raise NotQuasiIso("kernel/cokernel dimensions differ")
    a = T2.express_in_kernel([phi.apply(k) for k in p1.ker])
    b = T2.coker_coords([psi.apply(r) for r in p1.coker])
    det_a, det_b = _linalg.det(a), _linalg.det(b)
    if abs(det_a) < 1e-12 or abs(det_b) < 1e-12:
        raise NotQuasiIso("induced kernel/cokernel maps are singular")
    return LineMap(det_a / det_b, p1.degree, p2.degree)


def stabilization(T, T_big, dom_positions=None, cod_positions=None) -> LineMap:
    """Stabilisation |T| -> |T + Gamma| via the slotwise inclusions."""
    if not isinstance(T, FiberedLatticeOp):
        raise ShapeMismatch("stabilisation is defined for fibered operators")
    if dom_positions is None:
        dom_positions = list(range(len(T.dom)))
    if cod_positions is None:
        cod_positions = list(range(len(T.cod)))
    try:
        phi = FiberedLatticeOp.inclusion(T.dom, T_big.dom, dom_positions)
        psi = FiberedLatticeOp.inclusion(T.cod, T_big.cod, cod_positions)
        return quasi_map(phi, psi, T, T_big)
    except (NotQuasiIso, ShapeMismatch) as exc:
        raise NotComplementary(str(exc)) from exc


def _matcher_images(pres: Presentation):
    return [dict(r) for r in pres.coker]


def _chi_functionals(kers):
    """Dual functionals to kernel vectors, grouped per fiber / window."""
    by_pt = {}
    for j, kv in enumerate(kers):
        pt = next(iter(kv))[0] if isinstance(next(iter(kv)), tuple) and isinstance(next(iter(kv))[0], tuple) else None
        by_pt.setdefault(pt, []).append(j)
    chis = [None] * len(kers)
    for pt, idxs in by_pt.items():
        labels = sorted({l for j in idxs for l in kers[j]}, key=_safe_key)
        kmat = np.array(
            [[kers[j].get(l, 0.0) for j in idxs] for l in labels], dtype=complex
        )
        pinv = np.linalg.pinv(kmat)
        for row, j in enumerate(idxs):
            chis[j] = {labels[c]: pinv[row, c] for c in range(len(labels))}
    return chis


def _safe_key(label):
    try:
        return (0, label_key(label))
    except Exception:
        return (1, repr(label))


def _fibered_pert_det(T1, T2, images1, images2):
    """det((T2 + F2)(T1 + F1)^{-1}) over the exceptional fiber block."""
    p1, p2 = T1.presentation(), T2.presentation()
    lo = [min(a[0], b[0]) for a, b in zip(T1.probe_box().axes, T2.probe_box().axes)]
    hi = [max(a[1], b[1]) for a, b in zip(T1.probe_box().axes, T2.probe_box().axes)]
    pts = list(Box(tuple(zip(lo, hi))).points())
    T1._fiber_batch(pts)
    T2._fiber_batch(pts)
    exceptional = set()
    for pt in pts:
        m1, d1, c1 = T1.fiber(pt)
        m2, _, _ = T2.fiber(pt)
        if m1.shape != m2.shape or (
            m1.size and np.max(np.abs(m1 - m2)) > 1e-12 * max(1.0, np.max(np.abs(m1)))
        ):
            exceptional.add(pt)
            continue
        if len(d1) != len(c1):
            exceptional.add(pt)
            continue
        if d1 and abs(_linalg.det(m1)) < 1e-10:
            exceptional.add(pt)
    for coll in (p1.ker, p1.coker, p2.ker, p2.coker, images1, images2):
        for vec in coll:
            for (pt, _slot) in vec:
                exceptional.add(pt)
    pts_e = sorted(exceptional, key=lambda p: tuple(reversed(p)))
    dom_labels, cod_labels = [], []
    for pt in pts_e:
        dom_labels.extend((pt, j) for j in T1.dom.active(pt))
        cod_labels.extend((pt, i) for i in T1.cod.active(pt))
    if len(dom_labels) != len(cod_labels):
        raise IndexMismatch("exceptional block is not square")
    dpos = {l: i for i, l in enumerate(dom_labels)}
    cpos = {l: i for i, l in enumerate(cod_labels)}
    n = len(dom_labels)

    def block(T, kers, images):
        mat = np.zeros((n, n), dtype=complex)
        for pt in pts_e:
            m, d_a, c_a = T.fiber(pt)
            for r, i in enumerate(c_a):
                for c, j in enumerate(d_a):
                    mat[cpos[(pt, i)], dpos[(pt, j)]] = m[r, c]
        chis = _chi_functionals(kers) if kers else []
        for j, img in enumerate(images):
            for rl, rv in img.items():
                for cl, cv in chis[j].items():
                    mat[cpos[rl], dpos[cl]] += rv * cv
        return mat

    d1 = _linalg.det(block(T1, list(p1.ker), images1))
    d2 = _linalg.det(block(T2, list(p2.ker), images2))
    if abs(d1) < 1e-300:
        raise IndexMismatch("completion of the first operator is singular")
    return d2 / d1


def _dense_pert_det(T1, T2, images1, images2):
    p1, p2 = T1.presentation(), T2.presentation()
    if len(T1.dom_labels) != len(T1.cod_labels):
        raise IndexMismatch("window is not square")
    dpos = {l: i for i, l in enumerate(T1.dom_labels)}
    cpos = {l: i for i, l in enumerate(T1.cod_labels)}

    def block(T, kers, images):
        mat = np.array(T.matrix, dtype=complex)
        chis = _chi_functionals(kers) if kers else []
        for j, img in enumerate(images):
            for rl, rv in img.items():
                for cl, cv in chis[j].items():
                    mat[cpos[rl], dpos[cl]] += rv * cv
        return mat

    d1 = _linalg.det(block(T1, list(p1.ker), images1))
    d2 = _linalg.det(block(T2, list(p2.ker), images2))
    if abs(d1) < 1e-300:
        raise IndexMismatch("completion of the first operator is singular")
    return d2 / d1


def _pert_index0(T1, T2, images1=None, images2=None) -> complex:
    p1, p2 = T1.presentation(), T2.presentation()
    if images1 is None:
        images1 = _matcher_images(p1)
    if images2 is None:
        images2 = _matcher_images(p2)
    c1 = _linalg.det(T1.coker_coords(images1))
    c2 = _linalg.det(T2.coker_coords(images2))
    if isinstance(T1, FiberedLatticeOp):
        ratio = _fibered_pert_det(T1, T2, images1, images2)
    else:
        ratio = _dense_pert_det(T1, T2, images1, images2)
    return ratio * c1 / c2


def _split_triangle_scalar(T, padded, aux_dom, aux_cod) -> complex:
    """Det of the split triangle I(T) -> I(T + 0) -> I(0_{m,n})."""
    pT, pP = T.presentation(), padded.presentation()
    i_plus = padded.express_in_kernel(list(pT.ker))
    i_minus = padded.coker_coords(list(pT.coker))
    q_plus = np.array(
        [[kv.get(al, 0.0) for kv in pP.ker] for al in aux_dom], dtype=complex
    ).reshape(len(aux_dom), len(pP.ker))
    q_minus = np.array(
        [[rv.get(al, 0.0) for rv in pP.coker] for al in aux_cod], dtype=complex
    ).reshape(len(aux_cod), len(pP.coker))
    tri = ExactTriangle(
        U=_space_of(pT, "T"),
        V=_space_of(pP, "P"),
        W=GradedVectorSpace(
            tuple(("0", "k", i) for i in range(len(aux_dom))),
            tuple(("0", "c", i) for i in range(len(aux_cod))),
        ),
        i_plus=i_plus,
        i_minus=i_minus,
        q_plus=q_plus,
        q_minus=q_minus,
        d_plus=np.zeros((len(pT.coker), len(aux_dom))),
        d_minus=np.zeros((len(pT.ker), len(aux_cod))),
    )
    return torsion_of_triangle(tri).scalar


def _pad_pair(T1, T2, n_dom, n_cod):
    if isinstance(T1, FiberedLatticeOp):
        probe1, probe2 = T1.probe_box(margin=4), T2.probe_box(margin=4)
        base = max(
            max(hi for _, hi in probe1.axes), max(hi for _, hi in probe2.axes)
        )
        aux_pts = [
            tuple(base + 2 * k for _ in range(T1.dim))
            for k in range(max(n_dom, n_cod))
        ]
        out = []
        for T in (T1, T2):
            dom_slots = [(s.name, s.support) for s in T.dom.slots]
            cod_slots = [(s.name, s.support) for s in T.cod.slots]
            for k in range(n_dom):
                dom_slots.append(
                    (
                        f"_auxd{k}",
                        BoxUnion(T.dim, [Box(tuple((x, x + 1) for x in aux_pts[k]))]),
                    )
                )
            for k in range(n_cod):
                cod_slots.append(
                    (
                        f"_auxc{k}",
                        BoxUnion(T.dim, [Box(tuple((x, x + 1) for x in aux_pts[k]))]),
                    )
                )
            entries = {key: list(pairs) for key, pairs in T.entries.items()}
            out.append(FiberedLatticeOp(SlotSpace(dom_slots), SlotSpace(cod_slots), entries))
        n_slots_dom = len(T1.dom)
        n_slots_cod = len(T1.cod)
        aux_dom = [(aux_pts[k], n_slots_dom + k) for k in range(n_dom)]
        aux_cod = [(aux_pts[k], n_slots_cod + k) for k in range(n_cod)]
        return out[0], out[1], aux_dom, aux_cod
    p1, _, _ = T1.pad(n_dom, n_cod)
    p2, _, _ = T2.pad(n_dom, n_cod)
    aux_dom = [("auxd", k) for k in range(n_dom)]
    aux_cod = [("auxc", k) for k in range(n_cod)]
    return p1, p2, aux_dom, aux_cod


def perturbation(T1, T2, images1=None, images2=None) -> LineMap:
    """Perturbation isomorphism |T1| -> |T2| for trace-class differences."""
    diff = T1.sub(T2)
    if isinstance(diff, FiberedLatticeOp):
        if not diff.is_finite_box():
            raise NotTraceClassDifference("difference has unbounded support")
    idx1, idx2 = T1.index(), T2.index()
    if idx1 != idx2:
        raise IndexMismatch(f"indices differ: {idx1} vs {idx2}")
    if idx1 == 0:
        scalar = _pert_index0(T1, T2, images1, images2)
        return LineMap(scalar, idx1, idx2)
    n_dom, n_cod = max(0, -idx1), max(0, idx1)
    P1, P2, aux_dom, aux_cod = _pad_pair(T1, T2, n_dom, n_cod)
    t1 = _split_triangle_scalar(T1, P1, aux_dom, aux_cod)
    t2 = _split_triangle_scalar(T2, P2, aux_dom, aux_cod)
    s_pad = _pert_index0(P1, P2)
    return LineMap(t2 * s_pad / t1, idx1, idx2)
