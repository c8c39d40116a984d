"""Exact fiberwise calculus for block operators on l2(Z^d) slots.

Operators here are block matrices between "slot spaces": ordered lists of
slots, each carrying a sub-lattice support (a union of integer boxes).
Every matrix entry is a finite sum of coefficient * box-indicator, so the
operator is block-diagonal over lattice fibers and all kernel/cokernel,
index, determinant and trace-norm computations reduce to finite per-fiber
linear algebra plus a certification of the asymptotic regions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import _linalg
from ._intervals import Box, BoxUnion, _cell_rep, _cells, full_box
from .errors import (
    NotDeterminantClass,
    NotFiniteRank,
    NotFredholm,
    NotInvertible,
    ShapeMismatch,
)

COEFF_TOL = 1e-12


def pt_key(pt):
    """Canonical lattice order: last axis major, ascending."""
    return tuple(reversed(pt))


def label_key(label):
    pt, slot = label
    return (pt_key(pt), slot)


@dataclass(frozen=True)
class Slot:
    name: str
    support: BoxUnion


class SlotSpace:
    """Ordered list of labelled sub-lattice supports."""

    def __init__(self, slots):
        self.slots = tuple(Slot(name, sup) for name, sup in slots)
        if self.slots:
            dims = {s.support.dim for s in self.slots}
            if len(dims) != 1:
                raise ShapeMismatch("mixed lattice dimensions in one space")
            self.dim = dims.pop()
        else:
            self.dim = 0

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    def active(self, pt):
        return [i for i, s in enumerate(self.slots) if s.support.contains(pt)]

    def compatible(self, other: "SlotSpace") -> bool:
        if len(self) != len(other):
            return False
        return all(a.support == b.support for a, b in zip(self.slots, other.slots))

    def breakpoints(self, axis):
        pts = set()
        for s in self.slots:
            pts |= s.support.breakpoints(axis)
        return pts

    def __repr__(self):
        return f"SlotSpace({[s.name for s in self.slots]})"


@dataclass
class Presentation:
    """Canonical kernel basis and cokernel representatives of an operator."""

    ker: tuple
    coker: tuple

    @property
    def degree(self) -> int:
        return len(self.ker) - len(self.coker)


def _canonical_cells(pairs, support: BoxUnion):
    """Disjoint (value, box) cells of a coefficient-box sum on a support."""
    if not pairs:
        return ()
    dim = support.dim
    boxes = [b for _, b in pairs] + list(support.canonical_boxes())
    out = []
    for cell in _cells(boxes, dim):
        rep = _cell_rep(cell)
        if not support.contains(rep):
            continue
        val = sum(c for c, b in pairs if b.contains(rep))
        if abs(val) > COEFF_TOL:
            out.append((complex(val), cell))
    return tuple(out)


class FiberedLatticeOp:
    """Block operator with box-indicator entries, fiber-diagonal on Z^d."""

    def __init__(self, dom: SlotSpace, cod: SlotSpace, entries, _canonical=False):
        if dom.slots and cod.slots and dom.dim != cod.dim:
            raise ShapeMismatch("domain/codomain lattice dimension mismatch")
        self.dom = dom
        self.cod = cod
        self.dim = dom.dim if dom.slots else cod.dim
        ents = {}
        for (i, j), pairs in entries.items():
            if not (0 <= i < len(cod) and 0 <= j < len(dom)):
                raise ShapeMismatch("entry index out of range")
            if _canonical:
                cells = tuple(pairs)
            else:
                sup = cod.slots[i].support.intersect(dom.slots[j].support)
                cells = _canonical_cells(list(pairs), sup)
            if cells:
                ents[(i, j)] = cells
        self.entries = ents
        self._pres = None
        self._cert = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def identity(cls, space: SlotSpace) -> "FiberedLatticeOp":
        entries = {
            (i, i): [(1.0, b) for b in s.support.canonical_boxes()]
            for i, s in enumerate(space.slots)
        }
        return cls(space, space, entries)

    @classmethod
    def zero(cls, dom: SlotSpace, cod: SlotSpace) -> "FiberedLatticeOp":
        return cls(dom, cod, {})

    @classmethod
    def inclusion(cls, sub: SlotSpace, sup: SlotSpace, positions) -> "FiberedLatticeOp":
        """Slotwise inclusion mapping sub slot j to sup slot positions[j]."""
        entries = {}
        for j, pos in enumerate(positions):
            if not sub.slots[j].support.subtract(sup.slots[pos].support).is_empty():
                raise ShapeMismatch("inclusion target does not contain source")
            entries[(pos, j)] = [
                (1.0, b) for b in sub.slots[j].support.canonical_boxes()
            ]
        return cls(sub, sup, entries)

    # -- elementary algebra ---------------------------------------------------

    def entry_value(self, i, j, pt):
        val = 0.0
        for c, b in self.entries.get((i, j), ()):
            if b.contains(pt):
                val += c
        return val

    def fiber(self, pt):
        """Fiber matrix at pt together with active slot index lists."""
        cache = getattr(self, "_fiber_cache", None)
        if cache is None:
            cache = self._fiber_cache = {}
        hit = cache.get(pt)
        if hit is not None:
            return hit
        dom_active = self.dom.active(pt)
        cod_active = self.cod.active(pt)
        mat = np.zeros((len(cod_active), len(dom_active)), dtype=complex)
        for r, i in enumerate(cod_active):
            for cix, j in enumerate(dom_active):
                mat[r, cix] = self.entry_value(i, j, pt)
        cache[pt] = (mat, dom_active, cod_active)
        return cache[pt]

    def _fiber_batch(self, pts):
        """Vectorised fiber construction for a list of lattice points."""
        cache = getattr(self, "_fiber_cache", None)
        if cache is None:
            cache = self._fiber_cache = {}
        todo = [pt for pt in pts if pt not in cache]
        if todo:
            arr = np.array(todo, dtype=np.int64).reshape(len(todo), self.dim)

            def memb(region):
                out = np.zeros(len(todo), dtype=bool)
                for box in region.canonical_boxes():
                    m = np.ones(len(todo), dtype=bool)
                    for ax, (lo, hi) in enumerate(box.axes):
                        if lo is not None:
                            m &= arr[:, ax] >= lo
                        if hi is not None:
                            m &= arr[:, ax] < hi
                    out |= m
                return out

            dom_m = [memb(s.support) for s in self.dom.slots]
            cod_m = [memb(s.support) for s in self.cod.slots]
            vals = {}
            for (i, j), pairs in self.entries.items():
                v = np.zeros(len(todo), dtype=complex)
                for c, b in pairs:
                    m = np.ones(len(todo), dtype=bool)
                    for ax, (lo, hi) in enumerate(b.axes):
                        if lo is not None:
                            m &= arr[:, ax] >= lo
                        if hi is not None:
                            m &= arr[:, ax] < hi
                    v[m] += c
                vals[(i, j)] = v
            for k, pt in enumerate(todo):
                dom_a = [j for j in range(len(self.dom)) if dom_m[j][k]]
                cod_a = [i for i in range(len(self.cod)) if cod_m[i][k]]
                mat = np.zeros((len(cod_a), len(dom_a)), dtype=complex)
                for r, i in enumerate(cod_a):
                    for cix, j in enumerate(dom_a):
                        ent = vals.get((i, j))
                        if ent is not None:
                            mat[r, cix] = ent[k]
                cache[pt] = (mat, dom_a, cod_a)
        return [cache[pt] for pt in pts]

    def compose(self, other: "FiberedLatticeOp") -> "FiberedLatticeOp":
        """self after other (matrix product self @ other)."""
        if not self.dom.compatible(other.cod):
            raise ShapeMismatch("compose: inner slot spaces differ")
        entries = {}
        for (i, j), left in self.entries.items():
            for (jj, k), right in other.entries.items():
                if jj != j:
                    continue
                acc = entries.setdefault((i, k), [])
                for c1, b1 in left:
                    for c2, b2 in right:
                        b = b1.intersect(b2)
                        if b is not None:
                            acc.append((c1 * c2, b))
        return FiberedLatticeOp(other.dom, self.cod, entries)

    def add(self, other: "FiberedLatticeOp") -> "FiberedLatticeOp":
        if not (self.dom.compatible(other.dom) and self.cod.compatible(other.cod)):
            raise ShapeMismatch("add: slot spaces differ")
        entries = {}
        for key in set(self.entries) | set(other.entries):
            entries[key] = list(self.entries.get(key, ())) + list(
                other.entries.get(key, ())
            )
        return FiberedLatticeOp(self.dom, self.cod, entries)

    def scale(self, c) -> "FiberedLatticeOp":
        entries = {
            key: [(c * v, b) for v, b in pairs] for key, pairs in self.entries.items()
        }
        return FiberedLatticeOp(self.dom, self.cod, entries)

    def sub(self, other: "FiberedLatticeOp") -> "FiberedLatticeOp":
        return self.add(other.scale(-1.0))

    # -- probe geometry -------------------------------------------------------

    def breakpoints(self, axis):
        pts = set()
        pts |= self.dom.breakpoints(axis)
        pts |= self.cod.breakpoints(axis)
        for pairs in self.entries.values():
            for _, b in pairs:
                lo, hi = b.axes[axis]
                if lo is not None:
                    pts.add(lo)
                if hi is not None:
                    pts.add(hi)
        return pts

    def probe_box(self, margin=2) -> Box:
        axes = []
        for ax in range(self.dim):
            pts = self.breakpoints(ax)
            if pts:
                axes.append((min(pts) - margin, max(pts) + margin))
            else:
                axes.append((0, 1))
        return Box(tuple(axes))

    def probe_points(self):
        return list(self.probe_box().points())

    def _asymptotic_reps(self, margin=8):
        """Representative points of the unbounded regions outside the probe."""
        probe = self.probe_box()
        per_axis = []
        for lo, hi in probe.axes:
            per_axis.append(
                [("lo", lo - margin), ("mid", None), ("hi", hi + margin - 1)]
            )
        reps = []
        for combo in itertools.product(*per_axis):
            if all(tag == "mid" for tag, _ in combo):
                continue
            mid_axes = [ax for ax, (tag, _) in enumerate(combo) if tag == "mid"]
            fixed = [val for _, val in combo]
            if not mid_axes:
                reps.append(tuple(fixed))
                continue
            ranges = []
            for ax in range(self.dim):
                if ax in mid_axes:
                    lo, hi = probe.axes[ax]
                    ranges.append(range(lo, hi))
                else:
                    ranges.append([fixed[ax]])
            for pt in itertools.product(*ranges):
                reps.append(tuple(pt))
        return reps

    def certify_fredholm(self):
        """Check that all asymptotic fibers are bijective."""
        if self._cert is None:
            reps = self._asymptotic_reps()
            self._fiber_batch(reps)
            for pt in reps:
                mat, dom_a, cod_a = self.fiber(pt)
                if len(dom_a) != len(cod_a):
                    raise NotFredholm(f"non-square asymptotic fiber at {pt}")
                if len(dom_a) and abs(_linalg.det(mat)) <= 1e-10:
                    raise NotFredholm(f"singular asymptotic fiber at {pt}")
            self._cert = True
        return self._cert

    # -- kernel / cokernel ----------------------------------------------------

    def presentation(self) -> Presentation:
        if self._pres is None:
            self.certify_fredholm()
            ker, coker = [], []
            pts = self.probe_points()
            self._fiber_batch(pts)
            for pt in pts:
                mat, dom_a, cod_a = self.fiber(pt)
                if not dom_a and not cod_a:
                    continue
                for v in _linalg.nullspace(mat):
                    ker.append({(pt, dom_a[ix]): v[ix] for ix in range(len(dom_a)) if abs(v[ix]) > COEFF_TOL})
                for r in _linalg.coker_free_rows(mat):
                    coker.append({(pt, cod_a[r]): 1.0 + 0.0j})
            self._pres = Presentation(tuple(ker), tuple(coker))
        return self._pres

    def kernel_cokernel(self):
        pres = self.presentation()
        return list(pres.ker), list(pres.coker)

    def index(self) -> int:
        return self.presentation().degree

    # -- vector interface -----------------------------------------------------

    def apply(self, vec):
        out = {}
        by_pt = {}
        for (pt, slot), c in vec.items():
            by_pt.setdefault(pt, {})[slot] = c
        for pt, coords in by_pt.items():
            mat, dom_a, cod_a = self.fiber(pt)
            x = np.array([coords.get(j, 0.0) for j in dom_a], dtype=complex)
            unknown = set(coords) - set(dom_a)
            if unknown:
                raise ShapeMismatch(f"vector uses inactive slots {unknown} at {pt}")
            y = mat @ x if len(dom_a) else np.zeros(len(cod_a), dtype=complex)
            for r, i in enumerate(cod_a):
                if abs(y[r]) > COEFF_TOL:
                    out[(pt, i)] = out.get((pt, i), 0.0) + y[r]
        return out

    def express_in_kernel(self, vecs):
        """Coordinates of the given kernel vectors in the canonical basis."""
        pres = self.presentation()
        out = np.zeros((len(pres.ker), len(vecs)), dtype=complex)
        ker_by_pt = {}
        for kix, kv in enumerate(pres.ker):
            pt = next(iter(kv))[0]
            ker_by_pt.setdefault(pt, []).append(kix)
        for cix, v in enumerate(vecs):
            by_pt = {}
            for (pt, slot), c in v.items():
                by_pt.setdefault(pt, {})[(pt, slot)] = c
            for pt, coords in by_pt.items():
                kids = ker_by_pt.get(pt, [])
                labels = sorted(
                    {l for k in kids for l in pres.ker[k]} | set(coords), key=label_key
                )
                if not kids:
                    raise np.linalg.LinAlgError("vector not in kernel (no fiber)")
                kmat = np.array(
                    [[pres.ker[k].get(l, 0.0) for k in kids] for l in labels],
                    dtype=complex,
                )
                rhs = np.array([coords.get(l, 0.0) for l in labels], dtype=complex)
                sol = _linalg.solve_exact(kmat, rhs)
                for ix, k in enumerate(kids):
                    out[k, cix] += sol[ix]
        return out

    def coker_coords(self, vecs):
        """Cokernel-class coordinates of codomain vectors."""
        pres = self.presentation()
        out = np.zeros((len(pres.coker), len(vecs)), dtype=complex)
        for cix, v in enumerate(vecs):
            by_pt = {}
            for (pt, slot), c in v.items():
                by_pt.setdefault(pt, {})[slot] = c
            for pt, coords in by_pt.items():
                mat, dom_a, cod_a = self.fiber(pt)
                reps = [
                    (kix, rv)
                    for kix, rv in enumerate(pres.coker)
                    if next(iter(rv))[0] == pt
                ]
                rep_mat = np.array(
                    [[rv.get((pt, i), 0.0) for _, rv in reps] for i in cod_a],
                    dtype=complex,
                ).reshape(len(cod_a), len(reps))
                aug = np.hstack([mat, rep_mat])
                rhs = np.array([coords.get(i, 0.0) for i in cod_a], dtype=complex)
                sol = _linalg.solve_exact(aug, rhs)
                for ix, (kix, _) in enumerate(reps):
                    out[kix, cix] += sol[len(dom_a) + ix]
        return out

    # -- padding (aux coordinates for index-shifting) -------------------------

    def pad(self, n_dom: int, n_cod: int):
        """Add zero-mapped auxiliary slots at fresh lattice points.

        Returns (padded op, dom positions, cod positions) where the
        positions embed the original slots into the padded spaces.
        """
        probe = self.probe_box(margin=4)
        base = max(hi for _, hi in probe.axes)
        aux_pts = [tuple(base + 2 * k for _ in range(self.dim)) for k in range(max(n_dom, n_cod))]
        dom_slots = [(s.name, s.support) for s in self.dom.slots]
        cod_slots = [(s.name, s.support) for s in self.cod.slots]
        for k in range(n_dom):
            dom_slots.append(
                (f"_auxd{k}", BoxUnion(self.dim, [Box(tuple((x, x + 1) for x in aux_pts[k]))]))
            )
        for k in range(n_cod):
            cod_slots.append(
                (f"_auxc{k}", BoxUnion(self.dim, [Box(tuple((x, x + 1) for x in aux_pts[k]))]))
            )
        entries = {key: list(pairs) for key, pairs in self.entries.items()}
        padded = FiberedLatticeOp(SlotSpace(dom_slots), SlotSpace(cod_slots), entries)
        return padded, list(range(len(self.dom))), list(range(len(self.cod)))

    # -- scalar invariants ----------------------------------------------------

    def is_finite_box(self) -> bool:
        return all(
            b.is_finite() for pairs in self.entries.values() for _, b in pairs
        )

    def fredholm_det(self) -> complex:
        if not self.dom.compatible(self.cod):
            raise NotDeterminantClass("domain and codomain differ")
        reps = self._asymptotic_reps()
        self._fiber_batch(reps)
        for pt in reps:
            mat, dom_a, cod_a = self.fiber(pt)
            if dom_a != cod_a or (
                mat.size and np.max(np.abs(mat - np.eye(len(dom_a)))) > 1e-10
            ):
                raise NotDeterminantClass(f"asymptotic fiber at {pt} is not identity")
        val = 1.0 + 0.0j
        pts = self.probe_points()
        self._fiber_batch(pts)
        for pt in pts:
            mat, dom_a, cod_a = self.fiber(pt)
            if len(dom_a) != len(cod_a):
                raise NotDeterminantClass(f"non-square fiber at {pt}")
            if dom_a:
                val *= _linalg.det(mat)
        return val

    def trace_norm(self) -> float:
        if not self.is_finite_box():
            raise NotFiniteRank("entries not supported on finite boxes")
        total = 0.0
        for pt in self.probe_points():
            mat, dom_a, cod_a = self.fiber(pt)
            if mat.size:
                total += float(np.sum(np.linalg.svd(mat, compute_uv=False)))
        return total

    def inverse(self) -> "FiberedLatticeOp":
        """Exact inverse of a fiberwise-invertible operator."""
        boxes = []
        for pairs in self.entries.values():
            boxes.extend(b for _, b in pairs)
        for sp in (self.dom, self.cod):
            for s in sp.slots:
                boxes.extend(s.support.canonical_boxes())
        if not boxes:
            boxes = [full_box(self.dim)]
        entries = {}
        for cell in _cells(boxes, self.dim):
            rep = _cell_rep(cell)
            mat, dom_a, cod_a = self.fiber(rep)
            if len(dom_a) != len(cod_a):
                raise NotInvertible(f"non-square fiber at {rep}")
            if not dom_a:
                continue
            if abs(_linalg.det(mat)) <= 1e-12:
                raise NotInvertible(f"singular fiber at {rep}")
            inv = np.linalg.inv(mat)
            for r, j in enumerate(dom_a):
                for cix, i in enumerate(cod_a):
                    if abs(inv[r, cix]) > COEFF_TOL:
                        entries.setdefault((j, i), []).append((inv[r, cix], cell))
        return FiberedLatticeOp(self.cod, self.dom, entries)

    def __repr__(self):
        return f"FiberedLatticeOp({len(self.cod)}x{len(self.dom)}, dim={self.dim})"


def compose(a: FiberedLatticeOp, b: FiberedLatticeOp) -> FiberedLatticeOp:
    """Operator composition a after b."""
    return a.compose(b)


def add(a: FiberedLatticeOp, b: FiberedLatticeOp) -> FiberedLatticeOp:
    return a.add(b)


def scale(c, a: FiberedLatticeOp) -> FiberedLatticeOp:
    return a.scale(c)
