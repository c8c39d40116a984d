"""Dense windowed operators sharing the fibered operators' interface.

A ``DenseOp`` is a complex matrix between two labelled finite coordinate
spaces.  Kernels and cokernels are found by SVD with a relative
singular-value threshold; consumers certify stability by re-running a
whole computation at a larger window.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch, Unstable
from .lattice import Presentation

SVD_TOL = 1e-8


def _phase_fix(v):
    ix = int(np.argmax(np.abs(v)))
    piv = v[ix]
    if abs(piv) == 0:
        return v
    return v * (abs(piv) / piv)


class DenseOp:
    """Dense matrix between labelled windowed coordinate spaces."""

    def __init__(self, dom_labels, cod_labels, matrix, tol=SVD_TOL):
        self.dom_labels = list(dom_labels)
        self.cod_labels = list(cod_labels)
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.shape != (len(self.cod_labels), len(self.dom_labels)):
            raise ShapeMismatch("matrix shape does not match label counts")
        self.tol = tol
        self._pres = None
        self._svd = None

    # -- elementary algebra ---------------------------------------------------

    def compose(self, other: "DenseOp") -> "DenseOp":
        if other.cod_labels != self.dom_labels:
            raise ShapeMismatch("compose: inner windows differ")
        return DenseOp(other.dom_labels, self.cod_labels, self.matrix @ other.matrix, self.tol)

    def add(self, other: "DenseOp") -> "DenseOp":
        if other.cod_labels != self.cod_labels or other.dom_labels != self.dom_labels:
            raise ShapeMismatch("add: windows differ")
        return DenseOp(self.dom_labels, self.cod_labels, self.matrix + other.matrix, self.tol)

    def sub(self, other: "DenseOp") -> "DenseOp":
        return self.add(other.scale(-1.0))

    def scale(self, c) -> "DenseOp":
        return DenseOp(self.dom_labels, self.cod_labels, c * self.matrix, self.tol)

    @classmethod
    def identity(cls, labels, tol=SVD_TOL) -> "DenseOp":
        return cls(labels, labels, np.eye(len(labels), dtype=complex), tol)

    # -- kernel / cokernel ----------------------------------------------------

    def _decompose(self):
        if self._svd is None:
            if self.matrix.size:
                u, s, vh = np.linalg.svd(self.matrix)
            else:
                u = np.eye(len(self.cod_labels), dtype=complex)
                s = np.zeros(0)
                vh = np.eye(len(self.dom_labels), dtype=complex)
            self._svd = (u, s, vh)
        return self._svd

    def presentation(self) -> Presentation:
        if self._pres is None:
            u, s, vh = self._decompose()
            smax = s[0] if s.size else 0.0
            cut = self.tol * max(smax, 1e-300)
            rank = int(np.sum(s > cut))
            ker = []
            for r in range(rank, len(self.dom_labels)):
                v = _phase_fix(np.conj(vh[r]))
                ker.append(
                    {self.dom_labels[i]: v[i] for i in range(len(v)) if abs(v[i]) > 1e-14}
                )
            coker = []
            for r in range(rank, len(self.cod_labels)):
                w = _phase_fix(u[:, r])
                coker.append(
                    {self.cod_labels[i]: w[i] for i in range(len(w)) if abs(w[i]) > 1e-14}
                )
            self._pres = Presentation(tuple(ker), tuple(coker))
        return self._pres

    def kernel_cokernel(self):
        pres = self.presentation()
        return list(pres.ker), list(pres.coker)

    def index(self) -> int:
        return self.presentation().degree

    # -- vector interface -----------------------------------------------------

    def _dvec(self, vec, labels):
        out = np.zeros(len(labels), dtype=complex)
        pos = {l: i for i, l in enumerate(labels)}
        for l, c in vec.items():
            out[pos[l]] = c
        return out

    def apply(self, vec):
        y = self.matrix @ self._dvec(vec, self.dom_labels)
        return {
            self.cod_labels[i]: y[i] for i in range(len(y)) if abs(y[i]) > 1e-14
        }

    def express_in_kernel(self, vecs):
        pres = self.presentation()
        kmat = np.array(
            [self._dvec(k, self.dom_labels) for k in pres.ker], dtype=complex
        ).T.reshape(len(self.dom_labels), len(pres.ker))
        out = np.zeros((len(pres.ker), len(vecs)), dtype=complex)
        for cix, v in enumerate(vecs):
            x = np.conj(kmat.T) @ self._dvec(v, self.dom_labels)
            out[:, cix] = x
        return out

    def coker_coords(self, vecs):
        pres = self.presentation()
        rmat = np.array(
            [self._dvec(r, self.cod_labels) for r in pres.coker], dtype=complex
        ).reshape(len(pres.coker), len(self.cod_labels))
        out = np.zeros((len(pres.coker), len(vecs)), dtype=complex)
        for cix, v in enumerate(vecs):
            out[:, cix] = np.conj(rmat) @ self._dvec(v, self.cod_labels)
        return out

    # -- padding ---------------------------------------------------------------

    def pad(self, n_dom: int, n_cod: int):
        dom = self.dom_labels + [("auxd", k) for k in range(n_dom)]
        cod = self.cod_labels + [("auxc", k) for k in range(n_cod)]
        mat = np.zeros((len(cod), len(dom)), dtype=complex)
        mat[: len(self.cod_labels), : len(self.dom_labels)] = self.matrix
        return DenseOp(dom, cod, mat, self.tol), list(range(len(self.dom_labels))), list(
            range(len(self.cod_labels))
        )

    def __repr__(self):
        return f"DenseOp({len(self.cod_labels)}x{len(self.dom_labels)})"


def window_kernel_cokernel(op: DenseOp, tol=SVD_TOL):
    """SVD kernel/cokernel of a windowed operator at a given threshold."""
    return DenseOp(op.dom_labels, op.cod_labels, op.matrix, tol).kernel_cokernel()


def window_det(op: DenseOp) -> complex:
    if len(op.dom_labels) != len(op.cod_labels):
        raise ShapeMismatch("determinant of non-square window")
    if not op.dom_labels:
        return 1.0 + 0.0j
    return complex(np.linalg.det(op.matrix))


def certify_stable(values_a, values_b, rel=1e-8):
    """Compare two runs of a windowed pipeline (radius N versus N + 16)."""
    ints_a, dets_a = values_a
    ints_b, dets_b = values_b
    if list(ints_a) != list(ints_b):
        raise Unstable(f"integer data changed with the window: {ints_a} vs {ints_b}")
    for da, db in zip(dets_a, dets_b):
        scale = max(abs(da), abs(db), 1e-300)
        if abs(da - db) > rel * scale:
            raise Unstable(f"value drifted with the window: {da} vs {db}")
    return True
