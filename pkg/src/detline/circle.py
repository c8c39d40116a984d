"""Loops on the circle: restricted-GL 2-cocycle and the tame symbol.

Monomial loops are handled exactly by the fibered d=1 calculus (Hardy
projections become half-line indicators).  General nonvanishing Laurent
loops run through windowed Toeplitz compressions in the translation
gauge, certified by re-running at a larger window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fredlines
from ._intervals import Box, BoxUnion
from .errors import BranchJump, Uncertified, Unstable
from .lattice import FiberedLatticeOp, SlotSpace
from .windows import DenseOp, certify_stable

GRID = 4096
NONVANISH_TOL = 1e-6


@dataclass(frozen=True)
class Loop:
    """Invertible loop: monomial mu z^n or a certified Laurent polynomial."""

    mu: complex = 1.0
    n: int = 0
    coeffs: tuple = ()  # ((k, c), ...) for Laurent mode; empty for monomial
    k_min: int = 0

    @classmethod
    def monomial(cls, mu, n=0) -> "Loop":
        if mu == 0:
            raise Uncertified("monomial scalar must be nonzero")
        return cls(complex(mu), int(n))

    @classmethod
    def laurent(cls, coeffs, k_min=0) -> "Loop":
        pairs = tuple(
            (k_min + i, complex(c)) for i, c in enumerate(coeffs) if abs(c) > 0
        )
        loop = cls(1.0, 0, pairs, k_min)
        if loop.min_modulus() <= NONVANISH_TOL:
            raise Uncertified("loop not certified nonvanishing on the grid")
        return loop

    @property
    def is_monomial(self) -> bool:
        return not self.coeffs

    def samples(self, grid=GRID):
        t = np.arange(grid) / grid
        z = np.exp(2j * np.pi * t)
        if self.is_monomial:
            return self.mu * z**self.n
        vals = np.zeros(grid, dtype=complex)
        for k, c in self.coeffs:
            vals += c * z**k
        return vals

    def min_modulus(self, grid=GRID) -> float:
        return float(np.min(np.abs(self.samples(grid))))

    def at(self, z) -> complex:
        if self.is_monomial:
            return self.mu * z**self.n
        return sum(c * z**k for k, c in self.coeffs)

    def inverse_samples(self, grid=GRID):
        return 1.0 / self.samples(grid)

    def __mul__(self, other: "Loop") -> "Loop":
        if self.is_monomial and other.is_monomial:
            return Loop.monomial(self.mu * other.mu, self.n + other.n)
        a, b = self.samples(), other.samples()
        coeffs = np.fft.fft(a * b) / len(a)
        return _loop_from_fft(coeffs)

    def __str__(self):
        if self.is_monomial:
            return f"({self.mu.real:g},{self.mu.imag:g})*z^{self.n}"
        return ":".join(f"({c.real:g},{c.imag:g})" for _, c in self.coeffs) + f"@{self.coeffs[0][0]}"


def _loop_from_fft(coeffs, tol=1e-12):
    n = len(coeffs)
    pairs = []
    for i, c in enumerate(coeffs):
        k = i if i <= n // 2 else i - n
        if abs(c) > tol:
            pairs.append((k, complex(c)))
    pairs.sort()
    k_min = pairs[0][0]
    dense = {k: c for k, c in pairs}
    seq = [dense.get(k, 0.0) for k in range(k_min, pairs[-1][0] + 1)]
    return Loop.laurent(seq, k_min)


def winding_number(u: Loop, grid=GRID) -> int:
    """Total argument increment over one turn, as an integer."""
    if u.is_monomial:
        return u.n
    vals = u.samples(grid)
    if np.min(np.abs(vals)) <= NONVANISH_TOL:
        raise Uncertified("loop not certified nonvanishing")
    ratios = np.roll(vals, -1) / vals
    total = np.sum(np.angle(ratios))
    return int(round(total / (2 * np.pi)))


def symbol_coeffs(u: Loop, v: Loop, band: int, grid=GRID):
    """Fourier coefficients of v^{-1} u on [-band, band] with tail report."""
    vals = u.samples(grid) * v.inverse_samples(grid)
    c = np.fft.fft(vals) / grid
    out = {}
    for k in range(-band, band + 1):
        out[k] = complex(c[k % grid])
    tail = max(
        (abs(c[k % grid]) for k in range(band + 1, grid - band)), default=0.0
    )
    return out, float(tail)


# --------------------------------------------------------------------------
# Exact fibered mode (monomial loops)
# --------------------------------------------------------------------------


def _half(n: int) -> BoxUnion:
    return BoxUnion(1, [Box(((n, None),))])


def _mor_op(nu: int, nv: int) -> FiberedLatticeOp:
    """P_v P_u : Im P_u -> Im P_v for monomial windings nu, nv."""
    dom = SlotSpace([("u", _half(nu))])
    cod = SlotSpace([("v", _half(nv))])
    return FiberedLatticeOp(dom, cod, {(0, 0): [(1.0, Box(((max(nu, nv), None),)))]})


@dataclass(frozen=True)
class _MonoMor:
    """Morphism u -> v in the exact circle category, frame coefficient."""

    nu: int
    nv: int
    coeff: complex

    def op(self) -> FiberedLatticeOp:
        return _mor_op(self.nu, self.nv)


def _mono_compose(x: _MonoMor, y: _MonoMor) -> _MonoMor:
    assert x.nv == y.nu
    T, S = x.op(), y.op()
    tors = fredlines.torsion(T, S)
    comp = S.compose(T)
    target = _mor_op(x.nu, y.nv)
    pert = fredlines.perturbation(comp, target)
    return _MonoMor(x.nu, y.nv, x.coeff * y.coeff * tors.scalar * pert.scalar)


def _mono_alpha(g: Loop) -> _MonoMor:
    """Chosen isomorphism 1 -> g; frame element (perturbation-normalised
    at winding zero, where it equals the frame anyway)."""
    return _MonoMor(0, g.n, 1.0 + 0.0j)


def _mono_invert(x: _MonoMor) -> _MonoMor:
    probe = _MonoMor(x.nv, x.nu, 1.0 + 0.0j)
    s = _mono_compose(x, probe).coeff
    return _MonoMor(x.nv, x.nu, 1.0 / s)


def _mono_act(g: Loop, x: _MonoMor) -> _MonoMor:
    """Conjugation: shift the lattice labels and scale by the degree power."""
    T = x.op()
    deg = T.presentation().degree
    return _MonoMor(x.nu + g.n, x.nv + g.n, x.coeff * g.mu**deg)


def _cres_monomial(g: Loop, h: Loop, base: int = 0) -> complex:
    """Cochain value from the base object z^base (frame element choices)."""
    gh = g * h
    a_gh = _MonoMor(base, base + gh.n, 1.0 + 0.0j)
    a_h = _MonoMor(base, base + h.n, 1.0 + 0.0j)
    a_g = _MonoMor(base, base + g.n, 1.0 + 0.0j)
    gah_inv = _mono_act(g, _mono_invert(a_h))
    loop = _mono_compose(_mono_compose(a_gh, gah_inv), _mono_invert(a_g))
    assert loop.nu == base and loop.nv == base
    return complex(loop.coeff)


def cres_cochain_base(g: Loop, h: Loop, base: int, twist=None) -> complex:
    """The monomial-mode cochain from an alternative base object z^base.

    `twist` optionally rescales the chosen isomorphisms, g -> C^*.
    """
    tw = twist or (lambda _g: 1.0)
    gh = g * h
    a_gh = _MonoMor(base, base + gh.n, tw(gh))
    a_h = _MonoMor(base, base + h.n, tw(h))
    a_g = _MonoMor(base, base + g.n, tw(g))
    gah_inv = _mono_act(g, _mono_invert(a_h))
    loop = _mono_compose(_mono_compose(a_gh, gah_inv), _mono_invert(a_g))
    assert loop.nu == base and loop.nv == base
    return complex(loop.coeff)


def base_change_cochain(g: Loop, base: int, twist=None) -> complex:
    """One-cochain comparing the base-object choices z^0 and z^base.

    Computed as the value of alpha_g^{-1} o g(phi^{-1}) o beta_g o phi,
    an automorphism of the unit object; `twist` rescales beta_g.
    """
    tw = twist or (lambda _g: 1.0)
    phi = _MonoMor(0, base, 1.0 + 0.0j)
    beta_g = _MonoMor(base, base + g.n, tw(g))
    g_phi_inv = _mono_act(g, _mono_invert(phi))
    a_g_inv = _mono_invert(_MonoMor(0, g.n, 1.0 + 0.0j))
    loop = _mono_compose(
        _mono_compose(_mono_compose(phi, beta_g), g_phi_inv), a_g_inv
    )
    assert loop.nu == 0 and loop.nv == 0
    return complex(loop.coeff)


# --------------------------------------------------------------------------
# Windowed mode (Laurent loops), computed in the translation gauge
# --------------------------------------------------------------------------


class WindowContext:
    """Windowed Toeplitz compressions with chained rectangular windows."""

    def __init__(self, n: int, band: int = 48):
        self.n = n
        self.band = band
        self._ops = {}
        self.tail = 0.0

    def toeplitz(self, u: Loop, v: Loop, dom_n: int) -> DenseOp:
        """Compression of v^{-1} u between Hardy windows [0, dom_n) and
        [0, dom_n - w(u) + w(v))."""
        w = winding_number(u) - winding_number(v)
        key = (str(u), str(v), dom_n)
        if key not in self._ops:
            coeffs, tail = symbol_coeffs(u, v, self.band)
            self.tail = max(self.tail, tail)
            cod_n = dom_n + w
            mat = np.zeros((cod_n, dom_n), dtype=complex)
            for j in range(cod_n):
                for k in range(dom_n):
                    c = coeffs.get(j - k)
                    if c is not None:
                        mat[j, k] = c
            self._ops[key] = DenseOp(list(range(dom_n)), list(range(cod_n)), mat)
        return self._ops[key]

    def completed(self, op: DenseOp):
        """op plus the canonical kernel-to-cokernel matcher, as a matrix."""
        pres = op.presentation()
        mat = np.array(op.matrix, dtype=complex)
        dpos = {l: i for i, l in enumerate(op.dom_labels)}
        cpos = {l: i for i, l in enumerate(op.cod_labels)}
        for kv, rv in zip(pres.ker, pres.coker):
            for rl, rc in rv.items():
                for cl, cc in kv.items():
                    mat[cpos[rl], dpos[cl]] += rc * np.conj(cc)
        return mat


@dataclass(frozen=True)
class _WinMor:
    """Morphism u -> v, coefficient relative to the frame of its window op."""

    u: Loop
    v: Loop
    dom_n: int
    coeff: complex


def _win_compose(ctx: WindowContext, x: _WinMor, y: _WinMor) -> _WinMor:
    T = ctx.toeplitz(x.u, x.v, x.dom_n)
    S = ctx.toeplitz(y.u, y.v, y.dom_n)
    assert S.dom_labels == T.cod_labels
    tors = fredlines.torsion(T, S)
    comp = S.compose(T)
    target = ctx.toeplitz(x.u, y.v, x.dom_n)
    pert = fredlines.perturbation(comp, target)
    return _WinMor(x.u, y.v, x.dom_n, x.coeff * y.coeff * tors.scalar * pert.scalar)


def _win_alpha(ctx: WindowContext, u: Loop, v: Loop, dom_n: int) -> _WinMor:
    """The chosen isomorphism u -> v evaluated in its window line.

    Index-zero case: perturbation from the inverse of the completed
    compression of v^{-1} u; otherwise the canonical frame element.
    """
    op = ctx.toeplitz(u, v, dom_n)
    if winding_number(u) == winding_number(v):
        sym = ctx.toeplitz(v, u, dom_n)  # compression of u^{-1} v
        inv = DenseOp(op.dom_labels, op.cod_labels, np.linalg.inv(ctx.completed(sym)))
        pert = fredlines.perturbation(inv, op)
        return _WinMor(u, v, dom_n, pert.scalar)
    return _WinMor(u, v, dom_n, 1.0 + 0.0j)


def _win_invert(ctx: WindowContext, x: _WinMor) -> _WinMor:
    probe = _WinMor(
        x.v, x.u, x.dom_n + winding_number(x.u) - winding_number(x.v), 1.0 + 0.0j
    )
    s = _win_compose(ctx, x, probe).coeff
    return _WinMor(probe.u, probe.v, probe.dom_n, 1.0 / s)


def _cres_window(g: Loop, h: Loop, n: int) -> complex:
    ctx = WindowContext(n)
    one = Loop.monomial(1.0, 0)
    gh = g * h
    wg = winding_number(g)
    # chain 1 -> gh -> g -> 1 with matching windows
    a_gh = _win_alpha(ctx, one, gh, n)
    # g(alpha_h) lives on the g -> gh line (the action is trivial in gauge)
    g_ah = _win_alpha(ctx, g, gh, n - wg)
    step1 = _win_compose(ctx, a_gh, _win_invert(ctx, g_ah))
    a_g = _win_alpha(ctx, one, g, n)
    loop = _win_compose(ctx, step1, _win_invert(ctx, a_g))
    return complex(loop.coeff)


def m_uni(g: Loop, h: Loop, n: int) -> complex:
    """Fredholm-determinant cocycle for index-zero loops on a window."""
    if winding_number(g) or winding_number(h):
        raise Uncertified("the determinant formula needs index-zero loops")
    ctx = WindowContext(n)
    one = Loop.monomial(1.0, 0)
    Dg = ctx.completed(ctx.toeplitz(g, one, n))
    Dh = ctx.completed(ctx.toeplitz(h, one, n))
    Dgh = ctx.completed(ctx.toeplitz(g * h, one, n))
    val = np.linalg.det(Dgh @ np.linalg.inv(Dh) @ np.linalg.inv(Dg))
    return complex(val)


# --------------------------------------------------------------------------
# Public cocycle / pairing / tame symbol
# --------------------------------------------------------------------------


def cres_cocycle(g: Loop, h: Loop, window_n: int = 64, certify: bool = True) -> complex:
    """Group 2-cochain of the restricted linear category on two loops."""
    if g.is_monomial and h.is_monomial:
        return _cres_monomial(g, h)
    val = _cres_window(g, h, window_n)
    if certify:
        val2 = _cres_window(g, h, window_n + 16)
        certify_stable(((), [val]), ((), [val2]))
    return val


def steinberg_pairing(u: Loop, v: Loop, window_n: int = 64, certify: bool = True) -> complex:
    """Antisymmetrised cocycle ratio c(u,v) / c(v,u)."""
    return cres_cocycle(u, v, window_n, certify) / cres_cocycle(v, u, window_n, certify)


def tame_symbol_formula(u: Loop, v: Loop, q_points: int = GRID) -> complex:
    """Contour-integral formula exp((1/2 pi i) int log(u) dv/v) v(1)^{-w(u)}."""
    t = np.linspace(0.0, 1.0, q_points + 1)
    z = np.exp(2j * np.pi * t)
    uv = np.array([u.at(zz) for zz in z])
    vv = np.array([v.at(zz) for zz in z])
    if np.min(np.abs(uv)) <= NONVANISH_TOL or np.min(np.abs(vv)) <= NONVANISH_TOL:
        raise Uncertified("loops must be nonvanishing")
    logu = np.empty(len(t), dtype=complex)
    logu[0] = np.log(uv[0])
    for i in range(1, len(t)):
        step = np.log(uv[i] / uv[i - 1])
        if abs(step.imag) > np.pi / 2:
            raise BranchJump("refine q_points")
        logu[i] = logu[i - 1] + step
    # v'(z) z'(t) / v(z)
    if v.is_monomial:
        dlogv = np.full(len(t), 2j * np.pi * v.n)
    else:
        dv = np.array(
            [sum(k * c * zz ** (k - 1) for k, c in v.coeffs) for zz in z]
        )
        dlogv = dv * (2j * np.pi * z) / vv
    integral = np.trapezoid(logu * dlogv, t)
    w_u = winding_number(u)
    return complex(np.exp(integral / (2j * np.pi)) * v.at(1.0) ** (-w_u))


@dataclass(frozen=True)
class TameSymbolResult:
    """Tame-symbol evaluation together with its numerical parameters."""

    value: complex
    q_points: int
    window_n: int | None = None


def tame_symbol(u: Loop, v: Loop, q_points: int = GRID) -> TameSymbolResult:
    """Tame-symbol integral packaged with the quadrature resolution."""
    return TameSymbolResult(tame_symbol_formula(u, v, q_points), q_points)


_CONVENTION = {}


def convention_exponent(window_n: int = 64) -> int:
    """The exponent s with steinberg_pairing = tame_symbol^s, fixed once."""
    if "s" not in _CONVENTION:
        probe_u, probe_v = Loop.monomial(1.0, 1), Loop.monomial(2.0, 0)
        pairing = steinberg_pairing(probe_u, probe_v, window_n)
        tame = tame_symbol_formula(probe_u, probe_v)
        if abs(pairing - tame) <= 1e-6 * abs(tame):
            _CONVENTION["s"] = 1
        elif abs(pairing - 1.0 / tame) <= 1e-6 * abs(tame):
            _CONVENTION["s"] = -1
        else:
            raise Unstable(f"convention probe failed: {pairing} vs {tame}")
    return _CONVENTION["s"]
