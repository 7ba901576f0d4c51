"""Exact elimination oracles for small formats (sympy), used to validate the
numeric detectors.

* (2;1,1): strong covectors on the line L xi = 0 are the roots of the binary
  quadratic det(A.xi) restricted to that line.
* (3;1,2): on the plane L xi = 0 the three 2x2 minors of A.xi are eliminated
  by pairwise resultants.
* emptiness of a strong or weak-(j) locus: reduced Groebner basis {1} on
  every affine chart xi_i = 1.
"""
from __future__ import annotations

import itertools

import numpy as np
import sympy as sp

from . import linalg
from .tensor import BoundaryTensor, flatten

PREC = 40


def _rat(c) -> sp.Rational:
    c = linalg.to_fraction(c)
    return sp.Rational(c.numerator, c.denominator)


def _symbolic_slice(A: BoundaryTensor, xi_exprs) -> np.ndarray:
    E = A.entries
    out = np.empty(A.dims[1:], dtype=object)
    for idx in itertools.product(*(range(d) for d in A.dims[1:])):
        out[idx] = sp.expand(sum(_rat(E[(i0,) + idx]) * xi_exprs[i0] for i0 in range(A.dims[0])))
    return out


def _minors(M: np.ndarray) -> list:
    rows, cols = M.shape
    return [sp.expand(M[a, c] * M[b, d] - M[a, d] * M[b, c])
            for a, b in itertools.combinations(range(rows), 2)
            for c, d in itertools.combinations(range(cols), 2)]


def _section_basis(A: BoundaryTensor, L) -> list[np.ndarray]:
    L = linalg.as_exact(np.atleast_2d(np.asarray(L, dtype=object)))
    basis = linalg.nullspace(L)
    if len(basis) + L.shape[0] != A.dims[0]:
        raise ValueError("section rows must be independent")
    return basis


def _point(basis, s) -> np.ndarray:
    xi = sum(complex(si) * linalg.to_complex(b.reshape(1, -1)).ravel() for si, b in zip(s, basis))
    return xi / xi[np.argmax(np.abs(xi))]


def _require(A: BoundaryTensor, k):
    if not A.exact:
        raise ValueError("oracles need rational entries")
    if tuple(A.format.k) != k:
        raise ValueError(f"oracle is for format {k}, got {A.format}")


def conic_section_points(A: BoundaryTensor, L) -> list[np.ndarray]:
    """(2;1,1): strong covectors xi with L xi = 0 (one row)."""
    _require(A, (2, 1, 1))
    basis = _section_basis(A, L)
    s, t = sp.symbols("s t")
    xi = [s * _rat(basis[0][i]) + t * _rat(basis[1][i]) for i in range(3)]
    S = _symbolic_slice(A, xi)
    q = sp.Poly(sp.expand(S[0, 0] * S[1, 1] - S[0, 1] * S[1, 0]), s, t)
    if q.is_zero:
        raise ValueError("the section line lies in the strong locus")
    pts = []
    # roots at t = 0 (the point s-axis) come from the vanishing leading coefficient in t
    qt = sp.Poly(q.as_expr().subs(s, 1), t)
    for r in sp.Poly(qt, t).nroots(n=PREC):
        pts.append(_point(basis, (1, r)))
    if qt.degree() < q.total_degree():
        pts.append(_point(basis, (0, 1)))
    return pts


def cubic_section_points(A: BoundaryTensor, L) -> list[np.ndarray]:
    """(3;1,2): strong covectors on the plane L xi = 0, by pairwise resultants."""
    _require(A, (3, 1, 2))
    basis = _section_basis(A, L)
    s1, s2 = sp.symbols("s1 s2")
    pts = []
    # chart s0 = 1
    xi = [_rat(basis[0][i]) + s1 * _rat(basis[1][i]) + s2 * _rat(basis[2][i]) for i in range(4)]
    m = _minors(_symbolic_slice(A, xi))
    R = [sp.Poly(sp.resultant(m[0], m[c], s2), s1) for c in (1, 2)]
    g = sp.gcd(R[0], R[1])
    for r1 in sp.Poly(g, s1).nroots(n=PREC):
        # common s2 of the minors at s1 = r1
        cands = sp.Poly(m[0].subs(s1, r1), s2).nroots(n=PREC) if sp.Poly(m[0].subs(s1, r1), s2).degree() > 0 else []
        best = min(cands, key=lambda r2: max(abs(sp.N(mi.subs({s1: r1, s2: r2}), PREC)) for mi in m), default=None)
        if best is not None and max(abs(sp.N(mi.subs({s1: r1, s2: best}), PREC)) for mi in m) < 1e-20:
            pts.append(_point(basis, (1, r1, best)))
    # line at infinity s0 = 0: chart s1 = 1, then the single point s1 = 0, s2 = 1
    xi = [_rat(basis[1][i]) + s2 * _rat(basis[2][i]) for i in range(4)]
    m = [sp.Poly(mi, s2) for mi in _minors(_symbolic_slice(A, xi))]
    g = m[0]
    for mi in m[1:]:
        g = sp.gcd(g, mi)
    if g.degree() > 0:
        pts += [_point(basis, (0, 1, r)) for r in g.nroots(n=PREC)]
    S = _symbolic_slice(A, [_rat(basis[2][i]) for i in range(4)])
    if all(mi == 0 for mi in _minors(S)) and any(v != 0 for v in S.flat):
        pts.append(_point(basis, (0, 0, 1)))
    return _dedupe(pts)


def _dedupe(pts, tol=1e-12):
    out = []
    for p in pts:
        if all(np.abs(p - q).max() > tol for q in out):
            out.append(p)
    return out


def locus_is_empty(A: BoundaryTensor, j: int | None = None) -> bool:
    """True when no covector has a decomposable (j None) or rank-one-in-slot-j slice.

    The zero slice is included in the variety, so a tensor with a nonzero
    kernel of xi -> A.xi is reported non-empty.
    """
    if not A.exact:
        raise ValueError("oracles need rational entries")
    d0 = A.dims[0]
    x = sp.symbols(f"x0:{d0}")
    S = _symbolic_slice(A, x)
    slots = range(1, A.format.p + 1) if j is None else [j]
    eqs = []
    for jj in slots:
        eqs += _minors(flatten(S, jj))
    eqs = [e for e in eqs if e != 0]
    if not eqs:
        return False
    for c in range(d0):
        sub = {x[i]: 0 for i in range(c)}
        sub[x[c]] = 1
        chart = [sp.expand(e.subs(sub)) for e in eqs]
        gens = [x[i] for i in range(c + 1, d0)]
        if any(e.is_number and e != 0 for e in chart):
            continue
        chart = [e for e in chart if e != 0]
        if not chart:
            return False
        if not gens:
            return False
        G = sp.groebner(chart, *gens, order="grevlex")
        if list(G.exprs) != [1]:
            return False
    return True
