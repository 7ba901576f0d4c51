"""SL(2) symmetric powers, the identity tensor and its orbit.

Basis convention on S^k U: e_m = u0^(k-m) u1^m, m = 0..k.  Slot 0 carries the
plain representation rho_k0, slots >= 1 carry the inverse transpose, so the
identity tensor (the multiplication map) is fixed by every sigma(g).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .tensor import (BoundaryTensor, Format, FormatError, GroupElement, act,
                     contract0, flatten, random_unimodular)


class CanonicalizationError(RuntimeError):
    """Raised when a proposed normalizing element fails verification."""


def _is_exact_matrix(g) -> bool:
    return np.asarray(g).dtype == object


def _binomial_expand(x, y, r: int) -> list:
    """Coefficients of (x u0 + y u1)^r indexed by the power of u1."""
    return [math.comb(r, s) * x ** (r - s) * y ** s for s in range(r + 1)]


def sym_power_rep(g, k: int) -> np.ndarray:
    """rho_k(g) on S^k U; column m holds (g u0)^(k-m) (g u1)^m in the e basis."""
    g = np.asarray(g)
    exact = g.dtype == object
    if exact:
        g = linalg.as_exact(g)
    else:
        g = g.astype(np.complex128)
    a, b = g[0, 0], g[0, 1]
    c, d = g[1, 0], g[1, 1]
    zero = Fraction(0) if exact else 0j
    out = np.empty((k + 1, k + 1), dtype=object if exact else np.complex128)
    for m in range(k + 1):
        p1 = _binomial_expand(a, c, k - m)
        p2 = _binomial_expand(b, d, m)
        col = [zero] * (k + 1)
        for i, x in enumerate(p1):
            for j, y in enumerate(p2):
                col[i + j] = col[i + j] + x * y
        out[:, m] = col
    return out


def sym_power_lie(x, k: int) -> np.ndarray:
    """Derivative d rho_k at the identity, for x in sl(2) (any 2x2 matrix)."""
    x = np.asarray(x)
    exact = x.dtype == object
    if exact:
        x = linalg.as_exact(x)
    alpha, beta = x[0, 0], x[0, 1]
    gamma, delta = x[1, 0], x[1, 1]
    out = linalg.zeros((k + 1, k + 1)) if exact else np.zeros((k + 1, k + 1), np.complex128)
    for m in range(k + 1):
        out[m, m] = (k - m) * alpha + m * delta
        if m + 1 <= k:
            out[m + 1, m] = (k - m) * gamma
        if m >= 1:
            out[m - 1, m] = m * beta
    return out


def build_identity(fmt: Format) -> BoundaryTensor:
    """Ones exactly where i0 = i1 + ... + ip."""
    if not isinstance(fmt, Format):
        fmt = Format(tuple(fmt))
    arr = linalg.zeros(fmt.dims)
    for idx in itertools.product(*(range(d) for d in fmt.dims[1:])):
        arr[(sum(idx),) + idx] = Fraction(1)
    return BoundaryTensor(fmt, arr)


def _inv2(g):
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    det = a * d - b * c
    out = np.empty((2, 2), dtype=g.dtype)
    out[0, 0], out[0, 1], out[1, 0], out[1, 1] = d / det, -b / det, -c / det, a / det
    return out


def embed(g, fmt: Format) -> GroupElement:
    """sigma(g) = (rho_k0(g), rho_k1(g)^-T, ..., rho_kp(g)^-T) for det g = 1."""
    g = np.asarray(g)
    exact = g.dtype == object
    if exact:
        g = linalg.as_exact(g)
        if linalg.det(g) != 1:
            raise ValueError("embed requires det g = 1")
    else:
        g = g.astype(np.complex128)
        if abs(np.linalg.det(g) - 1) > 1e-12:
            raise ValueError("embed requires det g = 1")
    ginv = _inv2(g)
    mats = [sym_power_rep(g, fmt.k[0])]
    mats += [sym_power_rep(ginv, k).T for k in fmt.k[1:]]
    return GroupElement(tuple(mats), special=True)


def embed_lie(x, fmt: Format) -> tuple[np.ndarray, ...]:
    """Infinitesimal sigma: (d rho_k0(x), -d rho_k1(x)^T, ...)."""
    mats = [sym_power_lie(x, fmt.k[0])]
    mats += [-sym_power_lie(x, k).T for k in fmt.k[1:]]
    return tuple(mats)


def random_sl2(rng: np.random.Generator, n_shears: int = 4) -> np.ndarray:
    """Exact 2x2 matrix of determinant 1 from elementary shears."""
    return random_unimodular(rng, 2, n_shears=n_shears)


def moment_vector(t, k: int) -> list:
    return [t ** i for i in range(k + 1)]


def vandermonde_slot0(fmt: Format, nodes: Sequence) -> np.ndarray:
    """W with W[s, i] = t_s^i; make_vandermonde(F, t) = (W, 1, ..., 1) . I."""
    k0 = fmt.k[0]
    exact = all(isinstance(t, (int, Fraction, np.integer)) for t in nodes)
    rows = [moment_vector(linalg.to_fraction(t) if exact else complex(t), k0) for t in nodes]
    return np.array(rows, dtype=object if exact else np.complex128)


def _check_nodes(fmt: Format, nodes: Sequence):
    if len(nodes) != fmt.k[0] + 1:
        raise ValueError(f"need {fmt.k[0] + 1} nodes, got {len(nodes)}")
    for a, b in itertools.combinations(nodes, 2):
        if a == b:
            raise ValueError(f"repeated node {a}")


def make_vandermonde(fmt: Format, nodes: Sequence) -> BoundaryTensor:
    """sum_s e_s (x) (sum_i t_s^i e_i) (x) ... (x) (sum_i t_s^i e_i)."""
    _check_nodes(fmt, nodes)
    exact = all(isinstance(t, (int, Fraction, np.integer)) for t in nodes)
    ts = [linalg.to_fraction(t) if exact else complex(t) for t in nodes]
    arr = linalg.zeros(fmt.dims) if exact else np.zeros(fmt.dims, np.complex128)
    for s, t in enumerate(ts):
        slice_ = np.array(moment_vector(t, fmt.k[1]), dtype=arr.dtype)
        for k in fmt.k[2:]:
            slice_ = np.multiply.outer(slice_, np.array(moment_vector(t, k), dtype=arr.dtype))
        arr[s] = slice_
    return BoundaryTensor(fmt, arr)


# ---------------------------------------------------------------------------
# canonicalization of identity-orbit tensors


@dataclass
class Canonicalization:
    g: GroupElement
    route: str
    exact: bool


def canonicalize_identity(A: BoundaryTensor, generators=None, covectors=None,
                          rtol: float = 1e-8) -> Canonicalization:
    """Find g with act(g, A) = build_identity(format), verified before returning.

    Route one rebuilds an sl(2)-triple inside the stabilizer algebra and reads
    off weight bases; route two rebuilds the Vandermonde presentation from
    k0 + 1 strong jumping covectors.  Raises CanonicalizationError when neither
    route produces a verified element.
    """
    if A.format.has_trivial_factor:
        raise FormatError("canonicalization needs k_i >= 1 for all factors")
    target = build_identity(A.format)
    problems = []
    if A.exact:
        try:
            g, exact = _triple_route(A, generators)
            if _verify(g, A, target, rtol):
                return Canonicalization(g, "sl2-triple", exact)
            problems.append("sl2-triple: verification failed")
        except (CanonicalizationError, ArithmeticError, ValueError) as exc:
            problems.append(f"sl2-triple: {exc}")
    else:
        problems.append("sl2-triple: needs rational entries")
    try:
        g, exact = _vandermonde_route(A, covectors)
        if _verify(g, A, target, rtol):
            return Canonicalization(g, "vandermonde", exact)
        problems.append("vandermonde: verification failed")
    except (CanonicalizationError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        problems.append(f"vandermonde: {exc}")
    raise CanonicalizationError("canonicalization unverified; " + "; ".join(problems))


def _verify(g: GroupElement, A: BoundaryTensor, target: BoundaryTensor, rtol: float) -> bool:
    B = act(g, A)
    if B.exact:
        return B.equals(target)
    return B.allclose(target, rtol)


def _bracket(X, Y):
    return tuple(_mm(x, y) - _mm(y, x) for x, y in zip(X, Y))


def _mm(a, b):
    if a.dtype == object and b.dtype == object:
        return linalg.matmul(a, b)
    return linalg.to_complex(a) @ linalg.to_complex(b)


def _vec(X):
    return np.concatenate([np.asarray(x).ravel() for x in X])


def _combine(coeffs, basis):
    out = None
    for c, X in zip(coeffs, basis):
        term = tuple(c * x for x in X)
        out = term if out is None else tuple(a + b for a, b in zip(out, term))
    return out


def _solve(columns, rhs, exact):
    M = np.array(columns, dtype=object if exact else np.complex128).T
    b = np.asarray(rhs, dtype=object if exact else np.complex128)
    if exact:
        x = linalg.solve(M, b)
        if x is None:
            raise CanonicalizationError("sl2 relation system inconsistent")
        return list(x)
    x, *_ = np.linalg.lstsq(M, b, rcond=None)
    if np.linalg.norm(M @ x - b) > 1e-8 * max(np.linalg.norm(b), 1.0):
        raise CanonicalizationError("sl2 relation system inconsistent")
    return list(x)


def _diagonalize_form(G):
    """Exact congruence diagonalization: T^T G T = diag(a); returns (T, a).

    Returns an isotropic column directly (as ``(v, None)``) if one shows up
    on the diagonal during elimination.
    """
    n = G.shape[0]
    G = linalg.as_exact(G)
    T = linalg.eye(n)
    for i in range(n):
        if G[i, i] == 0:
            return T[:, i], None
        for j in range(i + 1, n):
            c = G[i, j] / G[i, i]
            # column op j -= c * i on T, congruence on G
            T[:, j] = T[:, j] - c * T[:, i]
            G[:, j] = G[:, j] - c * G[:, i]
            G[j, :] = G[j, :] - c * G[i, :]
    return T, [G[i, i] for i in range(n)]


def _rational_isotropic(G):
    """Nonzero rational c with c^T G c = 0 for a 3x3 rational form, or None."""
    T, diag = _diagonalize_form(G)
    if diag is None:
        return T
    L = 1
    for a in diag:
        L = L * a.denominator // math.gcd(L, a.denominator)
    ints = [int(a * L) for a in diag]
    from sympy import symbols
    from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic
    x, y, z = symbols("x y z", integer=True)
    sol = diop_ternary_quadratic(ints[0] * x ** 2 + ints[1] * y ** 2 + ints[2] * z ** 2)
    if sol is None or sol[0] is None:
        return None
    w = np.array([Fraction(int(s)) for s in sol], dtype=object)
    if all(v == 0 for v in w):
        return None
    return linalg.matmul(T, w)


def _complex_isotropic(G):
    G = linalg.to_complex(G)
    w, V = np.linalg.eigh((G + G.T).real / 2) if np.allclose(G.imag, 0) else (None, None)
    if w is None:
        raise CanonicalizationError("complex trace form")
    # w0 y0^2 + w1 y1^2 = 0 with y = (sqrt(-w1), sqrt(w0), 0)
    y = np.array([np.sqrt(complex(-w[1])), np.sqrt(complex(w[0])), 0.0])
    return V.astype(np.complex128) @ y


def _highest_weight_basis(E, H, F, k, exact):
    """Basis b_0..b_k with E b_m = m b_(m-1), H b_m = (k-2m) b_m, F b_m = (k-m) b_(m+1)."""
    if exact:
        ker = linalg.nullspace(E)
        if len(ker) != 1:
            raise CanonicalizationError("factor representation is not irreducible")
        b = [ker[0]]
        for m in range(k):
            b.append(linalg.matmul(F, b[-1]) / (k - m))
        return np.array(b, dtype=object).T
    ker = linalg.nullspace_float(E, 1e-7)
    if ker.shape[1] != 1:
        raise CanonicalizationError("factor representation is not irreducible")
    b = [ker[:, 0]]
    for m in range(k):
        b.append(F @ b[-1] / (k - m))
    return np.array(b).T


def _triple_route(A: BoundaryTensor, generators=None):
    from .stabilizer import stab_algebra

    gens = generators if generators is not None else stab_algebra(A)
    basis = [tuple(g.X) if hasattr(g, "X") else tuple(g) for g in gens]
    if len(basis) != 3:
        raise CanonicalizationError(f"stabilizer dimension {len(basis)} != 3")
    G = linalg.zeros((3, 3))
    for a in range(3):
        for b in range(3):
            G[a, b] = sum(linalg.matmul(basis[a][0], basis[b][0])[i, i] for i in range(A.dims[0]))
    c = _rational_isotropic(G)
    exact = c is not None
    if not exact:
        c = _complex_isotropic(G)
        basis = [tuple(linalg.to_complex(x) for x in X) for X in basis]
    E = _combine(c, basis)
    cols = [_vec(_bracket(X, E)) for X in basis]
    h = _solve(cols, _vec(tuple(2 * e for e in E)), exact)
    H = _combine(h, basis)
    cols = [np.concatenate([_vec(_bracket(H, X)) + 2 * _vec(X), _vec(_bracket(E, X))]) for X in basis]
    zero = _vec(H) * 0
    f = _solve(cols, np.concatenate([zero, _vec(H)]), exact)
    F = _combine(f, basis)
    mats = []
    for slot, k in enumerate(A.format.k):
        if slot == 0:
            B = _highest_weight_basis(E[0], H[0], F[0], k, exact)
            mats.append(linalg.inverse(B) if exact else np.linalg.inv(B))
        else:
            B = _highest_weight_basis(-E[slot].T, -H[slot].T, -F[slot].T, k, exact)
            mats.append(B.T)
    g = GroupElement(tuple(mats))
    B = act(g, A)
    scale = B.entries[(0,) * len(A.dims)]
    if scale == 0:
        raise CanonicalizationError("normalized tensor vanishes at the origin cell")
    mats[0] = mats[0] / scale
    return GroupElement(tuple(mats)), exact


def _vandermonde_route(A: BoundaryTensor, covectors=None):
    fmt = A.format
    line_slots = [j for j in range(1, fmt.p + 1) if fmt.k[j] == 1]
    if not line_slots:
        raise CanonicalizationError("vandermonde route needs a factor with k_j = 1")
    jstar = line_slots[0]
    if covectors is None:
        from .jumping import detect_strong

        report = detect_strong(A, restarts=4 * (fmt.k0 + 3))
        covectors = [it.xi for it in report.items]
    exact = A.exact and all(np.asarray(x).dtype == object for x in covectors)
    covectors = [np.asarray(x) if exact else linalg.to_complex(x) for x in covectors]
    n = fmt.k0 + 1
    # pick k0+1 covectors forming a basis of V0^*
    chosen, Xi = _independent_subset(covectors, n, exact)
    if len(chosen) < n:
        raise CanonicalizationError(f"only {len(chosen)} independent strong covectors")
    slices = [contract0(A if exact else BoundaryTensor(fmt, A.to_complex()), x) for x in chosen]
    factors = [[_slot_factor(S, j, exact) for j in range(1, fmt.p + 1)] for S in slices]
    # Moebius shear so every point of the k=1 factor is finite
    for lam in range(0, n + 2):
        heads = [v[jstar - 1][0] + lam * v[jstar - 1][1] for v in factors]
        if all((h != 0) if exact else abs(h) > 1e-9 for h in heads):
            break
    else:
        raise CanonicalizationError("no finite chart for the line factor")
    shear = np.array([[1, lam], [0, 1]], dtype=object if exact else np.complex128)
    if exact:
        shear = linalg.as_exact(shear)
    ts = []
    for v in factors:
        w = _mm(shear, np.asarray(v[jstar - 1]).reshape(2, 1)).ravel()
        ts.append(w[1] / w[0])
    mats = [None] * (fmt.p + 1)
    for j in range(1, fmt.p + 1):
        mats[j] = shear if j == jstar else _moment_transform(
            [v[j - 1] for v in factors], ts, fmt.k[j], exact)
    A1 = act(GroupElement(tuple([linalg.eye(n) if exact else np.eye(n, dtype=np.complex128)] + mats[1:])),
             A if exact else BoundaryTensor(fmt, A.to_complex()))
    mus = [contract0(A1, x)[(0,) * fmt.p] for x in chosen]
    if any((m == 0) if exact else abs(m) < 1e-12 for m in mus):
        raise CanonicalizationError("vanishing slice normalization")
    W = np.array([moment_vector(t, fmt.k0) for t in ts], dtype=object if exact else np.complex128)
    if exact:
        g0 = linalg.matmul(linalg.inverse(W), linalg.matmul(
            np.diag(np.array([1 / m for m in mus], dtype=object)), Xi))
    else:
        g0 = np.linalg.inv(W) @ np.diag(1 / np.array(mus)) @ Xi
    mats[0] = g0
    return GroupElement(tuple(mats)), exact


def _independent_subset(vectors, n, exact):
    chosen = []
    for v in vectors:
        trial = chosen + [v]
        M = np.array(trial, dtype=object if exact else np.complex128)
        r = linalg.rank(M) if exact else linalg.numerical_rank(M, 1e-6)
        if r == len(trial):
            chosen = trial
        if len(chosen) == n:
            break
    return chosen, np.array(chosen, dtype=object if exact else np.complex128)


def _slot_factor(S, j, exact):
    F = flatten(S, j)
    if exact:
        for col in F.T:
            if any(v != 0 for v in col):
                return np.array(col, dtype=object)
        raise CanonicalizationError("zero slice")
    u, s, _ = np.linalg.svd(F)
    if s.size > 1 and s[1] > 1e-7 * s[0]:
        raise CanonicalizationError("slice is not rank one")
    return u[:, 0]


def _moment_transform(vs, ts, k, exact):
    """P with P v_s proportional to (1, t_s, ..., t_s^k) for every s."""
    d = k + 1
    n = len(vs)
    nunk = d * d + n
    rows = []
    for s, (v, t) in enumerate(zip(vs, ts)):
        nu = moment_vector(t, k)
        for r in range(d):
            row = [0] * nunk
            for c in range(d):
                row[r * d + c] = v[c]
            row[d * d + s] = -nu[r]
            rows.append(row)
    M = np.array(rows, dtype=object if exact else np.complex128)
    if exact:
        M = linalg.as_exact(M)
        ker = linalg.nullspace(M)
        if len(ker) != 1:
            raise CanonicalizationError(f"moment-curve fit has {len(ker)}-dim solution space")
        sol = ker[0]
    else:
        ker = linalg.nullspace_float(M, 1e-8)
        if ker.shape[1] != 1:
            raise CanonicalizationError(f"moment-curve fit has {ker.shape[1]}-dim solution space")
        sol = ker[:, 0]
    return np.array(sol[: d * d], dtype=M.dtype).reshape(d, d)
