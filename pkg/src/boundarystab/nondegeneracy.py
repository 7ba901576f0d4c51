"""Decide Det A != 0.

p = 2 and rational entries: the exact square matrix Phi_A below, whose
determinant vanishes exactly when Det A does.  Any p: a multi-start search
for unit vectors y_1..y_p with A(., y_1, ..., y_p) = 0, which is the same as a
point where some fiber map f_A^(j) drops rank.  Degeneracy witnesses are
re-checked exactly at a rationalized point; nondegeneracy is only "probable".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels, linalg
from .tensor import BoundaryTensor, FormatError, mode_product

NONDEGENERATE_EXACT = "NondegenerateExact"
DEGENERATE_EXACT = "DegenerateExact"
NONDEGENERATE_PROBABLE = "NondegenerateProbable"
DEGENERATE_WITNESS = "DegenerateWitness"
INCONCLUSIVE = "Inconclusive"

DEFAULT_RESTARTS = 64
TOL_ZERO = 1e-10
TOL_POS = 1e-6


@dataclass
class FiberPoint:
    """Point of the product of the projective spaces P(V_i), i not in {0, j}."""

    j: int
    x: dict[int, np.ndarray]

    def __post_init__(self):
        for i, v in self.x.items():
            v = np.asarray(v)
            if (all(c == 0 for c in v.flat) if v.dtype == object else not np.any(v)):
                raise ValueError(f"zero vector on slot {i}")

    def to_json(self) -> dict:
        from .tensor import format_scalar
        return {"j": self.j, "x": {str(i): [format_scalar(c) for c in v] for i, v in sorted(self.x.items())}}


@dataclass
class NondegeneracyVerdict:
    status: str
    witness: FiberPoint | None = None
    det_value: Fraction | None = None
    min_sigma: float | None = None
    method: str = ""
    details: dict = field(default_factory=dict)

    @property
    def nondegenerate(self) -> bool:
        return self.status in (NONDEGENERATE_EXACT, NONDEGENERATE_PROBABLE)

    @property
    def degenerate(self) -> bool:
        return self.status in (DEGENERATE_EXACT, DEGENERATE_WITNESS)

    def to_json(self) -> dict:
        out = {"status": self.status, "method": self.method}
        if self.det_value is not None:
            f = Fraction(self.det_value)
            out["det"] = f"{f.numerator}/{f.denominator}"
        if self.min_sigma is not None:
            out["min_sigma"] = self.min_sigma
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out.update(self.details)
        return out


def fiber_map(A: BoundaryTensor, point: FiberPoint) -> np.ndarray:
    """Matrix of shape d_j x d0 with entry (i_j, i0) = sum a_{i0..ip} prod x_i[i_i]."""
    p = A.format.p
    j = point.j
    if not 1 <= j <= p:
        raise ValueError(f"slot {j} out of range")
    missing = set(range(1, p + 1)) - {j} - set(point.x)
    if missing:
        raise ValueError(f"fiber point lacks slots {sorted(missing)}")
    E = A.entries
    # contract from the last slot down so axis numbers stay valid
    for i in sorted(point.x, reverse=True):
        v = np.asarray(point.x[i])
        if v.shape != (A.dims[i],):
            raise FormatError(f"vector for slot {i} has size {v.shape}")
        E = mode_product(E, v.reshape(1, -1), i)
        E = E.reshape(E.shape[:i] + E.shape[i + 1:])
    return np.asarray(E).T


# ---------------------------------------------------------------------------
# exact p = 2


def _monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``degree``, in a fixed order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


def sylvester_matrix_p2(A: BoundaryTensor) -> np.ndarray:
    """Phi_A: V0^* (x) S^k1 -> V1 (x) S^(k1+1), polynomials in d2 variables.

    Phi[(i1, m'), (i0, m)] = sum_i2 a_{i0 i1 i2} [m' = m * x_i2]; square of
    size (k0 + 1) * C(k1 + k2, k2).
    """
    if A.format.p != 2:
        raise FormatError("the exact determinant route needs p = 2")
    if not A.exact:
        raise ValueError("the exact determinant route needs rational entries")
    k0, k1, k2 = A.format.k
    d0, d1, d2 = A.dims
    src = _monomials(d2, k1)
    dst = _monomials(d2, k1 + 1)
    dst_index = {m: i for i, m in enumerate(dst)}
    Phi = linalg.zeros((d1 * len(dst), d0 * len(src)))
    E = A.entries
    for i0 in range(d0):
        for mi, m in enumerate(src):
            col = i0 * len(src) + mi
            for i2 in range(d2):
                shifted = list(m)
                shifted[i2] += 1
                row_m = dst_index[tuple(shifted)]
                for i1 in range(d1):
                    a = E[i0, i1, i2]
                    if a != 0:
                        Phi[i1 * len(dst) + row_m, col] += a
    assert Phi.shape[0] == Phi.shape[1] == d0 * math.comb(k1 + k2, k2)
    return Phi


def hyperdet_p2(A: BoundaryTensor) -> Fraction:
    """det Phi_A, exact; nonzero iff Det A != 0 (normalization constant not fixed)."""
    return linalg.det(sylvester_matrix_p2(A))


# ---------------------------------------------------------------------------
# numeric search


@dataclass
class SearchResult:
    residual: float
    y: list[np.ndarray]
    sigma: float


def degeneracy_search(A: BoundaryTensor, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                      maxiter: int = 200, backend: str | None = None) -> list[SearchResult]:
    """One local descent per restart, results in restart order."""
    be = kernels.get_backend(backend)
    T = A.to_complex()
    scale = np.abs(T).max()
    if scale == 0:
        raise ValueError("zero tensor")
    T = T / scale
    dims = np.array(A.dims[1:], dtype=np.int64)
    M = T.reshape(A.dims[0], -1)
    idx = kernels.index_table(dims)
    offs = kernels.offsets(0, dims)
    results = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        parts = []
        for d in dims:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            parts.append(v / np.linalg.norm(v))
        y0 = np.concatenate(parts)
        y, f, _ = be.degen_solve(M, idx, dims, offs, y0, maxiter, 1e-15)
        ys = [y[offs[g]: offs[g] + dims[g]] for g in range(len(dims))]
        sigma = min(_fiber_sigma(T, ys, j) for j in range(1, len(dims) + 1))
        results.append(SearchResult(float(f), ys, sigma))
    return results


def _fiber_sigma(T: np.ndarray, ys, j: int) -> float:
    E = T
    for i in range(len(ys), 0, -1):
        if i == j:
            continue
        E = np.tensordot(E, ys[i - 1], axes=([i], [0]))
    s = np.linalg.svd(E.T, compute_uv=False)
    return float(s[-1])


def rationalize_vector(v: np.ndarray, max_den: int = 10 ** 6, tol: float = 1e-8):
    """Exact representative of the projective point of ``v``.

    Divides by the largest coordinate, then approximates each coordinate with
    bounded denominators.  Returns an object array of Fractions, or a pair of
    arrays (real, imaginary) for a non-real point, or None when the
    approximation is not within ``tol``.
    """
    v = np.asarray(v, dtype=np.complex128)
    w = v / v[np.argmax(np.abs(v))]
    re = [Fraction(float(c.real)).limit_denominator(max_den) for c in w]
    im = [Fraction(float(c.imag)).limit_denominator(max_den) for c in w]
    approx = np.array([complex(float(a), float(b)) for a, b in zip(re, im)])
    if np.abs(approx - w).max() > tol:
        return None
    if all(b == 0 for b in im):
        return np.array(re, dtype=object)
    return np.array(re, dtype=object), np.array(im, dtype=object)


def _gaussian_rank(re: np.ndarray, im: np.ndarray) -> int:
    from sympy import I, Matrix, Rational
    from sympy.polys.domains import QQ_I
    from sympy.polys.matrices import DomainMatrix

    rows, cols = re.shape
    M = Matrix(rows, cols, lambda i, j: Rational(re[i, j].numerator, re[i, j].denominator)
               + I * Rational(im[i, j].numerator, im[i, j].denominator))
    return DomainMatrix.from_Matrix(M).convert_to(QQ_I).rank()


def certify_witness(A: BoundaryTensor, ys) -> FiberPoint | None:
    """Exact rank drop of some fiber map at the rationalized point ``ys``."""
    approx = [rationalize_vector(y) for y in ys]
    if any(a is None for a in approx):
        return None
    p = A.format.p
    real = all(not isinstance(a, tuple) for a in approx)
    for j in range(1, p + 1):
        if real:
            point = FiberPoint(j, {i: approx[i - 1] for i in range(1, p + 1) if i != j})
            if linalg.rank(fiber_map(A, point)) <= A.format.k[j]:
                return point
        else:
            # split into real and imaginary parts via complex multilinearity
            pts = {i: approx[i - 1] if isinstance(approx[i - 1], tuple)
                   else (approx[i - 1], np.array([Fraction(0)] * A.dims[i], dtype=object))
                   for i in range(1, p + 1) if i != j}
            re, im = _complex_fiber(A, j, pts)
            if _gaussian_rank(re, im) <= A.format.k[j]:
                x = {i: np.array([complex(float(a), float(b)) for a, b in zip(*pts[i])]) for i in pts}
                return FiberPoint(j, x)
    return None


def _complex_fiber(A, j, pts):
    """Real and imaginary parts of the exact fiber map at a Gaussian-rational point."""
    E_re, E_im = A.entries, linalg.zeros(A.dims)
    for i in sorted(pts, reverse=True):
        vr, vi = pts[i]
        a = mode_product(E_re, vr.reshape(1, -1), i) - mode_product(E_im, vi.reshape(1, -1), i)
        b = mode_product(E_re, vi.reshape(1, -1), i) + mode_product(E_im, vr.reshape(1, -1), i)
        E_re = a.reshape(a.shape[:i] + a.shape[i + 1:])
        E_im = b.reshape(b.shape[:i] + b.shape[i + 1:])
    return np.asarray(E_re).T, np.asarray(E_im).T


def nondegenerate(A: BoundaryTensor, method: str = "auto", restarts: int = DEFAULT_RESTARTS,
                  tol_zero: float = TOL_ZERO, tol_pos: float = TOL_POS, seed: int = 0,
                  backend: str | None = None) -> NondegeneracyVerdict:
    """Verdict on Det A != 0; see the module docstring for the two routes."""
    if method not in ("auto", "exact", "numeric"):
        raise ValueError(f"unknown method {method!r}")
    if A.is_zero():
        raise ValueError("zero tensor")
    if method == "auto":
        method = "exact" if (A.format.p == 2 and A.exact) else "numeric"
    if method == "exact":
        d = hyperdet_p2(A)
        status = NONDEGENERATE_EXACT if d != 0 else DEGENERATE_EXACT
        return NondegeneracyVerdict(status, det_value=d, method="exact")

    results = degeneracy_search(A, restarts=restarts, seed=seed, backend=backend)
    best = min(results, key=lambda r: r.sigma)
    min_sigma = best.sigma
    details = {"restarts": restarts, "seed": seed, "tol_zero": tol_zero, "tol_pos": tol_pos}
    if min_sigma < tol_zero:
        near = sorted((r for r in results if r.sigma < tol_zero), key=lambda r: r.sigma)
        for res in near:
            if A.exact:
                point = certify_witness(A, res.y)
                if point is not None:
                    details["certified"] = "exact"
                    return NondegeneracyVerdict(DEGENERATE_WITNESS, witness=point, min_sigma=min_sigma,
                                                method="numeric", details=details)
            else:
                point = _numeric_witness(A, res.y)
                if point is not None:
                    details["certified"] = "numeric"
                    return NondegeneracyVerdict(DEGENERATE_WITNESS, witness=point, min_sigma=min_sigma,
                                                method="numeric", details=details)
        if A.exact:
            # irrational witnesses: prove the rank-drop locus meets the witness chart
            for res in near[:3]:
                point = _numeric_witness(A, res.y)
                if point is not None and groebner_certificate(A, point):
                    details["certified"] = "groebner"
                    return NondegeneracyVerdict(DEGENERATE_WITNESS, witness=point, min_sigma=min_sigma,
                                                method="numeric", details=details)
        details["note"] = "near-zero minimum without an exact certificate"
        return NondegeneracyVerdict(INCONCLUSIVE, min_sigma=min_sigma, method="numeric", details=details)
    if min_sigma > tol_pos:
        return NondegeneracyVerdict(NONDEGENERATE_PROBABLE, min_sigma=min_sigma, method="numeric",
                                    details=details)
    return NondegeneracyVerdict(INCONCLUSIVE, min_sigma=min_sigma, method="numeric", details=details)


def _numeric_witness(A: BoundaryTensor, ys) -> FiberPoint | None:
    for j in range(1, A.format.p + 1):
        point = FiberPoint(j, {i: ys[i - 1] for i in range(1, A.format.p + 1) if i != j})
        M = fiber_map(A, point)
        if linalg.numerical_rank(M, 1e-8) <= A.format.k[j]:
            return point
    return None


def groebner_certificate(A: BoundaryTensor, point: FiberPoint) -> bool:
    """Exact proof that f_A^(j) drops rank somewhere on the chart of ``point``.

    Each x_i is put in the affine chart of its largest coordinate; the maximal
    minors of the symbolic fiber map then generate a proper ideal (reduced
    Groebner basis != {1}) exactly when a rank-drop point exists there.
    """
    import sympy as sp

    j = point.j
    fmt = A.format
    xs, charts = {}, {}
    for i in sorted(point.x):
        v = np.asarray(point.x[i], dtype=np.complex128)
        c = int(np.argmax(np.abs(v)))
        syms = sp.symbols(f"x{i}_0:{fmt.dims[i]}")
        xs[i] = [sp.Integer(1) if a == c else syms[a] for a in range(fmt.dims[i])]
        charts[i] = c
    E = A.entries
    M = sp.zeros(fmt.dims[j], fmt.dims[0])
    others = sorted(point.x)
    for idx in itertools.product(*(range(d) for d in fmt.dims)):
        a = E[idx]
        if a == 0:
            continue
        term = sp.Rational(a.numerator, a.denominator)
        for i in others:
            term *= xs[i][idx[i]]
        M[idx[j], idx[0]] += term
    minors = []
    for cols in itertools.combinations(range(fmt.dims[0]), fmt.dims[j]):
        m = sp.expand(M[:, list(cols)].det())
        if m != 0:
            minors.append(m)
    if not minors:
        return True
    gens = sorted({g for m in minors for g in m.free_symbols}, key=str)
    if not gens:
        return False
    return list(sp.groebner(minors, *gens, order="grevlex").exprs) != [1]
