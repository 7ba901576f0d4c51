"""Lie algebra of Stab(A) in sl(V0) + ... + sl(Vp) and the classification of Stab(A)^0."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .tensor import BoundaryTensor, FormatError, GroupElement, act, mode_product

TRIVIAL, ADDITIVE, TORUS, SL2 = "Trivial", "Additive", "Torus", "SL2"


class ClassificationError(RuntimeError):
    """The kernel dimension or Jordan type falls outside the possible cases."""


class PreconditionError(ValueError):
    """Input violates a documented precondition (degenerate, reduced format, ...)."""


@dataclass(frozen=True, eq=False)
class StabGenerator:
    X: tuple[np.ndarray, ...]

    def apply(self, A: BoundaryTensor) -> np.ndarray:
        """sum_i X_i acting on slot i of A."""
        return infinitesimal_action(self.X, A.entries)

    def annihilates(self, A: BoundaryTensor) -> bool:
        return all(v == 0 for v in self.apply(A).flat)


@dataclass
class StabilizerReport:
    dim: int
    cls: str
    generators: list[StabGenerator]
    weights: dict | None = None
    certificates: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "class": self.cls,
            "generators": [[[[_fmt(v) for v in row] for row in m] for m in g.X] for g in self.generators],
            "weights": self.weights,
            "certificates": self.certificates,
            "warnings": self.warnings,
        }


def _fmt(v):
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def infinitesimal_action(X, entries: np.ndarray) -> np.ndarray:
    out = None
    for axis, x in enumerate(X):
        term = mode_product(entries, x, axis)
        out = term if out is None else out + term
    return out


def _sl_basis(d: int):
    """Traceless basis: E_ab (a != b), then E_aa - E_(d-1)(d-1)."""
    for a in range(d):
        for b in range(d):
            if a != b:
                yield ((a, b, 1),)
    for a in range(d - 1):
        yield ((a, a, 1), (d - 1, d - 1, -1))


def linearized_action_matrix(A: BoundaryTensor):
    """Matrix of (X_0..X_p) -> sum_i X_i o_i A on the traceless basis, and the basis labels."""
    if not A.exact:
        raise PreconditionError("the stabilizer algebra is computed over Q; rational entries required")
    E = A.integer_scaled().entries
    dims = A.dims
    cols, labels = [], []
    for slot, d in enumerate(dims):
        for elem in _sl_basis(d):
            out = linalg.zeros(dims)
            for a, b, v in elem:
                dst = [slice(None)] * len(dims)
                src = [slice(None)] * len(dims)
                dst[slot], src[slot] = a, b
                out[tuple(dst)] = out[tuple(dst)] + v * E[tuple(src)]
            cols.append(out.ravel())
            labels.append((slot, elem))
    return np.array(cols, dtype=object).T, labels


def _vector_to_generator(v, labels, dims) -> StabGenerator:
    mats = [linalg.zeros((d, d)) for d in dims]
    for coeff, (slot, elem) in zip(v, labels):
        if coeff == 0:
            continue
        for a, b, s in elem:
            mats[slot][a, b] += s * coeff
    return StabGenerator(tuple(mats))


def stab_algebra(A: BoundaryTensor) -> list[StabGenerator]:
    """Exact basis of the kernel of the linearized slot-wise action."""
    if A.is_zero():
        raise PreconditionError("zero tensor")
    M, labels = linearized_action_matrix(A)
    ker = linalg.nullspace(M)
    return [_vector_to_generator(v, labels, A.dims) for v in ker]


# ---------------------------------------------------------------------------
# certificates


def _bracket(X, Y):
    return tuple(linalg.matmul(x, y) - linalg.matmul(y, x) for x, y in zip(X, Y))


def _flat(X):
    return np.concatenate([x.ravel() for x in X])


def structure_constants(gens: list[StabGenerator]):
    """c[a][b] = coordinates of [X_a, X_b] in the basis, or None if not closed."""
    basis = np.array([_flat(g.X) for g in gens], dtype=object).T
    n = len(gens)
    c = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            x = linalg.solve(basis, _flat(_bracket(gens[a].X, gens[b].X)))
            if x is None:
                return None
            c[a][b] = list(x)
    return c


def killing_form(c) -> np.ndarray:
    n = len(c)
    K = linalg.zeros((n, n))
    ad = []
    for a in range(n):
        M = linalg.zeros((n, n))
        for b in range(n):
            for e in range(n):
                M[e, b] = c[a][b][e]
        ad.append(M)
    for a in range(n):
        for b in range(n):
            P = linalg.matmul(ad[a], ad[b])
            K[a, b] = sum(P[i, i] for i in range(n))
    return K


def sl2_certificate(gens: list[StabGenerator]) -> dict:
    """Closure, perfectness and nondegenerate Killing form: a 3-dim simple algebra."""
    c = structure_constants(gens)
    if c is None:
        return {"bracket_closed": False, "perfect": False, "killing_nondegenerate": False}
    brackets = np.array([c[a][b] for a in range(3) for b in range(3)], dtype=object)
    perfect = linalg.rank(brackets) == 3
    K = killing_form(c)
    return {"bracket_closed": True, "perfect": perfect, "killing_nondegenerate": linalg.det(K) != 0}


def progression(k: int) -> list[int]:
    return list(range(-k, k + 1, 2))


def _target_charpoly(k: int, c2: Fraction) -> list[Fraction]:
    poly = [Fraction(1)]
    for m in progression(k):
        if m > 0:
            poly = linalg.poly_mul(poly, [-c2 * m * m, Fraction(0), Fraction(1)])
        elif m == 0:
            poly = linalg.poly_mul(poly, [Fraction(0), Fraction(1)])
    return poly


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    from math import isqrt
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    return Fraction(rn, rd) if rn * rn == n and rd * rd == d else None


def torus_weights(X: tuple[np.ndarray, ...], ks) -> tuple[dict, bool]:
    """Weights of a semisimple generator and the proportionality check.

    The common scale c is fixed by c^2 = tr(X_0^2) / sum m^2; each factor must
    then have characteristic polynomial prod_m (x - c m) over the progression
    m = -k, -k+2, ..., k.  All comparisons are exact.
    """
    tr0 = sum(linalg.matmul(X[0], X[0])[i, i] for i in range(X[0].shape[0]))
    c2 = Fraction(tr0) / sum(m * m for m in progression(ks[0]))
    ok = c2 != 0
    per_slot = []
    for x, k in zip(X, ks):
        cp = linalg.characteristic_polynomial(x)
        ok = ok and cp == _target_charpoly(k, c2)
        per_slot.append(cp)
    c = _rational_sqrt(c2)
    weights = {"scale_squared": _fmt(c2), "rational": c is not None, "per_slot": []}
    for x, k in zip(X, ks):
        if c is not None:
            eig = sorted(linalg.rational_roots(linalg.characteristic_polynomial(x)))
            weights["per_slot"].append([_fmt(e) for e in eig])
        else:
            weights["per_slot"].append([f"c*{m}" for m in progression(k)])
    return weights, ok


def classify(A: BoundaryTensor, verdict=None, check_nondegeneracy: bool = True,
             nondeg_options: dict | None = None) -> StabilizerReport:
    """Classify Stab(A)^0 as Trivial, Additive (C), Torus (C*) or SL2."""
    if A.format.has_trivial_factor:
        raise PreconditionError(f"format {A.format} has a factor with k_i = 0")
    warnings = []
    if check_nondegeneracy and verdict is None:
        from .nondegeneracy import nondegenerate
        verdict = nondegenerate(A, **(nondeg_options or {}))
    if verdict is not None:
        status = verdict.status
        if status in ("DegenerateExact", "DegenerateWitness"):
            raise PreconditionError(f"input is degenerate ({status})")
        if status == "NondegenerateProbable":
            warnings.append("nondegeneracy is probable, not certified")
        elif status == "Inconclusive":
            warnings.append("nondegeneracy inconclusive")
    gens = stab_algebra(A)
    dim = len(gens)
    certs: dict = {}
    weights = None
    if dim == 0:
        cls = TRIVIAL
    elif dim == 3:
        certs = sl2_certificate(gens)
        if not all(certs.values()):
            raise ClassificationError(f"3-dim stabilizer algebra is not sl(2): {certs}")
        cls = SL2
    elif dim == 1:
        X = gens[0].X
        nil = [linalg.is_nilpotent(x) for x in X]
        ss = [linalg.is_semisimple(x) for x in X]
        certs = {"nilpotent": nil, "semisimple": ss}
        if all(nil):
            cls = ADDITIVE
            certs["triangular_basis"] = triangulating_basis(A, gens[0]) is not None
        elif all(ss):
            cls = TORUS
            weights, ok = torus_weights(X, A.format.k)
            certs["weight_progression"] = ok
            if not ok:
                raise ClassificationError("torus weights are not proportional to (-k, ..., k)")
        else:
            raise ClassificationError(
                "classification violated: mixed Jordan type in a one-dimensional stabilizer")
    else:
        raise ClassificationError(
            f"classification violated: stabilizer dimension {dim} not in {{0, 1, 3}}; "
            "input likely degenerate or implementation bug")
    return StabilizerReport(dim, cls, gens, weights, certs, warnings)


# ---------------------------------------------------------------------------
# supports and normal forms


def _support_cells(dims):
    return itertools.product(*(range(d) for d in dims))


def check_support(A: BoundaryTensor, kind: str, atol: float = 0.0) -> bool:
    """Support predicate in the current coordinates."""
    if kind not in ("triangular", "diagonal", "identity"):
        raise ValueError(f"unknown support kind {kind!r}")
    E = A.entries

    def zero(v):
        return v == 0 if A.exact else abs(v) <= atol

    for idx in _support_cells(A.dims):
        s = sum(idx[1:])
        v = E[idx]
        if kind == "triangular" and idx[0] > s and not zero(v):
            return False
        if kind in ("diagonal", "identity") and idx[0] != s and not zero(v):
            return False
        if kind == "identity" and idx[0] == s and not zero(v - 1):
            return False
    return True


def diagonalize_torus(A: BoundaryTensor, report: StabilizerReport) -> GroupElement:
    """Weight-sorted eigenbases of the torus generator; verified diagonal support."""
    if report.cls != TORUS:
        raise PreconditionError(f"diagonalize_torus needs a Torus report, got {report.cls}")
    X = report.generators[0].X
    exact = bool(report.weights and report.weights.get("rational"))
    mats = []
    for slot, x in enumerate(X):
        d = x.shape[0]
        if exact:
            eig = linalg.rational_roots(linalg.characteristic_polynomial(x))
            eig = sorted(set(eig), reverse=(slot == 0))
            cols = []
            for lam in eig:
                ker = linalg.nullspace(x - lam * linalg.eye(d))
                cols.extend(ker)
            B = np.array(cols, dtype=object).T
            mats.append(linalg.inverse(B))
        else:
            w, V = np.linalg.eig(linalg.to_complex(x))
            order = np.argsort(-w.real if slot == 0 else w.real)
            mats.append(np.linalg.inv(V[:, order]))
    g = GroupElement(tuple(mats))
    B = act(g, A)
    atol = 0.0 if B.exact else 1e-9 * float(np.abs(B.to_complex()).max())
    if not check_support(B, "diagonal", atol):
        raise ClassificationError("torus eigenbasis does not diagonalize A")
    return g


def triangulating_basis(A: BoundaryTensor, gen: StabGenerator) -> GroupElement | None:
    """Jordan-chain bases for a nilpotent generator, kept only if the result is triangular."""
    mats = []
    for slot, x in enumerate(gen.X):
        d = x.shape[0]
        P = linalg.eye(d)
        for _ in range(d - 1):
            P = linalg.matmul(P, x)
        start = next((i for i in range(d) if any(v != 0 for v in P[:, i])), None)
        if start is None:
            return None
        v = linalg.eye(d)[:, start]
        chain = [v]
        for _ in range(d - 1):
            chain.append(linalg.matmul(x, chain[-1]))
        # slot 0 lowers along the chain, other slots raise
        if slot == 0:
            chain = chain[::-1]
        mats.append(linalg.inverse(np.array(chain, dtype=object).T))
    for flip in (False, True):
        use = mats if not flip else [m[::-1, :] for m in mats]
        g = GroupElement(tuple(use))
        if check_support(act(g, A), "triangular"):
            return g
    return None
