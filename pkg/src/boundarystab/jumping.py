"""Strong and weak-(j) jumping hyperplanes, direction loci and elementary
transformations.

A covector xi on V0 is a strong jumping hyperplane when the slice A.xi is a
nonzero decomposable tensor, and a weak-(j) one when the slice has rank one in
the V_j versus rest flattening.  Detection solves

    sum_i xi_i B_i = u_1 (x) ... (x) u_m

by damped Gauss-Newton from many random starts (m = p for strong, m = 2 for
weak), clusters the converged xi projectively and, for rational input, tries
to confirm every cluster exactly at a nearby point of small height.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels, linalg
from .nondegeneracy import rationalize_vector
from .stabilizer import PreconditionError
from .tensor import (BoundaryTensor, Format, contract0, flatten, format_scalar,
                     is_decomposable_exact, mode_product)

STRONG = "Strong"
CLUSTER_TOL = 1e-6
DEFAULT_RESTARTS = 256
TOL = 1e-10
ACCEPT = 1e-8
# stalled descents (multiple roots converge slowly) below this residual are
# kept, but only an exact check can turn them into detections
LOOSE = 1e-5
# (max denominator, tolerance) tried when snapping a numeric covector to a
# rational one; loose at small height because the exact test decides
_HEIGHTS = ((10, 1e-2), (100, 1e-3), (1000, 1e-5), (10 ** 4, 1e-6), (10 ** 6, 1e-8))
# identity threshold counts detections separated by more than this, so the
# smeared copies of a multiple root do not count as distinct hyperplanes
SEPARATION = 1e-3
# approximations to a multiple root scatter on a ring around it; their phase-aligned
# centroid is far more accurate than any member and is what gets snapped
RING = 0.3
RING_MIN = 3


def weak_kind(j: int) -> str:
    return f"Weak({j})"


@dataclass
class JumpingHyperplane:
    kind: str
    xi: np.ndarray
    witnesses: tuple
    residual: float
    exact: bool = False

    @property
    def slot(self) -> int | None:
        return None if self.kind == STRONG else int(self.kind[5:-1])

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "xi": [format_scalar(c) for c in self.xi],
            "witnesses": [[format_scalar(c) for c in np.asarray(w).ravel()] for w in self.witnesses],
            "residual": self.residual,
            "exact": self.exact,
        }


@dataclass
class JumpingReport:
    mode: str
    items: list[JumpingHyperplane]
    identity_flag: bool
    curve_evidence: dict | None = None
    k0: int = 0
    search: dict = field(default_factory=dict)

    @property
    def count_distinct(self) -> int:
        return len(self.items)

    @property
    def count_separated(self) -> int:
        return len(cluster([it.xi for it in self.items], SEPARATION))

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "count_distinct": self.count_distinct,
            "count_separated": self.count_separated,
            "identity_flag": self.identity_flag,
            "items": [it.to_json() for it in self.items],
            "curve_evidence": self.curve_evidence,
            "search": self.search,
        }


# ---------------------------------------------------------------------------
# projective helpers


def normalize(v) -> np.ndarray:
    """Projective representative with first nonzero coordinate equal to 1."""
    v = np.asarray(v)
    if v.dtype == object:
        for c in v:
            if c != 0:
                return np.array([Fraction(x) / c for x in v], dtype=object)
        raise ValueError("zero vector")
    v = v.astype(np.complex128)
    big = np.abs(v).max()
    if big == 0:
        raise ValueError("zero vector")
    piv = int(np.argmax(np.abs(v) > 1e-6 * big))
    return v / v[piv]


def projective_distance(a, b) -> float:
    """sin of the angle between the lines spanned by a and b."""
    a = linalg.to_complex(np.asarray(a).reshape(1, -1)).ravel()
    b = linalg.to_complex(np.asarray(b).reshape(1, -1)).ravel()
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    # orthogonal residual avoids the cancellation in 1 - cos^2
    return float(min(1.0, np.linalg.norm(b - np.vdot(a, b) * a)))


def _unit(v) -> np.ndarray:
    v = linalg.to_complex(np.asarray(v).reshape(1, -1)).ravel()
    return v / np.linalg.norm(v)


class ProjectiveSet:
    """Points of a projective space kept as unit vectors for batched distances."""

    def __init__(self, tol: float = CLUSTER_TOL):
        self.tol = tol
        self._rows: list[np.ndarray] = []
        self._mat = None

    def distance(self, v) -> float:
        if not self._rows:
            return 1.0
        if self._mat is None:
            self._mat = np.array(self._rows)
        u = _unit(v)
        c = self._mat.conj() @ u
        res = np.linalg.norm(u[None, :] - c[:, None] * self._mat, axis=1)
        return float(res.min())

    def __contains__(self, v) -> bool:
        return self.distance(v) < self.tol

    def __len__(self) -> int:
        return len(self._rows)

    def add(self, v) -> None:
        self._rows.append(_unit(v))
        self._mat = None


def cluster(vectors, tol: float = CLUSTER_TOL) -> list[int]:
    """Indices of cluster representatives, first occurrence wins."""
    seen = ProjectiveSet(tol)
    reps: list[int] = []
    for i, v in enumerate(vectors):
        if v not in seen:
            reps.append(i)
            seen.add(v)
    return reps


# ---------------------------------------------------------------------------
# slice tests and witnesses


def _weak_flat(A: BoundaryTensor, xi, j: int) -> np.ndarray:
    return flatten(contract0(A, xi), j)


def _is_zero(T) -> bool:
    T = np.asarray(T)
    if T.dtype == object:
        return all(c == 0 for c in T.flat)
    return not np.any(T)


def _rank_one_pair(F: np.ndarray):
    """(v, h) with F = v h^T for a rank-one matrix F."""
    if F.dtype == object:
        for (r, c), val in np.ndenumerate(F):
            if val != 0:
                return F[:, c].copy(), np.array([x / val for x in F[r, :]], dtype=object)
        raise ValueError("zero matrix")
    u, s, vh = np.linalg.svd(F)
    return u[:, 0], s[0] * vh[0, :]


def strong_factors(T) -> tuple:
    """u_1, ..., u_p with T = u_1 (x) ... (x) u_p up to scale (T decomposable)."""
    T = np.asarray(T)
    out = []
    for j in range(1, T.ndim + 1):
        v, _ = _rank_one_pair(flatten(T, j))
        out.append(normalize(v))
    return tuple(out)


def slice_residual(A: BoundaryTensor, xi, j: int | None = None) -> float:
    """sigma_2 / sigma_1 of the slice flattenings (all of them when j is None)."""
    S = contract0(A, xi)
    if j is None:
        from .tensor import residual_rank_one
        return residual_rank_one(S)
    F = flatten(S, j)
    if F.dtype == object:
        if _is_zero(F):
            raise ValueError("zero slice")
        if linalg.rank(F) == 1:
            return 0.0
        F = linalg.to_complex(F)
    s = linalg.singular_values(F)
    return float(s[1] / s[0]) if s.size > 1 else 0.0


def is_jumping_exact(A: BoundaryTensor, xi, j: int | None = None) -> bool:
    """Exact test: slice nonzero and decomposable (j None) or rank one in slot j."""
    S = contract0(A, xi)
    if _is_zero(S):
        return False
    if j is None:
        return is_decomposable_exact(S)
    return linalg.rank(flatten(S, j)) == 1


def _make_item(A: BoundaryTensor, xi, j: int | None, residual: float, exact: bool) -> JumpingHyperplane:
    S = contract0(A, xi)
    if j is None:
        wit = strong_factors(S)
        kind = STRONG
    else:
        v, h = _rank_one_pair(flatten(S, j))
        wit = (normalize(v), h)
        kind = weak_kind(j)
    return JumpingHyperplane(kind, normalize(xi), wit, residual, exact)


# ---------------------------------------------------------------------------
# numeric search


def _family(A: BoundaryTensor, j: int | None):
    """Coefficient matrix B (d0 x N) and group sizes for the rank-one system."""
    T = A.to_complex()
    d0 = A.dims[0]
    if j is None:
        return T.reshape(d0, -1), np.array(A.dims[1:], dtype=np.int64)
    moved = np.moveaxis(T, j, 1)
    rest = int(np.prod(A.dims[1:])) // A.dims[j]
    return moved.reshape(d0, -1), np.array([A.dims[j], rest], dtype=np.int64)


def _search(A: BoundaryTensor, j: int | None, restarts: int, seed: int, tol: float,
            section, backend, maxiter: int = 100) -> list[tuple[float, np.ndarray]]:
    be = kernels.get_backend(backend)
    B, dims = _family(A, j)
    B = B / np.abs(B).max()
    d0 = B.shape[0]
    idx = kernels.index_table(dims)
    offs = kernels.offsets(d0, dims)
    L = np.zeros((0, d0), dtype=np.complex128) if section is None else linalg.to_complex(np.atleast_2d(section))
    nx = d0 + int(dims.sum())
    found = []
    for r in range(restarts):
        rng = np.random.default_rng([seed, r, 7])
        c0 = rng.normal(size=d0) + 1j * rng.normal(size=d0)
        cg = np.zeros((len(dims), int(dims.max())), dtype=np.complex128)
        for g in range(1, len(dims)):
            cg[g, : dims[g]] = rng.normal(size=dims[g]) + 1j * rng.normal(size=dims[g])
        x0 = rng.normal(size=nx) + 1j * rng.normal(size=nx)
        x, f, _ = be.rank1_solve(B, idx, dims, offs, c0, cg, L, x0, maxiter, tol)
        if f < max(tol, LOOSE):
            found.append((float(f), x[:d0].copy()))
    return found


def _snap(A: BoundaryTensor, xi: np.ndarray, j: int | None):
    """Exact covector near ``xi`` passing the exact jumping test, or None."""
    w = np.asarray(xi, dtype=np.complex128)
    w = w / w[np.argmax(np.abs(w))]
    for h, tol in _HEIGHTS:
        cand = rationalize_vector(w, max_den=h, tol=tol)
        if cand is None or isinstance(cand, tuple):
            continue
        if is_jumping_exact(A, cand, j):
            return cand
    return None


def _collect(A: BoundaryTensor, j: int | None, candidates, exact_items=(), tol: float = TOL) -> list[JumpingHyperplane]:
    """Turn converged covectors into distinct, checked detections."""
    items: list[JumpingHyperplane] = []
    seen = ProjectiveSet()

    def keep(it):
        items.append(it)
        seen.add(it.xi)

    for it in exact_items:
        if it.xi not in seen:
            keep(it)
    Ac = BoundaryTensor(A.format, A.to_complex())
    S_norm = np.abs(Ac.entries).max()
    for f, xi in sorted(candidates, key=lambda c: c[0]):
        xi = normalize(xi)
        if np.abs(contract0(Ac, xi)).max() < 1e-8 * S_norm or xi in seen:
            continue
        if A.exact:
            q = _snap(A, xi, j)
            if q is not None:
                if q not in seen:
                    keep(_make_item(A, q, j, 0.0, True))
                continue
        if f >= tol:
            continue
        res = slice_residual(Ac, xi, j)
        if res < ACCEPT:
            keep(_make_item(Ac, xi, j, res, False))
    if A.exact:
        pool = [xi for f, xi in candidates if f >= tol] + [it.xi for it in items if not it.exact]
        items = _merge_rings(A, j, items, pool)
    return items


def _centroid(vectors) -> np.ndarray:
    ref = _unit(vectors[0])
    acc = np.zeros_like(ref)
    for v in vectors:
        u = _unit(v)
        z = np.vdot(ref, u)
        acc += u * (abs(z) / z if z != 0 else 1)
    return acc / len(vectors)


def _snap_coarse(A: BoundaryTensor, c: np.ndarray, j: int | None):
    """Round a ring centre to small-denominator rationals; the exact test guards every guess."""
    q = _snap(A, c, j)
    if q is not None:
        return q
    w = np.asarray(c, dtype=np.complex128)
    w = w / w[np.argmax(np.abs(w))]
    if np.abs(w.imag).max() > 0.25:
        return None
    for den in range(1, 13):
        cand = np.array([Fraction(int(round(v * den)), den) for v in w.real], dtype=object)
        if any(v != 0 for v in cand) and is_jumping_exact(A, cand, j):
            return cand
    return None


def _start(B: np.ndarray, dims: np.ndarray, xi: np.ndarray):
    """Full unknown vector and gauges for the rank-one system at the covector xi."""
    xi = np.asarray(xi, dtype=np.complex128)
    xi = xi / np.linalg.norm(xi)
    S = (B.T @ xi).reshape(tuple(dims))
    us = [None] * len(dims)
    for g in range(1, len(dims)):
        u = np.linalg.svd(np.moveaxis(S, g, 0).reshape(dims[g], -1))[0][:, 0]
        us[g] = u / np.linalg.norm(u)
    u0 = S
    for g in range(len(dims) - 1, 0, -1):
        u0 = np.tensordot(u0, np.conj(us[g]), axes=([g], [0]))
    us[0] = u0
    cg = np.zeros((len(dims), int(dims.max())), dtype=np.complex128)
    for g in range(1, len(dims)):
        cg[g, : dims[g]] = np.conj(us[g])
    return np.concatenate([xi] + us), np.conj(xi), cg


def _isolated(A: BoundaryTensor, q, j: int | None, members: list, backend=None, probes: int = 6) -> bool:
    """Ring members around q are approximations, not points of a curve through q.

    Members are polished with a tight tolerance.  Points of a positive-dimensional
    component polish to ~1e-15 where they are; approximations to an isolated
    multiple root cannot get below 1e-13 without sliding towards q.
    """
    be = kernels.get_backend(backend)
    B, dims = _family(A, j)
    B = B / np.abs(B).max()
    d0 = B.shape[0]
    idx = kernels.index_table(dims)
    offs = kernels.offsets(d0, dims)
    L = np.zeros((0, d0), dtype=np.complex128)
    radius = float(np.median([projective_distance(q, m) for m in members]))
    for m in members[:probes]:
        x0, c0, cg = _start(B, dims, m)
        y, f, _ = be.rank1_solve(B, idx, dims, offs, c0, cg, L, x0, 200, 1e-14)
        if f < 1e-13 and projective_distance(y[:d0], q) >= radius / 3:
            return False
    return True


def _merge_rings(A: BoundaryTensor, j: int | None, items: list[JumpingHyperplane],
                 approx: list) -> list[JumpingHyperplane]:
    """Exact isolated roots at the centres of rings of approximations replace the ring.

    Descent near a root of high multiplicity stalls at a distance that shrinks
    only like a root of the residual, so the candidates spread on a ring whose
    phase-aligned centroid is much closer to the root than any member.
    """
    P = np.array([_unit(x) for x in approx]) if approx else np.zeros((0, 1))

    def dist(c):
        u = _unit(c)
        return np.linalg.norm(P - np.outer(P @ u.conj(), u), axis=1)

    live = np.ones(len(P), dtype=bool)
    roots = []
    while live.sum() >= RING_MIN:
        first = P[np.argmax(live)]
        c = first
        for _ in range(2):
            c = _centroid(list(P[live & (dist(c) < RING)]))
        near = dist(c) < RING
        group = list(P[live & near])
        live &= ~near & (dist(first) >= RING)
        if len(group) < RING_MIN:
            continue
        q = _snap_coarse(A, c, j)
        if q is not None and _isolated(A, q, j, group):
            roots.append(normalize(q))
    if not roots:
        return items
    out = [it for it in items if it.exact or all(projective_distance(it.xi, q) >= RING for q in roots)]
    seen = ProjectiveSet()
    for it in out:
        seen.add(it.xi)
    for q in roots:
        if q not in seen:
            out.append(_make_item(A, q, j, 0.0, True))
            seen.add(q)
    return out


def _check_input(A: BoundaryTensor):
    if A.is_zero():
        raise ValueError("zero tensor")


def curve_sweep(A: BoundaryTensor, need: int, budget: int | None = None) -> dict | None:
    """Exact strong covectors along a factor with k_j = 1.

    For each rational point u of P(V_j), the covectors whose slice lies in
    u (x) (rest) form a linear space; a one-dimensional solution is tested for
    exact decomposability.  Returns the evidence once ``need`` distinct points
    are verified, else None.
    """
    if not A.exact:
        return None
    fmt = A.format
    budget = budget or 3 * need
    for j in [j for j in range(1, fmt.p + 1) if fmt.k[j] == 1]:
        params, xis = [], []
        us = [(Fraction(0), Fraction(1))] + [(Fraction(1), Fraction(t)) for t in range(budget)]
        for u in us:
            perp = np.array([-u[1], u[0]], dtype=object)
            # column c of flatten_j(A.xi) dotted with perp, as a linear form in xi
            M = np.tensordot(np.moveaxis(A.entries, j, 1), perp, axes=([1], [0]))
            M = M.reshape(fmt.dims[0], -1).T
            ker = linalg.nullspace(M)
            if len(ker) != 1:
                continue
            xi = normalize(ker[0])
            if is_jumping_exact(A, xi):
                params.append("inf" if u[0] == 0 else format_scalar(u[1]))
                xis.append(xi)
            if len(xis) >= need:
                return {"slot": j, "params": params, "xi": xis}
    return None


def detect_strong(A: BoundaryTensor, restarts: int = DEFAULT_RESTARTS, tol: float = TOL, seed: int = 0,
                  section=None, backend: str | None = None, sweep: bool = True) -> JumpingReport:
    """Strong jumping hyperplanes; ``section`` adds linear constraints L xi = 0."""
    _check_input(A)
    k0 = A.format.k0
    need = k0 + 3
    evidence = curve_sweep(A, need) if (sweep and section is None) else None
    seeds = []
    if evidence is not None:
        seeds = [_make_item(A, xi, None, 0.0, True) for xi in evidence["xi"]]
    cands = _search(A, None, restarts, seed, tol, section, backend)
    items = _collect(A, None, cands, seeds, tol)
    flag = evidence is not None or (section is None and len(cluster([it.xi for it in items], SEPARATION)) >= need)
    json_evidence = None if evidence is None else {
        "slot": evidence["slot"], "params": evidence["params"],
        "xi": [[format_scalar(c) for c in x] for x in evidence["xi"]]}
    return JumpingReport("strong", items, flag, json_evidence, k0,
                         {"restarts": restarts, "seed": seed, "tol": tol, "converged": sum(f < tol for f, _ in cands),
                          "section": section is not None})


def detect_weak(A: BoundaryTensor, j: int, restarts: int = DEFAULT_RESTARTS, tol: float = TOL, seed: int = 0,
                strong: JumpingReport | None = None, backend: str | None = None) -> JumpingReport:
    """Weak-(j) hyperplanes, including every strong detection (strong implies weak)."""
    _check_input(A)
    if not 1 <= j <= A.format.p:
        raise ValueError(f"slot {j} out of range 1..{A.format.p}")
    if strong is None:
        strong = detect_strong(A, restarts=restarts, tol=tol, seed=seed, backend=backend)
    base = [_make_item(A if it.exact else BoundaryTensor(A.format, A.to_complex()), it.xi, j,
                       it.residual, it.exact) for it in strong.items]
    cands = _search(A, j, restarts, seed, tol, None, backend)
    items = _collect(A, j, cands, base, tol)
    return JumpingReport(weak_kind(j), items, strong.identity_flag, strong.curve_evidence, A.format.k0,
                         {"restarts": restarts, "seed": seed, "tol": tol,
                          "converged": sum(f < tol for f, _ in cands)})


@dataclass
class DirectionLocus:
    slot: int
    directions: list[np.ndarray]
    infinite: bool

    def to_json(self) -> dict:
        return {"slot": self.slot, "infinite": self.infinite,
                "directions": [[format_scalar(c) for c in d] for d in self.directions]}


def strong_direction_locus(A: BoundaryTensor, j: int, report: JumpingReport | None = None,
                           **options) -> DirectionLocus:
    """Witness directions in P(V_j) of the strong hyperplanes, clustered."""
    if not 1 <= j <= A.format.p:
        raise ValueError(f"slot {j} out of range 1..{A.format.p}")
    report = report or detect_strong(A, **options)
    vs = [normalize(it.witnesses[j - 1]) for it in report.items]
    reps = cluster(vs)
    return DirectionLocus(j, [vs[i] for i in reps], report.identity_flag)


# ---------------------------------------------------------------------------
# elementary transformation


@dataclass
class Transform:
    """A'_j together with the quotient data used to build it."""

    tensor: BoundaryTensor
    v0: np.ndarray
    vj: np.ndarray
    h: np.ndarray
    W0: np.ndarray
    Cj: np.ndarray


def _pivot(v) -> int:
    v = np.asarray(v)
    if v.dtype == object:
        return next(i for i, c in enumerate(v) if c != 0)
    return int(np.argmax(np.abs(v) > 1e-6 * np.abs(v).max()))


def _dual_rows(basis_cols: list, extra, exact: bool) -> np.ndarray:
    """Rows of the inverse of [basis | extra] belonging to ``basis``."""
    if exact:
        M = linalg.as_exact(np.array([list(b) for b in basis_cols] + [list(extra)], dtype=object).T)
        return linalg.inverse(M)[:-1, :]
    M = np.array([linalg.to_complex(np.asarray(b, dtype=object if exact else np.complex128).reshape(1, -1)).ravel()
                  for b in basis_cols] + [np.asarray(extra, dtype=np.complex128)]).T
    return np.linalg.inv(M)[:-1, :]


def elementary_transform(A: BoundaryTensor, xi, j: int, v0_rule: str = "dual",
                         rtol: float = 1e-8) -> Transform:
    """Components of A in (V0/<v0>) (x) ... (x) (V_j/<v_j>) (x) ...

    ``v0_rule="dual"``: v0 = e_i / xi_i at the first nonzero coordinate for
    rational xi, xi^* / |xi|^2 otherwise.  ker xi is spanned by the free-column
    basis of the 1 x d0 system xi.x = 0 (float input: an orthonormal basis),
    and V_j/<v_j> by the coordinate vectors other than the pivot of v_j.
    """
    if v0_rule != "dual":
        raise ValueError(f"unknown v0 rule {v0_rule!r}")
    fmt = A.format
    if not 1 <= j <= fmt.p:
        raise ValueError(f"slot {j} out of range 1..{fmt.p}")
    xi = np.asarray(xi)
    exact = A.exact and xi.dtype == object
    if exact:
        xi = linalg.as_exact(xi)
        F = _weak_flat(A, xi, j)
        if _is_zero(F):
            raise PreconditionError("zero slice")
        if linalg.rank(F) != 1:
            raise PreconditionError(f"covector is not a weak-({j}) jumping hyperplane")
        src = A
    else:
        xi = linalg.to_complex(xi.reshape(1, -1)).ravel()
        src = BoundaryTensor(fmt, A.to_complex())
        F = _weak_flat(src, xi, j)
        s = linalg.singular_values(F)
        if s[0] == 0:
            raise PreconditionError("zero slice")
        if s.size > 1 and s[1] > rtol * s[0]:
            raise PreconditionError(f"covector is not a weak-({j}) jumping hyperplane (sigma ratio {s[1] / s[0]:.2e})")
    vj, h = _rank_one_pair(F)
    d0, dj = fmt.dims[0], fmt.dims[j]
    piv = _pivot(xi)
    if exact:
        v0 = np.array([Fraction(0)] * d0, dtype=object)
        v0[piv] = 1 / xi[piv]
        kernel = linalg.nullspace(xi.reshape(1, -1))
    else:
        v0 = np.conj(xi) / np.vdot(xi, xi).real
        kernel = list(linalg.nullspace_float(xi.reshape(1, -1)).T)
    W0 = _dual_rows(kernel, v0, exact)
    pj = _pivot(vj)
    unit = (lambda c: np.array([Fraction(int(i == c)) for i in range(dj)], dtype=object)) if exact else \
        (lambda c: np.eye(dj, dtype=np.complex128)[c])
    comp = [unit(c) for c in range(dj) if c != pj]
    Cj = _dual_rows(comp, vj, exact)
    E = mode_product(src.entries, W0, 0)
    E = mode_product(E, Cj, j)
    k = list(fmt.k)
    k[0] -= 1
    k[j] -= 1
    out = BoundaryTensor(Format(tuple(k), reduced=True), E)
    return Transform(out, v0, vj, h, W0, Cj)


def weak_locus_inclusion_check(A: BoundaryTensor, xi, j: int, report: JumpingReport | None = None,
                               tol: float = 1e-6, **options) -> dict:
    """Every weak-(j) witness h' != h of A is a weak-(j) witness of A'_j.

    For each detected h' the linear system flatten_j(A'.eta) = w h'^T is solved
    for (eta, w); a solution with nonzero slice confirms h'.
    """
    T = elementary_transform(A, xi, j)
    if report is None:
        report = detect_weak(A, j, **options)
    h = T.h
    checked, missing = 0, []
    for it in report.items:
        h2 = it.witnesses[1] if it.kind != STRONG else _rank_one_pair(_weak_flat(
            A if it.exact else BoundaryTensor(A.format, A.to_complex()), it.xi, j))[1]
        if projective_distance(h2, h) < tol:
            continue
        checked += 1
        if not _witness_in(T.tensor, j, h2, it.exact and A.exact, tol):
            missing.append([format_scalar(c) for c in h2])
    return {"holds": not missing, "checked": checked, "missing": missing,
            "format": str(T.tensor.format)}


def _witness_in(Ap: BoundaryTensor, j: int, h, exact: bool, tol: float) -> bool:
    d0, dj = Ap.dims[0], Ap.dims[j]
    if dj == 0 or d0 == 0:
        return False
    if exact:
        moved = np.moveaxis(Ap.entries, j, 1).reshape(d0, dj, -1)
        R = moved.shape[2]
        # unknowns (eta, w): sum_i eta_i moved[i, a, c] - w_a h_c = 0
        rows = []
        for a in range(dj):
            for c in range(R):
                row = [moved[i, a, c] for i in range(d0)] + [Fraction(0)] * dj
                row[d0 + a] = -Fraction(h[c])
                rows.append(row)
        ker = linalg.nullspace(np.array(rows, dtype=object))
        return any(not _is_zero(v[:d0]) and not _is_zero(v[d0:]) for v in ker)
    moved = np.moveaxis(Ap.to_complex(), j, 1).reshape(d0, dj, -1)
    R = moved.shape[2]
    h = linalg.to_complex(np.asarray(h).reshape(1, -1)).ravel()
    M = np.zeros((dj * R, d0 + dj), dtype=np.complex128)
    for a in range(dj):
        M[a * R:(a + 1) * R, :d0] = moved[:, a, :].T
        M[a * R:(a + 1) * R, d0 + a] = -h
    ker = linalg.nullspace_float(M, tol)
    if ker.shape[1] == 0:
        return False
    # nonzero slice part; w = 0 forces eta in ker of the slice map
    return bool(np.linalg.norm(ker[d0:, :]) > tol)
