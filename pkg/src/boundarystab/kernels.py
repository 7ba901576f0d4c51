"""Hot numeric kernels: damped Gauss-Newton for rank-one slice fits and for
the degeneracy (kernel-vector) search.

Each kernel exists twice: explicit loops compiled by numba, and a vectorized
numpy version.  Both share one driver source; ``_bind`` clones the driver with the
evaluator of its backend so the compiled driver calls compiled code.
"""
from __future__ import annotations

import itertools
import types
from types import SimpleNamespace

import numpy as np

from ._accel import HAVE_NUMBA, default_backend, njit


def index_table(dims) -> np.ndarray:
    """Multi-indices in C order, shape (prod(dims), len(dims))."""
    return np.array(list(itertools.product(*(range(d) for d in dims))), dtype=np.int64).reshape(-1, len(dims))


def offsets(first: int, dims) -> np.ndarray:
    out = np.empty(len(dims), dtype=np.int64)
    pos = first
    for g, d in enumerate(dims):
        out[g] = pos
        pos += d
    return out


# ---------------------------------------------------------------------------
# rank-one fit of a linear family:  sum_i xi_i B[i] = u_1 (x) ... (x) u_m
# gauges: c0 . xi = 1, cg[g] . u_g = 1 for g >= 1; sections: L xi = 0


def _rank1_eval_loops(B, idx, dims, offs, c0, cg, L, x):
    n0 = B.shape[0]
    N = B.shape[1]
    m = dims.shape[0]
    q = L.shape[0]
    nr = N + m + q
    nx = x.shape[0]
    r = np.zeros(nr, dtype=np.complex128)
    J = np.zeros((nr, nx), dtype=np.complex128)
    for e in range(N):
        s = 0j
        for i in range(n0):
            s += x[i] * B[i, e]
            J[e, i] = B[i, e]
        prod = 1.0 + 0j
        for g in range(m):
            prod *= x[offs[g] + idx[e, g]]
        r[e] = s - prod
        for g in range(m):
            pe = 1.0 + 0j
            for h in range(m):
                if h != g:
                    pe *= x[offs[h] + idx[e, h]]
            J[e, offs[g] + idx[e, g]] = -pe
    row = N
    s = 0j
    for i in range(n0):
        s += c0[i] * x[i]
        J[row, i] = c0[i]
    r[row] = s - 1.0
    row += 1
    for g in range(1, m):
        s = 0j
        for a in range(dims[g]):
            s += cg[g, a] * x[offs[g] + a]
            J[row, offs[g] + a] = cg[g, a]
        r[row] = s - 1.0
        row += 1
    for t in range(q):
        s = 0j
        for i in range(n0):
            s += L[t, i] * x[i]
            J[row, i] = L[t, i]
        r[row] = s
        row += 1
    return r, J


def _rank1_eval_numpy(B, idx, dims, offs, c0, cg, L, x):
    n0, N = B.shape
    m = dims.shape[0]
    xi = x[:n0]
    gathered = np.stack([x[offs[g] + idx[:, g]] for g in range(m)], axis=1)
    prod = gathered.prod(axis=1)
    r_main = B.T @ xi - prod
    J = np.zeros((N + m + L.shape[0], x.shape[0]), dtype=np.complex128)
    J[:N, :n0] = B.T
    rows = np.arange(N)
    for g in range(m):
        others = np.prod(np.delete(gathered, g, axis=1), axis=1) if m > 1 else np.ones(N, np.complex128)
        J[rows, offs[g] + idx[:, g]] = -others
    gauge = [c0 @ xi - 1.0]
    J[N, :n0] = c0
    for g in range(1, m):
        sl = slice(offs[g], offs[g] + dims[g])
        gauge.append(cg[g, : dims[g]] @ x[sl] - 1.0)
        J[N + g, sl] = cg[g, : dims[g]]
    J[N + m:, :n0] = L
    r = np.concatenate([r_main, np.array(gauge, dtype=np.complex128), L @ xi])
    return r, J


def _rank1_solve(B, idx, dims, offs, c0, cg, L, x, maxiter, tol):
    x = x.copy()
    r, J = _RANK1_EVAL(B, idx, dims, offs, c0, cg, L, x)
    f = np.sqrt(np.sum(np.abs(r) ** 2))
    mu = 1e-3
    nx = x.shape[0]
    nr = r.shape[0]
    it = 0
    for it in range(maxiter):
        if f < tol:
            break
        M = np.zeros((nr + nx, nx), dtype=np.complex128)
        M[:nr, :] = J
        rhs = np.zeros(nr + nx, dtype=np.complex128)
        rhs[:nr] = -r
        sm = np.sqrt(mu)
        for i in range(nx):
            M[nr + i, i] = sm
        d = np.linalg.lstsq(M, rhs)[0]
        xn = x + d
        rn, Jn = _RANK1_EVAL(B, idx, dims, offs, c0, cg, L, xn)
        fn = np.sqrt(np.sum(np.abs(rn) ** 2))
        if fn < f:
            x = xn
            r = rn
            J = Jn
            f = fn
            mu = max(mu * 0.1, 1e-15)
        else:
            mu *= 10.0
            if mu > 1e8:
                break
    return x, f, it


# ---------------------------------------------------------------------------
# degeneracy search: unit y_1..y_p with A(., y_1, ..., y_p) = 0


def _degen_eval_loops(A, idx, dims, offs, y):
    d0 = A.shape[0]
    N = A.shape[1]
    m = dims.shape[0]
    r = np.zeros(d0, dtype=np.complex128)
    J = np.zeros((d0, y.shape[0]), dtype=np.complex128)
    for e in range(N):
        prod = 1.0 + 0j
        for g in range(m):
            prod *= y[offs[g] + idx[e, g]]
        for g in range(m):
            pe = 1.0 + 0j
            for h in range(m):
                if h != g:
                    pe *= y[offs[h] + idx[e, h]]
            col = offs[g] + idx[e, g]
            for i in range(d0):
                J[i, col] += A[i, e] * pe
        for i in range(d0):
            r[i] += A[i, e] * prod
    return r, J


def _degen_eval_numpy(A, idx, dims, offs, y):
    m = dims.shape[0]
    gathered = np.stack([y[offs[g] + idx[:, g]] for g in range(m)], axis=1)
    r = A @ gathered.prod(axis=1)
    J = np.zeros((A.shape[0], y.shape[0]), dtype=np.complex128)
    for g in range(m):
        others = np.prod(np.delete(gathered, g, axis=1), axis=1) if m > 1 else np.ones(A.shape[1], np.complex128)
        W = A * others[None, :]
        # sum columns e into slot g coordinate idx[e, g]
        for a in range(dims[g]):
            J[:, offs[g] + a] = W[:, idx[:, g] == a].sum(axis=1)
    return r, J


def _degen_solve(A, idx, dims, offs, y, maxiter, tol):
    y = y.copy()
    m = dims.shape[0]
    ny = y.shape[0]
    r, J = _DEGEN_EVAL(A, idx, dims, offs, y)
    f = np.sqrt(np.sum(np.abs(r) ** 2))
    mu = 1e-3
    nr = r.shape[0]
    it = 0
    for it in range(maxiter):
        if f < tol:
            break
        # tangent constraints y_g^H dy_g = 0 keep the step on the spheres
        M = np.zeros((nr + m + ny, ny), dtype=np.complex128)
        M[:nr, :] = J
        for g in range(m):
            for a in range(dims[g]):
                M[nr + g, offs[g] + a] = np.conj(y[offs[g] + a])
        sm = np.sqrt(mu)
        for i in range(ny):
            M[nr + m + i, i] = sm
        rhs = np.zeros(nr + m + ny, dtype=np.complex128)
        rhs[:nr] = -r
        d = np.linalg.lstsq(M, rhs)[0]
        yn = y + d
        for g in range(m):
            nrm = 0.0
            for a in range(dims[g]):
                nrm += np.abs(yn[offs[g] + a]) ** 2
            nrm = np.sqrt(nrm)
            for a in range(dims[g]):
                yn[offs[g] + a] /= nrm
        rn, Jn = _DEGEN_EVAL(A, idx, dims, offs, yn)
        fn = np.sqrt(np.sum(np.abs(rn) ** 2))
        if fn < f:
            y = yn
            r = rn
            J = Jn
            f = fn
            mu = max(mu * 0.1, 1e-15)
        else:
            mu *= 10.0
            if mu > 1e8:
                break
    return y, f, it


def _bind(fn, **overrides):
    """Copy of ``fn`` whose global lookups see ``overrides``."""
    namespace = dict(globals())
    namespace.update(overrides)
    return types.FunctionType(fn.__code__, namespace, fn.__name__, fn.__defaults__)


_numpy = SimpleNamespace(
    name="numpy",
    rank1_eval=_rank1_eval_numpy,
    rank1_solve=_bind(_rank1_solve, _RANK1_EVAL=_rank1_eval_numpy),
    degen_eval=_degen_eval_numpy,
    degen_solve=_bind(_degen_solve, _DEGEN_EVAL=_degen_eval_numpy),
)

BACKENDS = {"numpy": _numpy}

if HAVE_NUMBA:
    _rank1_eval_nb = njit(_rank1_eval_loops)
    _degen_eval_nb = njit(_degen_eval_loops)
    BACKENDS["numba"] = SimpleNamespace(
        name="numba",
        rank1_eval=_rank1_eval_nb,
        rank1_solve=njit(_bind(_rank1_solve, _RANK1_EVAL=_rank1_eval_nb)),
        degen_eval=_degen_eval_nb,
        degen_solve=njit(_bind(_degen_solve, _DEGEN_EVAL=_degen_eval_nb)),
    )


def get_backend(name: str | None = None) -> SimpleNamespace:
    """Kernel set by name; ``None`` follows the environment flag."""
    name = name or default_backend()
    if name not in BACKENDS:
        raise ValueError(f"kernel backend {name!r} unavailable (have {sorted(BACKENDS)})")
    return BACKENDS[name]
