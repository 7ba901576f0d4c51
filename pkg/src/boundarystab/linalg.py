"""Exact-rational and complex-float matrix kernel.

Exact matrices are numpy ``object`` arrays (or nested lists) holding ``int`` or
``fractions.Fraction`` entries.  Elimination is done fraction-free (Bareiss) on
integer rows obtained by clearing denominators row by row, which keeps the
intermediate numbers equal to minors of the input.

Float matrices are ``complex128`` arrays.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_RTOL = 1e-8


class ConsistencyError(RuntimeError):
    """Raised when two backends disagree on a quantity that must match."""


# ---------------------------------------------------------------------------
# scalars


def to_fraction(x) -> Fraction:
    """Coerce ``x`` to an exact rational.

    Accepts ints, Fractions, ``"num/den"`` strings and numpy integers.  Floats
    are converted exactly (binary expansion), never rounded.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        if complex(x).imag != 0:
            raise ValueError(f"complex value {x!r} has no rational representative")
        return to_fraction(complex(x).real)
    raise TypeError(f"cannot interpret {type(x).__name__} as a rational")


def as_exact(M) -> np.ndarray:
    """Return an object array of Fractions with the shape of ``M``."""
    arr = np.asarray(M, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = to_fraction(v)
    return out


def is_exact(M) -> bool:
    return np.asarray(M).dtype == object


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _integer_rows(M) -> tuple[list[list[int]], list[int]]:
    """Clear denominators row by row; returns (rows, per-row multipliers)."""
    rows, scales = [], []
    for row in np.asarray(M, dtype=object):
        fr = [to_fraction(v) for v in row]
        L = _lcm(f.denominator for f in fr)
        rows.append([int(f.numerator * (L // f.denominator)) for f in fr])
        scales.append(L)
    return rows, scales


# ---------------------------------------------------------------------------
# fraction-free elimination


def _bareiss_echelon(rows: list[list[int]]) -> tuple[list[list[int]], list[int], int]:
    """In-place fraction-free forward elimination.

    Returns (rows, pivot columns, number of row swaps).  The first
    ``len(pivots)`` rows form an integer echelon matrix.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    prev = 1
    r = 0
    pivots: list[int] = []
    swaps = 0
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            swaps += 1
        pr = rows[r]
        pc = pr[c]
        for i in range(r + 1, m):
            row = rows[i]
            a = row[c]
            for j in range(c + 1, n):
                row[j] = (pc * row[j] - a * pr[j]) // prev
            row[c] = 0
        prev = pc
        pivots.append(c)
        r += 1
    return rows, pivots, swaps


def rank(M) -> int:
    """Exact rank over Q."""
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    rows, _ = _integer_rows(M)
    _, pivots, _ = _bareiss_echelon(rows)
    return len(pivots)


def det(M) -> Fraction:
    """Exact determinant of a square rational matrix (Bareiss)."""
    M = np.asarray(M, dtype=object)
    n, m = M.shape
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    rows, scales = _integer_rows(M)
    rows, pivots, swaps = _bareiss_echelon(rows)
    if len(pivots) < n:
        return Fraction(0)
    d = Fraction(rows[n - 1][n - 1], _prod(scales))
    return -d if swaps % 2 else d


def _prod(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out


def nullspace(M) -> list[np.ndarray]:
    """Exact basis of ker M over Q, one object vector per free column.

    The basis vector for free column ``f`` has a 1 in position ``f`` and zeros
    in the other free positions, so the basis is independent by construction.
    """
    M = np.asarray(M, dtype=object)
    m, n = M.shape
    if m == 0:
        return [_unit(n, f) for f in range(n)]
    rows, _ = _integer_rows(M)
    rows, pivots, _ = _bareiss_echelon(rows)
    r = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i in range(r - 1, -1, -1):
            c = pivots[i]
            row = rows[i]
            s = sum((row[j] * x[j] for j in range(c + 1, n) if row[j] and x[j]), Fraction(0))
            x[c] = -s / row[c]
        basis.append(np.array(x, dtype=object))
    return basis


def _unit(n: int, i: int) -> np.ndarray:
    v = np.array([Fraction(0)] * n, dtype=object)
    v[i] = Fraction(1)
    return v


def solve(M, b) -> np.ndarray | None:
    """One exact solution of M x = b, or None when inconsistent."""
    M = np.asarray(M, dtype=object)
    b = np.asarray(b, dtype=object).reshape(-1, 1)
    aug = np.hstack([M, -b])
    n = M.shape[1]
    for v in nullspace(aug):
        if v[n] != 0:
            return np.array([x / v[n] for x in v[:n]], dtype=object)
    return None


def inverse(M) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    n = M.shape[0]
    cols = []
    for i in range(n):
        x = solve(M, [Fraction(int(i == j)) for j in range(n)])
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    return np.array(cols, dtype=object).T


def matmul(A, B) -> np.ndarray:
    return np.dot(np.asarray(A, dtype=object), np.asarray(B, dtype=object))


def eye(n: int) -> np.ndarray:
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = Fraction(int(i == j))
    return out


def zeros(shape) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(Fraction(0))
    return out


# ---------------------------------------------------------------------------
# polynomials (coefficient lists, lowest degree first)


def _trim(p: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] / b[-1]
        q[shift] = c
        for i, bi in enumerate(b):
            a[i + shift] -= c * bi
        a = _trim(a)
    return _trim(q), a


def poly_gcd(a, b) -> list[Fraction]:
    """Monic gcd over Q."""
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def poly_derivative(p) -> list[Fraction]:
    return [i * Fraction(c) for i, c in enumerate(p)][1:]


def poly_mul(a, b) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def minimal_polynomial(M) -> list[Fraction]:
    """Monic minimal polynomial of a square rational matrix, lowest degree first.

    Found as the first linear dependency among I, M, M^2, ... (Krylov on the
    flattened powers), solved exactly.
    """
    M = as_exact(M)
    n = M.shape[0]
    powers = [eye(n).ravel()]
    P = eye(n)
    for deg in range(1, n + 1):
        P = matmul(P, M)
        powers.append(P.ravel())
        K = np.array(powers, dtype=object).T
        ker = nullspace(K)
        if ker:
            v = ker[0]
            # the newest power is never free-less at the first dependency
            lead = v[deg]
            return [c / lead for c in v]
    raise AssertionError("Cayley-Hamilton violated")  # pragma: no cover


def characteristic_polynomial(M) -> list[Fraction]:
    """Monic characteristic polynomial via Faddeev-LeVerrier, lowest degree first."""
    M = as_exact(M)
    n = M.shape[0]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = zeros((n, n))
    I = eye(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        Mk = matmul(M, Mk + c * I)
        c = -sum(Mk[i, i] for i in range(n)) / k
        coeffs[n - k] = c
    return coeffs


def is_semisimple(M) -> bool:
    """Diagonalizable over an algebraic closure: gcd(mu, mu') is constant."""
    mu = minimal_polynomial(M)
    return len(poly_gcd(mu, poly_derivative(mu))) == 1


def is_nilpotent(M) -> bool:
    M = as_exact(M)
    n = M.shape[0]
    P = eye(n)
    for _ in range(n):
        P = matmul(P, M)
    return all(v == 0 for v in P.ravel())


def rational_roots(p) -> list[Fraction]:
    """Rational roots of a rational polynomial with multiplicity (rational root test)."""
    p = _trim([Fraction(x) for x in p])
    roots: list[Fraction] = []
    while len(p) > 1 and p[0] == 0:
        roots.append(Fraction(0))
        p = p[1:]
    if len(p) <= 1:
        return roots
    L = _lcm(c.denominator for c in p)
    ip = [int(c * L) for c in p]
    g = 0
    for c in ip:
        g = math.gcd(g, c)
    ip = [c // g for c in ip]
    cands = set()
    for a in _divisors(abs(ip[0])):
        for b in _divisors(abs(ip[-1])):
            cands.add(Fraction(a, b))
            cands.add(Fraction(-a, b))
    work = [Fraction(c) for c in ip]
    for r in sorted(cands):
        while len(work) > 1:
            q, rem = poly_divmod(work, [-r, Fraction(1)])
            if rem:
                break
            roots.append(r)
            work = q
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            out.append(n // i)
        i += 1
    return out


# ---------------------------------------------------------------------------
# complex-float backend


def singular_values(M) -> np.ndarray:
    """Singular values in descending order."""
    M = np.asarray(M, dtype=np.complex128)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M, rtol: float = DEFAULT_RTOL) -> int:
    s = singular_values(M)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def nullspace_float(M, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, as columns."""
    M = np.asarray(M, dtype=np.complex128)
    _, s, vh = np.linalg.svd(M)
    r = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return vh[r:].conj().T


def to_complex(M) -> np.ndarray:
    arr = np.asarray(M)
    if arr.dtype == object:
        return np.vectorize(lambda v: complex(float(v)), otypes=[np.complex128])(arr) if arr.size else arr.astype(np.complex128)
    return arr.astype(np.complex128)


def check_rank_consistency(M, rtol: float = DEFAULT_RTOL) -> int:
    """Exact rank, cross-checked against the float numerical rank."""
    r = rank(M)
    rf = numerical_rank(to_complex(M), rtol)
    if r != rf:
        raise ConsistencyError(f"exact rank {r} disagrees with numerical rank {rf}")
    return r
