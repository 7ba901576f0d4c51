"""Deterministic test tensors with labelled expectations.

Each expectation carries a justification label:

* ``constructed-invariance``: holds by construction (an explicit stabilizer
  element, an explicit kernel vector of a fiber map, ...);
* ``proposition``: a structural theorem applies (e.g. every nondegenerate
  2 x k x (k+1) tensor is an identity);
* ``generic-expectation``: what a generic member of the family does; tests
  re-derive it rather than trust it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .sl2 import build_identity, embed_lie, make_vandermonde
from .stabilizer import ADDITIVE, SL2, TORUS, TRIVIAL, infinitesimal_action
from .tensor import BoundaryTensor, Format

KINDS = ("identity", "vandermonde", "diagonal", "nilpotent", "random", "degenerate_at_point", "zero_slice")
CONSTRUCTED = "constructed-invariance"
PROPOSITION = "proposition"
GENERIC = "generic-expectation"
ENTRY_RANGE = 9


class FixtureInfeasible(RuntimeError):
    """The requested construction found no admissible tensor within its budget."""

    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


@dataclass
class FixtureSpec:
    kind: str
    format: Format
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown fixture kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.format, Format):
            self.format = Format(tuple(self.format))


@dataclass
class Fixture:
    spec: FixtureSpec
    tensor: BoundaryTensor
    expected: dict

    def expect(self, key: str, default=None):
        e = self.expected.get(key)
        return default if e is None else e["value"]


def _e(value, why: str) -> dict:
    return {"value": value, "justification": why}


def _is_2kk1(fmt: Format) -> bool:
    return fmt.p == 2 and sorted(fmt.dims) == [2, fmt.dims[0] - 1, fmt.dims[0]] and 2 in fmt.dims[1:]


def _random_entries(rng: np.random.Generator, dims) -> np.ndarray:
    ints = rng.integers(-ENTRY_RANGE, ENTRY_RANGE + 1, size=dims)
    return linalg.as_exact(ints.astype(object))


def support_cells(fmt: Format) -> list[tuple[int, ...]]:
    """Cells with i0 = i1 + ... + ip in C order."""
    return [(sum(idx),) + idx for idx in itertools.product(*(range(d) for d in fmt.dims[1:]))]


def generate(spec: FixtureSpec) -> Fixture:
    fmt = spec.format
    rng = np.random.default_rng(spec.seed)
    kind = spec.kind
    exp: dict = {}
    if kind == "identity":
        A = build_identity(fmt)
        exp["nondegenerate"] = _e(True, CONSTRUCTED)
        exp["class"] = _e(SL2, CONSTRUCTED)
        exp["identity_flag"] = _e(True, CONSTRUCTED)
    elif kind == "vandermonde":
        nodes = spec.params.get("nodes", list(range(fmt.k0 + 1)))
        A = make_vandermonde(fmt, nodes)
        exp["nondegenerate"] = _e(True, CONSTRUCTED)
        exp["class"] = _e(SL2, CONSTRUCTED)
        exp["identity_flag"] = _e(True, CONSTRUCTED)
        exp["strong_covectors"] = _e([[int(i == s) for i in range(fmt.dims[0])] for s in range(fmt.dims[0])],
                                     CONSTRUCTED)
    elif kind == "diagonal":
        A = _diagonal(fmt, rng, spec)
        exp["class"] = _e(TORUS, GENERIC)
        exp["support"] = _e("diagonal", CONSTRUCTED)
    elif kind == "nilpotent":
        A, info = _nilpotent(fmt, rng, spec.params.get("budget", 20))
        exp["nondegenerate"] = _e(True, CONSTRUCTED)
        exp["class"] = _e(SL2, PROPOSITION) if _is_2kk1(fmt) else _e(ADDITIVE, GENERIC)
        exp["annihilator"] = _e("principal nilpotent of the sl(2) embedding", CONSTRUCTED)
        exp["construction"] = _e(info, CONSTRUCTED)
    elif kind == "random":
        A = BoundaryTensor(fmt, _random_entries(rng, fmt.dims))
        if _is_2kk1(fmt):
            exp["class_if_nondegenerate"] = _e(SL2, PROPOSITION)
        else:
            exp["class_if_nondegenerate"] = _e(TRIVIAL, GENERIC)
        exp["nondegenerate"] = _e(True, GENERIC)
    elif kind == "degenerate_at_point":
        A, point = _degenerate_at_point(fmt, rng, spec.params.get("point"))
        exp["nondegenerate"] = _e(False, CONSTRUCTED)
        exp["witness"] = _e({"j": 1, "x": {str(i): [str(c) for c in v] for i, v in point.items()}}, CONSTRUCTED)
        if fmt.p == 2:
            exp["hyperdet"] = _e("0/1", CONSTRUCTED)
    else:  # zero_slice
        E = _random_entries(rng, fmt.dims)
        E[0] = Fraction(0)
        A = BoundaryTensor(fmt, E)
        exp["nondegenerate"] = _e(False, CONSTRUCTED)
        if fmt.p == 2:
            exp["hyperdet"] = _e("0/1", CONSTRUCTED)
    return Fixture(spec, A, exp)


def _diagonal(fmt: Format, rng, spec: FixtureSpec) -> BoundaryTensor:
    cells = support_cells(fmt)
    entries = spec.params.get("entries")
    if entries is None:
        if spec.seed == 0:
            entries = list(range(1, len(cells) + 1))
        else:
            entries = [int(v) for v in rng.choice(np.arange(1, 9 * len(cells) + 1), size=len(cells), replace=False)]
    if len(entries) != len(cells):
        raise ValueError(f"diagonal fixture needs {len(cells)} entries")
    E = linalg.zeros(fmt.dims)
    for c, v in zip(cells, entries):
        E[c] = linalg.to_fraction(v)
    return BoundaryTensor(fmt, E)


def action_matrix(X, dims) -> np.ndarray:
    """Matrix of T -> sum_i X_i o_i T on the flattened tensor space."""
    N = int(np.prod(dims))
    cols = []
    for n in range(N):
        U = linalg.zeros(N)
        U[n] = Fraction(1)
        cols.append(infinitesimal_action(X, U.reshape(dims)).ravel())
    return np.array(cols, dtype=object).T


def _nilpotent(fmt: Format, rng, budget: int):
    """Random element of ker(e), e the principal nilpotent of the embedding, that is nondegenerate."""
    from .nondegeneracy import nondegenerate

    e = linalg.as_exact(np.array([[0, 1], [0, 0]], dtype=object))
    X = embed_lie(e, fmt)
    ker = linalg.nullspace(action_matrix(X, fmt.dims))
    if len(ker) < 2:
        raise FixtureInfeasible("kernel is spanned by the identity", {"kernel_dim": len(ker), "tries": 0})
    verdicts = []
    for attempt in range(budget):
        coeffs = rng.integers(-ENTRY_RANGE, ENTRY_RANGE + 1, size=len(ker))
        v = sum((int(c) * b for c, b in zip(coeffs, ker)), linalg.zeros(len(ker[0])))
        A = BoundaryTensor(fmt, v.reshape(fmt.dims))
        if A.is_zero():
            continue
        status = nondegenerate(A).status
        verdicts.append(status)
        if status in ("NondegenerateExact", "NondegenerateProbable"):
            return A, {"kernel_dim": len(ker), "tries": attempt + 1, "verdict": status}
    raise FixtureInfeasible("no nondegenerate kernel element within budget",
                            {"kernel_dim": len(ker), "tries": budget, "verdicts": verdicts})


def _degenerate_at_point(fmt: Format, rng, point=None):
    """Random tensor corrected so that fiber_map(A, x) = 0 for j = 1."""
    if point is None:
        point = {i: [1] + [0] * fmt.k[i] for i in range(2, fmt.p + 1)}
    x = {int(i): linalg.as_exact(np.array(v, dtype=object)) for i, v in point.items()}
    if sorted(x) != list(range(2, fmt.p + 1)):
        raise ValueError("degenerate point needs vectors for slots 2..p")
    E = _random_entries(rng, fmt.dims)
    # one free coordinate per (i0, i1): the cell where every x_i has its first nonzero entry
    piv = tuple(next(a for a, c in enumerate(x[i]) if c != 0) for i in range(2, fmt.p + 1))
    W = np.array(Fraction(1), dtype=object)
    for i in range(2, fmt.p + 1):
        W = np.multiply.outer(W, x[i])
    for i0 in range(fmt.dims[0]):
        for i1 in range(fmt.dims[1]):
            block = E[i0, i1]
            total = sum((a * w for a, w in zip(block.ravel(), W.ravel())), Fraction(0))
            block[piv] -= total / W[piv]
    return BoundaryTensor(fmt, E), x
