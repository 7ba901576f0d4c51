"""Boundary-format tensors, slot-wise group action and the JSON tensor format.

Index convention: slot 0 is the outermost axis and the last slot varies
fastest (numpy C order).  Exact tensors hold ``Fraction`` entries in an object
array; float tensors are ``complex128``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg


class FormatError(ValueError):
    """Malformed or non-boundary format."""


@dataclass(frozen=True)
class Format:
    """Dimension vector (k0; k1, ..., kp) with k0 = k1 + ... + kp.

    ``reduced`` permits factors with k_i = 0, which elementary transformations
    can produce; analysis code refuses such formats.
    """

    k: tuple[int, ...]
    reduced: bool = False

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        object.__setattr__(self, "k", k)
        if len(k) < 3:
            raise FormatError(f"need p >= 2 factors besides slot 0, got k={k}")
        if any(x < 0 for x in k):
            raise FormatError(f"negative k in {k}")
        if k[0] != sum(k[1:]):
            raise FormatError(f"not of boundary format: k0={k[0]} != {sum(k[1:])}")
        if not self.reduced and any(x == 0 for x in k):
            raise FormatError(f"factor of dimension 1 in {k} (pass reduced=True to allow)")

    @classmethod
    def from_dims(cls, dims: Sequence[int], reduced: bool = False) -> "Format":
        return cls(tuple(int(d) - 1 for d in dims), reduced=reduced)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(x + 1 for x in self.k)

    @property
    def p(self) -> int:
        return len(self.k) - 1

    @property
    def k0(self) -> int:
        return self.k[0]

    @property
    def has_trivial_factor(self) -> bool:
        return any(x == 0 for x in self.k)

    def __str__(self):
        return f"({self.k[0]};{','.join(map(str, self.k[1:]))})"


def parse_format(text: str, reduced: bool = False) -> Format:
    """Parse ``"3,1,2"`` or ``"(3;1,2)"``."""
    cleaned = text.strip().strip("()").replace(";", ",")
    return Format(tuple(int(x) for x in cleaned.split(",") if x.strip()), reduced=reduced)


@dataclass(frozen=True, eq=False)
class BoundaryTensor:
    format: Format
    entries: np.ndarray

    def __post_init__(self):
        arr = self.entries
        if arr.dtype != object:
            arr = np.asarray(arr, dtype=np.complex128)
            if not np.all(np.isfinite(arr)):
                raise ValueError("non-finite complex entry")
        if tuple(arr.shape) != self.format.dims:
            raise FormatError(f"entries shape {arr.shape} does not match dims {self.format.dims}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_array(cls, arr, reduced: bool = False, exact: bool | None = None) -> "BoundaryTensor":
        """Build from any nested sequence; ``exact`` forces the backend."""
        a = np.asarray(arr)
        if exact is None:
            exact = a.dtype == object or np.issubdtype(a.dtype, np.integer)
        a = linalg.as_exact(a) if exact else np.asarray(a, dtype=np.complex128)
        return cls(Format.from_dims(a.shape, reduced=reduced), a)

    @property
    def exact(self) -> bool:
        return self.entries.dtype == object

    @property
    def field(self) -> str:
        return "rational" if self.exact else "complex"

    @property
    def dims(self) -> tuple[int, ...]:
        return self.format.dims

    def is_zero(self) -> bool:
        if self.exact:
            return all(v == 0 for v in self.entries.flat)
        return not np.any(self.entries)

    def to_complex(self) -> np.ndarray:
        return linalg.to_complex(self.entries)

    def to_exact(self) -> "BoundaryTensor":
        return self if self.exact else BoundaryTensor(self.format, linalg.as_exact(self.entries))

    def equals(self, other: "BoundaryTensor") -> bool:
        """Exact comparison (both rational) or bitwise complex comparison."""
        if self.dims != other.dims:
            return False
        if self.exact and other.exact:
            return all(a == b for a, b in zip(self.entries.flat, other.entries.flat))
        return bool(np.array_equal(self.to_complex(), other.to_complex()))

    def allclose(self, other: "BoundaryTensor", rtol: float = 1e-8) -> bool:
        a, b = self.to_complex(), other.to_complex()
        scale = max(np.abs(b).max(initial=0.0), 1e-300)
        return a.shape == b.shape and np.abs(a - b).max(initial=0.0) <= rtol * scale

    def scaled(self, c) -> "BoundaryTensor":
        return BoundaryTensor(self.format, self.entries * c)

    def integer_scaled(self) -> "BoundaryTensor":
        """Positive rational multiple with coprime integer entries (exact only)."""
        rows, _ = linalg._integer_rows(self.entries.reshape(1, -1))
        ints = rows[0]
        g = 0
        for v in ints:
            g = np.gcd(g, abs(v))
        g = int(g) or 1
        arr = np.array([Fraction(v // g) for v in ints], dtype=object).reshape(self.dims)
        return BoundaryTensor(self.format, arr)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Tuple of invertible matrices acting slot by slot."""

    matrices: tuple[np.ndarray, ...]
    special: bool = False

    def __post_init__(self):
        mats = []
        for g in self.matrices:
            g = np.asarray(g)
            g = linalg.as_exact(g) if g.dtype == object else g.astype(np.complex128)
            if g.ndim != 2 or g.shape[0] != g.shape[1]:
                raise ValueError("group components must be square")
            mats.append(g)
        object.__setattr__(self, "matrices", tuple(mats))
        for g in mats:
            if g.dtype == object:
                d = linalg.det(g)
                if d == 0:
                    raise ValueError("singular group component")
                if self.special and d != 1:
                    raise ValueError(f"special flag set but det = {d}")
            else:
                s = linalg.singular_values(g)
                if s[-1] <= 1e-13 * s[0]:
                    raise ValueError("singular group component")
                if self.special and abs(np.linalg.det(g) - 1) > 1e-9:
                    raise ValueError("special flag set but det != 1")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(g.shape[0] for g in self.matrices)

    @property
    def exact(self) -> bool:
        return all(g.dtype == object for g in self.matrices)

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "GroupElement":
        return cls(tuple(linalg.eye(d) for d in dims), special=True)

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self * other (apply ``other`` first)."""
        return GroupElement(tuple(_matmul(a, b) for a, b in zip(self.matrices, other.matrices)),
                            special=self.special and other.special)

    def inverse(self) -> "GroupElement":
        mats = tuple(linalg.inverse(g) if g.dtype == object else np.linalg.inv(g) for g in self.matrices)
        return GroupElement(mats, special=self.special)


def _matmul(a, b):
    if a.dtype == object and b.dtype == object:
        return linalg.matmul(a, b)
    return linalg.to_complex(a) @ linalg.to_complex(b)


def _common(A: np.ndarray, M: np.ndarray):
    if A.dtype == object and M.dtype == object:
        return A, M
    return linalg.to_complex(A), linalg.to_complex(M)


def mode_product(A: np.ndarray, M, axis: int) -> np.ndarray:
    """Apply matrix ``M`` (possibly rectangular) to axis ``axis`` of ``A``."""
    M = np.asarray(M)
    A, M = _common(np.asarray(A), M)
    out = np.tensordot(M, A, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


def act(g: GroupElement, A: BoundaryTensor) -> BoundaryTensor:
    """(g.A)_{i0..ip} = sum_j (g0)_{i0 j0} ... (gp)_{ip jp} a_{j0..jp}."""
    if g.dims != A.dims:
        raise FormatError(f"group dims {g.dims} do not match tensor dims {A.dims}")
    out = A.entries
    for axis, m in enumerate(g.matrices):
        out = mode_product(out, m, axis)
    return BoundaryTensor(A.format, out)


def contract0(A: BoundaryTensor, xi) -> np.ndarray:
    """Slice of A against a covector on V0: sum_i0 xi_i0 a_{i0 i1..ip}."""
    xi = np.asarray(xi)
    if xi.shape != (A.dims[0],):
        raise FormatError(f"covector of size {xi.shape} for d0={A.dims[0]}")
    E, x = _common(A.entries, xi.reshape(1, -1))
    return np.tensordot(x[0], E, axes=([0], [0]))


def flatten(T: np.ndarray, j: int) -> np.ndarray:
    """Matrix of shape d_j x prod_{i != j} d_i for a p-factor tensor.

    ``j`` counts slots from 1 (slot j is axis j-1 of T); columns run row-major
    over the remaining slots in ascending order.
    """
    T = np.asarray(T)
    if not 1 <= j <= T.ndim:
        raise ValueError(f"slot {j} out of range 1..{T.ndim}")
    return np.moveaxis(T, j - 1, 0).reshape(T.shape[j - 1], -1)


def is_decomposable_exact(T: np.ndarray) -> bool:
    """All 2x2 minors of all flattenings vanish (exact entries)."""
    T = np.asarray(T, dtype=object)
    for j in range(1, T.ndim + 1):
        F = flatten(T, j)
        if linalg.rank(F) > 1:
            return False
    return True


def residual_rank_one(T) -> float:
    """max over slots of sigma_2/sigma_1 of the flattening; 0 iff decomposable."""
    T = np.asarray(T)
    if T.dtype == object:
        if all(v == 0 for v in T.flat):
            raise ValueError("residual of the zero tensor")
        if is_decomposable_exact(T):
            return 0.0
        T = linalg.to_complex(T)
    if not np.any(T):
        raise ValueError("residual of the zero tensor")
    worst = 0.0
    for j in range(1, T.ndim + 1):
        s = linalg.singular_values(flatten(T, j))
        if s.size > 1:
            worst = max(worst, float(s[1] / s[0]))
    return worst


def random_unimodular(rng: np.random.Generator, d: int, n_shears: int | None = None,
                      max_entry: int = 3) -> np.ndarray:
    """Exact d x d matrix of determinant 1: a product of elementary shears."""
    g = linalg.eye(d)
    if d == 1:
        return g
    n_shears = 3 * d if n_shears is None else n_shears
    for _ in range(n_shears):
        i, j = rng.choice(d, size=2, replace=False)
        c = Fraction(int(rng.integers(1, max_entry + 1)) * int(rng.choice([-1, 1])),
                     int(rng.integers(1, 3)))
        g[i, :] = g[i, :] + c * g[j, :]
    return g


def random_group_element(rng: np.random.Generator, dims: Sequence[int], **kw) -> GroupElement:
    return GroupElement(tuple(random_unimodular(rng, d, **kw) for d in dims), special=True)


# ---------------------------------------------------------------------------
# JSON


def format_scalar(v) -> str | list[float]:
    if isinstance(v, (Fraction, int)):
        f = Fraction(v)
        return f"{f.numerator}/{f.denominator}"
    c = complex(v)
    return [c.real, c.imag]


def parse_scalar(v, field: str):
    if field == "rational":
        if isinstance(v, bool):
            raise ValueError("boolean is not a rational entry")
        if isinstance(v, float):
            raise ValueError(f"rational entry must be a 'num/den' string or integer, got {v!r}")
        return linalg.to_fraction(v)
    if field == "complex":
        if isinstance(v, (list, tuple)) and len(v) == 2:
            return complex(float(v[0]), float(v[1]))
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        raise ValueError(f"complex entry must be [re, im], got {v!r}")
    raise ValueError(f"unknown field {field!r}")


def _parse_entries(values, shape, field):
    n = int(np.prod(shape)) if len(shape) else 1
    if not isinstance(values, list) or len(values) != n:
        raise ValueError(f"expected {n} entries, got {len(values) if isinstance(values, list) else type(values).__name__}")
    parsed = [parse_scalar(v, field) for v in values]
    if field == "rational":
        return np.array(parsed, dtype=object).reshape(shape)
    return np.array(parsed, dtype=np.complex128).reshape(shape)


def tensor_to_json(A: BoundaryTensor) -> dict:
    out = {
        "dims": list(A.dims),
        "field": A.field,
        "entries": [format_scalar(v) for v in A.entries.flat],
    }
    if A.format.has_trivial_factor:
        out["reduced"] = True
    return out


def tensor_from_json(obj: dict, reduced: bool = False) -> BoundaryTensor:
    try:
        dims = [int(d) for d in obj["dims"]]
        field_ = obj.get("field", "rational")
        arr = _parse_entries(obj["entries"], dims, field_)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tensor JSON: {exc}") from exc
    reduced = reduced or bool(obj.get("reduced", False))
    return BoundaryTensor(Format.from_dims(dims, reduced=reduced), arr)


def group_to_json(g: GroupElement) -> dict:
    field_ = "rational" if g.exact else "complex"
    return {
        "dims": list(g.dims),
        "field": field_,
        "matrices": [[format_scalar(v) for v in m.flat] for m in g.matrices],
    }


def group_from_json(obj: dict) -> GroupElement:
    try:
        dims = [int(d) for d in obj["dims"]]
        field_ = obj.get("field", "rational")
        blocks = obj["matrices"]
        if len(blocks) != len(dims):
            raise ValueError("one matrix per slot required")
        mats = tuple(_parse_entries(b, (d, d), field_) for b, d in zip(blocks, dims))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed group JSON: {exc}") from exc
    return GroupElement(mats, special=bool(obj.get("special", False)))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)
