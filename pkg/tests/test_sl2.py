import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from boundarystab import linalg
from boundarystab.sl2 import (CanonicalizationError, build_identity, canonicalize_identity, embed,
                              embed_lie, make_vandermonde, random_sl2, sym_power_lie,
                              sym_power_rep, vandermonde_slot0)
from boundarystab.stabilizer import infinitesimal_action
from boundarystab.tensor import (BoundaryTensor, Format, FormatError, GroupElement, act,
                                 contract0, random_group_element, residual_rank_one)
from conftest import IDENTITY_FORMATS


def M(rows):
    return linalg.as_exact(np.array(rows, dtype=object))


def rho_oracle(g, k):
    """Coefficients of (a u0 + c u1)^(k-m) (b u0 + d u1)^m in u0^(k-i) u1^i via sympy."""
    u0, u1 = sympy.symbols("u0 u1")
    (a, b), (c, d) = [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in g]
    out = np.empty((k + 1, k + 1), dtype=object)
    for m in range(k + 1):
        poly = sympy.Poly(sympy.expand((a * u0 + c * u1) ** (k - m) * (b * u0 + d * u1) ** m), u0, u1)
        for i in range(k + 1):
            co = poly.coeff_monomial(u0 ** (k - i) * u1 ** i)
            out[i, m] = Fraction(int(co.p), int(co.q))
    return out


sl2_seeds = st.integers(0, 10 ** 6)


def test_rho1_is_g():
    g = M([[2, 3], [1, 2]])
    assert np.array_equal(sym_power_rep(g, 1), g)


def test_rho2_shear():
    assert sym_power_rep(M([[1, 1], [0, 1]]), 2).tolist() == [[1, 1, 1], [0, 1, 2], [0, 0, 1]]


def test_rho2_diagonal():
    t = Fraction(3)
    assert sym_power_rep(M([[t, 0], [0, 1 / t]]), 2).tolist() == [[9, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 9)]]


@given(sl2_seeds, st.integers(1, 5))
def test_rho_matches_expansion_oracle(seed, k):
    g = random_unimodular_like(seed)
    assert np.array_equal(sym_power_rep(g, k), rho_oracle(g, k))


def random_unimodular_like(seed):
    rng = np.random.default_rng(seed)
    g = linalg.as_exact(rng.integers(-4, 5, (2, 2)).astype(object))
    if linalg.det(g) == 0:
        g = g + linalg.eye(2) * 7
    return g


@given(sl2_seeds, sl2_seeds, st.integers(1, 4))
def test_rho_multiplicative_and_det(s1, s2, k):
    g, h = random_unimodular_like(s1), random_unimodular_like(s2)
    assert np.array_equal(linalg.matmul(sym_power_rep(g, k), sym_power_rep(h, k)),
                          sym_power_rep(linalg.matmul(g, h), k))
    assert linalg.det(sym_power_rep(g, k)) == linalg.det(g) ** (k * (k + 1) // 2)


@given(st.integers(1, 4))
def test_lie_is_derivative(k):
    # rho_k(1 + eps x) = 1 + eps d rho(x) + O(eps^2); exact check of the eps coefficient
    x = M([[1, 2], [-3, -1]])
    eps = Fraction(1, 10 ** 6)
    g = linalg.eye(2) + eps * x
    diff = (sym_power_rep(g, k) - linalg.eye(k + 1)) / eps - sym_power_lie(x, k)
    assert max(abs(v) for v in diff.flat) < Fraction(1, 10 ** 4)


def test_identity_support_examples():
    I = build_identity(Format((2, 1, 1)))
    ones = {idx for idx in itertools.product(range(3), range(2), range(2)) if I.entries[idx] == 1}
    assert ones == {(0, 0, 0), (1, 0, 1), (1, 1, 0), (2, 1, 1)}
    I = build_identity(Format((3, 1, 2)))
    ones = {idx for idx in itertools.product(range(4), range(2), range(3)) if I.entries[idx] == 1}
    assert ones == {(0, 0, 0), (1, 0, 1), (1, 1, 0), (2, 0, 2), (2, 1, 1), (3, 1, 2)}
    with pytest.raises(FormatError):
        build_identity(Format((2, 2)))


@pytest.mark.parametrize("k", IDENTITY_FORMATS)
def test_identity_support_rule(k):
    I = build_identity(Format(k))
    for idx in itertools.product(*(range(d) for d in I.dims)):
        assert I.entries[idx] == (1 if idx[0] == sum(idx[1:]) else 0)


def test_embed_examples():
    fmt = Format((2, 1, 1))
    I = build_identity(fmt)
    assert all(np.array_equal(m, linalg.eye(d)) for m, d in zip(embed(linalg.eye(2), fmt).matrices, fmt.dims))
    assert act(embed(M([[1, 1], [0, 1]]), fmt), I).equals(I)
    t = Fraction(5, 3)
    assert act(embed(M([[t, 0], [0, 1 / t]]), fmt), I).equals(I)
    with pytest.raises(ValueError):
        embed(M([[2, 0], [0, 1]]), fmt)


@pytest.mark.parametrize("k", IDENTITY_FORMATS)
@given(seed=sl2_seeds)
def test_embed_fixes_identity(k, seed):
    fmt = Format(k)
    g = random_sl2(np.random.default_rng(seed))
    assert act(embed(g, fmt), build_identity(fmt)).equals(build_identity(fmt))


@given(sl2_seeds, sl2_seeds)
def test_embed_is_homomorphism(s1, s2):
    fmt = Format((4, 1, 1, 2))
    g, h = random_sl2(np.random.default_rng(s1)), random_sl2(np.random.default_rng(s2))
    lhs = embed(g, fmt).compose(embed(h, fmt))
    rhs = embed(linalg.matmul(g, h), fmt)
    assert all(np.array_equal(a, b) for a, b in zip(lhs.matrices, rhs.matrices))
    assert all(linalg.det(m) == 1 for m in rhs.matrices)


@pytest.mark.parametrize("k", IDENTITY_FORMATS)
def test_embed_lie_annihilates_identity(k):
    fmt = Format(k)
    I = build_identity(fmt)
    for x in ([[0, 1], [0, 0]], [[0, 0], [1, 0]], [[1, 0], [0, -1]]):
        X = embed_lie(M(x), fmt)
        assert all(v == 0 for v in infinitesimal_action(X, I.entries).flat)


def test_vandermonde_examples():
    V = make_vandermonde(Format((2, 1, 1)), [0, 1, 2])
    assert V.entries[2].tolist() == [[1, 2], [2, 4]]
    for s in range(3):
        xi = np.array([Fraction(int(i == s)) for i in range(3)], dtype=object)
        assert residual_rank_one(contract0(V, xi)) == 0.0
    with pytest.raises(ValueError):
        make_vandermonde(Format((2, 1, 1)), [0, 1, 1])


@pytest.mark.parametrize("k", [(2, 1, 1), (3, 1, 2), (3, 1, 1, 1), (4, 2, 2)])
def test_vandermonde_is_slot0_transform_of_identity(k):
    fmt = Format(k)
    nodes = [Fraction(s * s - 2, s + 1) for s in range(fmt.k0 + 1)]
    W = vandermonde_slot0(fmt, nodes)
    g = GroupElement((W,) + tuple(linalg.eye(d) for d in fmt.dims[1:]))
    assert act(g, build_identity(fmt)).equals(make_vandermonde(fmt, nodes))


@pytest.mark.parametrize("k", [(2, 1, 1), (3, 1, 2), (4, 2, 2), (3, 1, 1, 1)])
def test_canonicalize_random_orbit_point(k):
    fmt = Format(k)
    rng = np.random.default_rng(sum(k))
    A = act(random_group_element(rng, fmt.dims), build_identity(fmt))
    res = canonicalize_identity(A)
    assert act(res.g, A).equals(build_identity(fmt))


def test_canonicalize_identity_and_vandermonde():
    fmt = Format((2, 1, 1))
    I = build_identity(fmt)
    assert act(canonicalize_identity(I).g, I).equals(I)
    V = make_vandermonde(fmt, [0, 1, 2])
    assert act(canonicalize_identity(V).g, V).equals(I)


def test_vandermonde_route_alone():
    fmt = Format((3, 1, 2))
    V = make_vandermonde(fmt, [0, 1, 2, 3])
    from boundarystab.sl2 import _vandermonde_route
    g, exact = _vandermonde_route(V)
    B = act(g, V)
    assert B.allclose(build_identity(fmt), 1e-8)


def test_canonicalize_rejects_non_identity():
    fmt = Format((4, 2, 2))
    rng = np.random.default_rng(0)
    A = BoundaryTensor(fmt, linalg.as_exact(rng.integers(-9, 10, fmt.dims).astype(object)))
    with pytest.raises(CanonicalizationError):
        canonicalize_identity(A)
