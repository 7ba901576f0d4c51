from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundarystab import linalg
from boundarystab.fixtures import FixtureSpec, generate
from boundarystab.jumping import (STRONG, ProjectiveSet, cluster, curve_sweep, detect_strong, detect_weak,
                                  elementary_transform, is_jumping_exact, normalize, projective_distance,
                                  slice_residual, strong_direction_locus, strong_factors, weak_kind,
                                  weak_locus_inclusion_check)
from boundarystab.nondegeneracy import hyperdet_p2
from boundarystab.oracles import conic_section_points, locus_is_empty
from boundarystab.sl2 import build_identity
from boundarystab.stabilizer import SL2, PreconditionError, classify
from boundarystab.tensor import BoundaryTensor, contract0, Format, act, random_group_element

F = Fraction


def xi_t(k0, t):
    return np.array([F(t) ** i for i in range(k0 + 1)], dtype=object)


def fix(kind, k, seed=0):
    return generate(FixtureSpec(kind, Format(k), seed=seed)).tensor


# --- projective helpers ------------------------------------------------------

def test_normalize_and_distance():
    v = np.array([0, 2, 4], dtype=np.complex128)
    assert np.allclose(normalize(v), [0, 1, 2])
    assert projective_distance(v, 3j * v) < 1e-15
    assert abs(projective_distance([1, 0], [0, 1]) - 1) < 1e-15


def test_projective_set_and_cluster():
    vs = [np.array([1, 1e-9]), np.array([2, 0]), np.array([0, 1]), np.array([1, 1])]
    assert cluster(vs) == [0, 2, 3]
    s = ProjectiveSet()
    for v in vs:
        if v not in s:
            s.add(v)
    assert len(s) == 3


@settings(max_examples=30)
@given(st.lists(st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=3, max_size=3),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_distance_scale_invariant(v, c):
    v = np.array(v)
    assert projective_distance(v, c * v) < 1e-12


# --- exact slice checks ------------------------------------------------------

@pytest.mark.parametrize("t", [0, 1, 2, 3, 5])
def test_identity_closed_form_211(t):
    I = build_identity(Format((2, 1, 1)))
    xi = xi_t(2, t)
    assert is_jumping_exact(I, xi)
    assert slice_residual(I, xi) == 0
    u, w = strong_factors(contract0(I, xi))
    assert projective_distance(np.array(u, dtype=complex), [1, t]) < 1e-12


def test_nonjumping_covector():
    I = build_identity(Format((2, 1, 1)))
    xi = np.array([F(1), F(0), F(1)], dtype=object)
    assert not is_jumping_exact(I, xi)
    assert slice_residual(I, xi) > 0.1


def test_weak_vs_strong_exact_p3():
    I = build_identity(Format((3, 1, 1, 1)))
    # xi = e1^*: slice is e0 x e0 x e1 + e0 x e1 x e0 + e1 x e0 x e0, not decomposable
    xi = np.array([F(0), F(1), F(0), F(0)], dtype=object)
    assert not is_jumping_exact(I, xi)
    assert not any(is_jumping_exact(I, xi, j) for j in (1, 2, 3))
    assert is_jumping_exact(I, xi_t(3, 2))


# --- detection -----------------------------------------------------------------

def test_identity_threshold_312():
    rep = detect_strong(build_identity(Format((3, 1, 2))))
    exact = [it for it in rep.items if it.exact]
    assert rep.identity_flag and len(exact) >= 6
    assert all(it.residual == 0 for it in exact)
    # every exact point lies on the rational normal curve (1, t, t^2, t^3) or is (0,0,0,1)
    for it in exact:
        v = normalize(np.array(it.xi, dtype=complex))
        t = v[1] if abs(v[0]) > 0 else None
        if t is None:
            assert projective_distance(v, [0, 0, 0, 1]) < 1e-12
        else:
            assert projective_distance(v, [1, t, t * t, t ** 3]) < 1e-12


def test_curve_sweep_identity():
    ev = curve_sweep(build_identity(Format((2, 1, 1))), 5)
    assert ev is not None and len(ev["xi"]) == 5


@pytest.mark.parametrize("k", [(2, 1, 1), (3, 1, 2), (3, 1, 1, 1)])
def test_vandermonde_covectors(k):
    A = fix("vandermonde", k)
    rep = detect_strong(A)
    k0 = A.format.k0
    for s in range(k0 + 1):
        e = np.array([F(int(i == s)) for i in range(k0 + 1)], dtype=object)
        assert slice_residual(A, e) == 0
        assert any(projective_distance(np.array(it.xi, dtype=complex), e.astype(float)) < 1e-6
                   for it in rep.items)


def test_random_422_not_identity():
    A = fix("random", (4, 2, 2))
    rep = detect_strong(A)
    assert not rep.identity_flag
    assert classify(A).cls != SL2
    assert all(it.residual < 1e-8 for it in rep.items)


def test_random_3111_strong_empty_matches_oracle():
    A = fix("random", (3, 1, 1, 1))
    assert detect_strong(A, restarts=64).items == []
    assert locus_is_empty(A)


def test_weak_contains_strong():
    A = fix("vandermonde", (3, 1, 1, 1))
    strong = detect_strong(A)
    for j in (1, 2, 3):
        weak = detect_weak(A, j, strong=strong, restarts=32)
        assert all(it.kind == weak_kind(j) for it in weak.items)
        for s in strong.items:
            assert any(projective_distance(s.xi, w.xi) < 1e-6 for w in weak.items)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_weak_equals_strong_for_p2(seed):
    A = fix("random", (2, 1, 1), seed)
    strong = detect_strong(A, restarts=64)
    weak = detect_weak(A, 1, strong=strong, restarts=64)
    assert len(cluster([w.xi for w in weak.items])) == len(cluster([s.xi for s in strong.items]))


def test_section_matches_conic():
    A = fix("random", (2, 1, 1), 3)
    L = np.array([[1, 2, -1]])
    rep = detect_strong(A, section=L, restarts=64)
    pts = conic_section_points(A, L)
    assert len(rep.items) == len(pts)
    for p in pts:
        assert min(projective_distance(p, it.xi) for it in rep.items) < 1e-6


def test_equivariance():
    I = build_identity(Format((2, 1, 1)))
    g = random_group_element(np.random.default_rng(3), I.dims)
    B = act(g, I)
    ginv_t = linalg.inverse(g.matrices[0]).T
    for t in range(4):
        assert is_jumping_exact(B, linalg.matmul(ginv_t, xi_t(2, t).reshape(-1, 1)).ravel())


def test_direction_locus_torus():
    A = fix("diagonal", (4, 2, 2))
    rep = detect_strong(A)
    for j in (1, 2):
        loc = strong_direction_locus(A, j, report=rep)
        assert len(loc.directions) == 2 and not loc.infinite


def test_detect_rejects_bad_slot():
    with pytest.raises(ValueError):
        detect_weak(build_identity(Format((2, 1, 1))), 3)


# --- elementary transformation ----------------------------------------------------

def test_transform_identity_slot2():
    T = elementary_transform(build_identity(Format((3, 1, 2))), xi_t(3, 1), 2)
    assert T.tensor.format.k == (2, 1, 1)
    assert hyperdet_p2(T.tensor) != 0
    assert classify(T.tensor).cls == SL2


def test_transform_identity_slot1_reduced():
    T = elementary_transform(build_identity(Format((3, 1, 2))), xi_t(3, 1), 1)
    assert T.tensor.format.k == (2, 0, 2)
    assert T.tensor.dims == (3, 1, 3)


def test_transform_quotient_data():
    A = build_identity(Format((3, 1, 2)))
    xi = xi_t(3, 2)
    T = elementary_transform(A, xi, 2)
    assert sum(a * b for a, b in zip(xi, T.v0)) == 1
    assert all(c == 0 for c in linalg.matmul(T.W0, T.v0.reshape(-1, 1)).ravel())
    assert all(c == 0 for c in linalg.matmul(T.Cj, T.vj.reshape(-1, 1)).ravel())


def test_transform_rejects_non_jumping():
    with pytest.raises(PreconditionError):
        elementary_transform(build_identity(Format((2, 1, 1))), np.array([F(1), F(0), F(1)], dtype=object), 1)


def test_transform_float_matches_exact():
    A = build_identity(Format((3, 1, 2)))
    xi = xi_t(3, 2)
    Te = elementary_transform(A, xi, 2)
    Tf = elementary_transform(A, np.array(xi, dtype=float) * (1 + 1j), 2)
    assert hyperdet_p2(Te.tensor) != 0
    assert Tf.tensor.format == Te.tensor.format


@pytest.mark.parametrize("k", [(2, 1, 1), (3, 1, 2)])
def test_inclusion_check_vandermonde(k):
    A = fix("vandermonde", k)
    e = np.array([F(int(i == 0)) for i in range(A.format.k0 + 1)], dtype=object)
    out = weak_locus_inclusion_check(A, e, A.format.p)
    assert out["holds"], out


@pytest.mark.parametrize("seed", [0, 1])
def test_multiple_root_found_exactly(seed):
    # the unipotent-fixed covector e4^* is a high-multiplicity strong root
    A = fix("nilpotent", (4, 2, 2), seed)
    rep = detect_strong(A, seed=seed)
    assert not rep.identity_flag
    e4 = np.array([F(int(i == 4)) for i in range(5)], dtype=object)
    assert is_jumping_exact(A, e4)
    assert any(it.exact and projective_distance(it.xi, e4) < 1e-12 for it in rep.items)
    assert rep.count_separated == len(rep.items)
