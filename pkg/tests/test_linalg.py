from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, strategies as st

from boundarystab import linalg
from conftest import frac_vec, matrices, rational_matrix


def M(rows):
    return linalg.as_exact(np.array(rows, dtype=object))


def test_nullspace_full_rank_is_empty():
    assert linalg.nullspace(linalg.eye(2)) == []


def test_nullspace_single_row():
    (v,) = linalg.nullspace(M([[1, 1]]))
    assert linalg.rank(np.array([v, frac_vec(1, -1)])) == 1


def test_nullspace_proportional_rows():
    (v,) = linalg.nullspace(M([[1, 2], [2, 4]]))
    assert linalg.rank(np.array([v, frac_vec(2, -1)])) == 1


def test_minimal_polynomial_examples():
    assert linalg.minimal_polynomial(linalg.zeros((3, 3))) == [0, 1]
    # (x-1)(x-2) = 2 - 3x + x^2
    assert linalg.minimal_polynomial(M([[1, 0, 0], [0, 1, 0], [0, 0, 2]])) == [2, -3, 1]
    assert linalg.minimal_polynomial(M([[0, 1], [0, 0]])) == [0, 0, 1]


@pytest.mark.parametrize("rows, ss, nil", [
    ([[1, 0], [0, -1]], True, False),
    ([[0, 1], [0, 0]], False, True),
    ([[1, 1], [0, 1]], False, False),
])
def test_jordan_type(rows, ss, nil):
    assert linalg.is_semisimple(M(rows)) is ss
    assert linalg.is_nilpotent(M(rows)) is nil


def test_singular_values_examples():
    assert np.allclose(linalg.singular_values([[1, 0], [0, 0]]), [1, 0])
    # eigenvalues of M^T M for [[1,2],[2,4]] are 25 and 0
    x = sympy.Matrix([[1, 2], [2, 4]])
    expected = sorted((float(sympy.sqrt(e)) for e in (x.T * x).eigenvals()), reverse=True)
    assert np.allclose(linalg.singular_values([[1, 2], [2, 4]]), expected, atol=1e-12)
    assert np.allclose(linalg.singular_values(np.eye(3)), [1, 1, 1])


def _sym(A):
    return sympy.Matrix(A.shape[0], A.shape[1], lambda i, j: sympy.Rational(A[i, j].numerator, A[i, j].denominator))


@given(matrices())
def test_rank_nullity(A):
    ker = linalg.nullspace(A)
    assert len(ker) + linalg.rank(A) == A.shape[1]
    for v in ker:
        assert all(c == 0 for c in linalg.matmul(A, v))
    if ker:
        assert linalg.rank(np.array(ker)) == len(ker)


@given(matrices())
def test_rank_matches_sympy(A):
    assert linalg.rank(A) == _sym(A).rank()


@given(st.integers(1, 5).flatmap(lambda n: rational_matrix(n, n)))
def test_det_matches_sympy(A):
    assert linalg.det(A) == Fraction(str(_sym(A).det()))


@given(st.integers(1, 4).flatmap(lambda n: rational_matrix(n, n)))
def test_minimal_polynomial_annihilates_and_divides_charpoly(A):
    mu = linalg.minimal_polynomial(A)
    assert mu[-1] == 1
    n = A.shape[0]
    acc = linalg.zeros((n, n))
    P = linalg.eye(n)
    for c in mu:
        acc = acc + c * P
        P = linalg.matmul(P, A)
    assert all(v == 0 for v in acc.flat)
    _, rem = linalg.poly_divmod(linalg.characteristic_polynomial(A), mu)
    assert all(c == 0 for c in rem)


@given(st.integers(1, 4).flatmap(lambda n: rational_matrix(n, n)))
def test_charpoly_matches_sympy(A):
    x = sympy.Symbol("x")
    expected = sympy.Poly(_sym(A).charpoly(x).as_expr(), x).all_coeffs()[::-1]
    assert linalg.characteristic_polynomial(A) == [Fraction(str(c)) for c in expected]


@given(st.integers(1, 4).flatmap(lambda n: rational_matrix(n, n)))
def test_nilpotent_has_small_eigenvalues(A):
    if linalg.is_nilpotent(A):
        assert np.abs(np.linalg.eigvals(linalg.to_complex(A))).max() < 1e-4


@given(matrices())
def test_exact_rank_equals_numerical_rank(A):
    assert linalg.check_rank_consistency(A) == linalg.rank(A)


def test_inverse_and_solve():
    A = M([[2, 1], [1, 1]])
    assert np.array_equal(linalg.matmul(A, linalg.inverse(A)), linalg.eye(2))
    assert linalg.solve(M([[1, 1], [2, 2]]), frac_vec(1, 3)) is None
    with pytest.raises(ZeroDivisionError):
        linalg.inverse(M([[1, 2], [2, 4]]))


def test_rational_roots():
    # (x - 1/2)(x + 3) = x^2 + 5/2 x - 3/2
    p = [Fraction(-3, 2), Fraction(5, 2), Fraction(1)]
    assert sorted(linalg.rational_roots(p)) == [-3, Fraction(1, 2)]
