import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_density import exact_linalg as la
from torsion_density.errors import NotFiniteOrder, NotInvariant, NotMonic, OrderExceedsCap, ParseError

ROT6 = ((1, -1), (1, 0))
ROT4 = ((0, -1), (1, 0))


def cofactor_det(A):
    """Laplace expansion along the first row; independent of the Bareiss path."""
    n = len(A)
    if n == 1:
        return A[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in A[1:]]
        total += (-1) ** j * A[0][j] * cofactor_det(minor)
    return total


def int_matrices(n, lo=-6, hi=6):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n).map(
        lambda rows: tuple(tuple(r) for r in rows)
    )


@pytest.mark.parametrize("A, expected", [
    (la.identity(2), 1),
    (((0, -1), (1, -1)), 1),
    (la.mat_sub(ROT6, la.identity(2)), 1),
    (((2, 0, 0), (0, 3, 0), (0, 0, 5)), 30),
    (((1, 2), (2, 4)), 0),
])
def test_mat_det_examples(A, expected):
    assert la.mat_det(A) == expected


@given(st.integers(1, 5).flatmap(int_matrices))
def test_mat_det_matches_cofactor_expansion(A):
    assert la.mat_det(A) == cofactor_det(A)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(int_matrices(n), int_matrices(n))))
def test_det_multiplicative(pair):
    A, B = pair
    assert la.mat_det(la.mat_mul(A, B)) == la.mat_det(A) * la.mat_det(B)


def test_mat_det_rational_entries():
    A = ((Fraction(1, 2), Fraction(1, 3)), (Fraction(1, 4), Fraction(1, 5)))
    assert la.mat_det(A) == Fraction(1, 10) - Fraction(1, 12)


def test_det_large_unimodular_conjugate():
    rng = random.Random(7)
    U = la.identity(5)
    for _ in range(12):
        i, j = rng.sample(range(5), 2)
        E = [list(r) for r in la.identity(5)]
        E[i][j] = rng.randint(-4, 4)
        U = la.mat_mul(U, la.as_matrix(E))
    assert la.mat_det(U) == 1
    A = la.block_diag(ROT6, ((-1,),), ((1, 0), (0, 1)))
    C = la.mat_mul(U, la.mat_mul(A, la.int_inverse(U)))
    assert la.mat_det(la.mat_sub(C, la.identity(5))) == cofactor_det(la.mat_sub(C, la.identity(5)))


@pytest.mark.parametrize("A, expected", [
    (la.identity(2), True),
    (((-1, 0), (0, -1)), False),
    (((1, 0), (0, -1)), True),
    (ROT6, False),
])
def test_has_eigenvalue_one(A, expected):
    assert la.has_eigenvalue_one(A) is expected


@given(st.integers(1, 4).flatmap(lambda n: int_matrices(n, -3, 3)))
def test_eigenvalue_one_iff_kernel(A):
    K = la.rational_kernel(la.mat_sub(A, la.identity(len(A))))
    assert la.has_eigenvalue_one(A) == bool(K)


def test_mat_order():
    assert la.mat_order(la.identity(3)) == 1
    assert la.mat_order(ROT4) == 4
    assert la.mat_order(ROT6) == 6
    with pytest.raises(OrderExceedsCap):
        la.mat_order(((1, 1), (0, 1)), 100)


def test_rational_kernel():
    assert len(la.rational_kernel(la.zeros(2, 2))) == 2
    K = la.rational_kernel(((0, 0), (0, -2)))
    assert K == [(1, 0)]
    assert la.rational_kernel(la.mat_sub(ROT6, la.identity(2))) == []


@given(st.integers(1, 4).flatmap(lambda n: int_matrices(n, -3, 3)))
def test_kernel_vectors_are_killed(M):
    for v in la.rational_kernel(M):
        assert not any(la.mat_vec(M, v))
    assert len(la.rational_kernel(M)) == len(M) - la.rank(M)


@pytest.mark.parametrize("m, expected", [
    (1, (-1, 1)),
    (2, (1, 1)),
    (4, (1, 0, 1)),
    (6, (1, -1, 1)),
    (12, (1, 0, -1, 0, 1)),
])
def test_cyclotomic_examples(m, expected):
    assert la.cyclotomic(m) == expected


@pytest.mark.parametrize("m", range(1, 31))
def test_cyclotomic_product_and_sympy(m):
    prod = (1,)
    for d in range(1, m + 1):
        if m % d == 0:
            prod = la.poly_mul(prod, la.cyclotomic(d))
    assert prod == (-1,) + (0,) * (m - 1) + (1,)
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
    assert la.cyclotomic(m) == tuple(int(c) for c in ref)
    assert la.euler_phi(m) == int(sympy.totient(m))


def test_companion_examples():
    assert la.companion((-1, 1)) == ((1,),)
    T3 = la.companion(la.cyclotomic(3))
    assert T3 == ((0, -1), (1, -1))
    assert la.mat_mul(T3, T3) != la.identity(2)
    assert la.mat_pow(T3, 3) == la.identity(2)
    assert la.companion(la.cyclotomic(4)) == ROT4
    with pytest.raises(NotMonic):
        la.companion((1, 2))
    with pytest.raises(NotMonic):
        la.companion((5,))


@pytest.mark.parametrize("m", range(1, 31))
def test_companion_of_cyclotomic_has_order_m_and_no_fixed_vectors(m):
    T = la.companion(la.cyclotomic(m))
    assert la.mat_order(T) == m
    P = T
    for _ in range(1, m):
        assert not la.has_eigenvalue_one(P)
        P = la.mat_mul(P, T)


def test_companion_char_poly_is_input():
    x = sympy.Symbol("x")
    for m in (5, 8, 9, 12):
        p = la.cyclotomic(m)
        T = sympy.Matrix(la.companion(p))
        cp = T.charpoly(x).all_coeffs()[::-1]
        assert tuple(int(c) for c in cp) == p


def test_quotient_fix_examples():
    assert la.quotient_fix_projection_check(((1, 0), (0, -1)), [(0, 1)])
    assert la.quotient_fix_projection_check(la.identity(3), [(1, 2, 3)])
    assert la.quotient_fix_projection_check(ROT4, [])


def test_quotient_fix_errors():
    with pytest.raises(NotInvariant):
        la.quotient_fix_projection_check(ROT4, [(1, 0)])
    with pytest.raises(NotFiniteOrder):
        la.quotient_fix_projection_check(((1, 1), (0, 1)), [(1, 0)], cap=50)


def test_parse_rational():
    assert la.parse_rational("1/2") == Fraction(1, 2)
    assert la.parse_rational("-3") == -3
    assert la.parse_rational(4) == 4
    for bad in (0.5, "0.5", "1e3", "x", True, None):
        with pytest.raises(ParseError):
            la.parse_rational(bad)


@settings(max_examples=50)
@given(st.integers(1, 4).flatmap(lambda n: int_matrices(n, -2, 2)))
def test_inverse_roundtrip(A):
    if la.mat_det(A) == 0:
        return
    assert la.mat_mul(A, la.mat_inverse(A)) == la.identity(len(A))
