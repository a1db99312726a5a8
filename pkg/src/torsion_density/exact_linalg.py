"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples, vectors are tuples. Entries are ``int``
or :class:`fractions.Fraction`; nothing in this module touches floats, so
every yes/no answer (is 1 an eigenvalue? is this subspace invariant?) is an
algebraic fact rather than a tolerance call.

Polynomials are tuples of integer coefficients in ascending degree with no
trailing zeros; the zero polynomial is ``()``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .errors import NotFiniteOrder, NotInvariant, NotMonic, OrderExceedsCap, ParseError

Scalar = Union[int, Fraction]
IntMatrix = tuple  # tuple[tuple[int, ...], ...]
RatMatrix = tuple  # tuple[tuple[Fraction, ...], ...]
RatVector = tuple  # tuple[Fraction, ...]
IntPoly = tuple  # tuple[int, ...], ascending degree


# ---------------------------------------------------------------------------
# scalars

def parse_rational(text) -> Fraction:
    """Parse an exact rational from ``"p/q"``, ``"p"`` or an ``int``.

    Floats are rejected outright: a decimal in a group file almost always
    means someone typed 0.5 for 1/2, and silently accepting it would make
    the key encoding depend on binary rounding.
    """
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ParseError(f"rational must be given as a string 'p/q', got {type(text).__name__}")
    s = text.strip()
    if "." in s or "e" in s.lower():
        raise ParseError(f"decimal/float notation not allowed for exact rationals: {text!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational: {text!r}") from exc


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# basic matrix arithmetic

def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(rows: int, cols: int) -> IntMatrix:
    return tuple((0,) * cols for _ in range(rows))


def as_matrix(rows: Sequence[Sequence]) -> tuple:
    return tuple(tuple(r) for r in rows)


def from_flat(entries: Sequence, n: int) -> tuple:
    if len(entries) != n * n:
        raise ValueError(f"expected {n * n} entries for a {n}x{n} matrix, got {len(entries)}")
    return tuple(tuple(entries[i * n:(i + 1) * n]) for i in range(n))


def flat(A) -> tuple:
    return tuple(x for row in A for x in row)


def transpose(A) -> tuple:
    return tuple(zip(*A))


def mat_mul(A, B) -> tuple:
    Bt = tuple(zip(*B))
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def mat_vec(A, v) -> tuple:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def mat_add(A, B) -> tuple:
    return tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(A, B) -> tuple:
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_scale(c, A) -> tuple:
    return tuple(tuple(c * a for a in row) for row in A)


def mat_pow(A, k: int) -> tuple:
    if k < 0:
        return mat_pow(mat_inverse(A), -k)
    result = identity(len(A))
    base = A
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


def block_diag(*blocks) -> tuple:
    n = sum(len(b) for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        m = len(b)
        for row in b:
            rows.append((0,) * offset + tuple(row) + (0,) * (n - offset - m))
        offset += m
    return tuple(rows)


def is_integral(A) -> bool:
    return all(Fraction(x).denominator == 1 for row in A for x in row)


def to_int_matrix(A) -> IntMatrix:
    out = []
    for row in A:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"matrix entry {x} is not an integer")
            r.append(x.numerator)
        out.append(tuple(r))
    return tuple(out)


# ---------------------------------------------------------------------------
# determinant, inverse, kernel

def _bareiss(M: list) -> int:
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = M[k][k]
        row_k = M[k]
        for i in range(k + 1, n):
            row_i = M[i]
            f = row_i[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pivot - f * row_k[j]) // prev
        prev = pivot
    return sign * M[n - 1][n - 1]


def mat_det(A) -> Scalar:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rational matrices are scaled row by row to integers first, so the
    elimination itself only ever does exact integer division.
    """
    n = len(A)
    if n == 0:
        return 1
    if any(len(row) != n for row in A):
        raise ValueError("determinant of a non-square matrix")
    scale = Fraction(1)
    M = []
    for row in A:
        den = math.lcm(*(Fraction(x).denominator for x in row))
        scale /= den
        M.append([int(Fraction(x) * den) for x in row])
    d = _bareiss(M)
    return d if scale == 1 else scale * d


def has_eigenvalue_one(A) -> bool:
    return mat_det(mat_sub(A, identity(len(A)))) == 0


def default_order_cap(n: int) -> int:
    return 10 * math.factorial(n) * 2 ** n


def mat_order(A, cap: int | None = None) -> int:
    """Smallest k >= 1 with A^k = I, searching up to ``cap``."""
    n = len(A)
    if cap is None:
        cap = default_order_cap(n)
    if cap < 1:
        raise ValueError("cap must be positive")
    I = identity(n)
    P = A
    for k in range(1, cap + 1):
        if P == I:
            return k
        P = mat_mul(P, A)
    raise OrderExceedsCap(f"no k <= {cap} with A^k = I")


def rref(A) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(A) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def rational_kernel(M) -> list[RatVector]:
    """Basis of the rational null space of M (one vector per free column)."""
    if not M:
        return []
    cols = len(M[0])
    R, pivots = rref(M)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -R[i][f]
        basis.append(tuple(v))
    return basis


def mat_inverse(A) -> RatMatrix:
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def int_inverse(A) -> IntMatrix | None:
    """Inverse over Z, or None when A is not unimodular."""
    if mat_det(A) not in (1, -1):
        return None
    return to_int_matrix(mat_inverse(A))


def span_basis(vectors) -> list[RatVector]:
    """Echelon basis of the span of ``vectors``."""
    vectors = list(vectors)
    if not vectors:
        return []
    R, pivots = rref(vectors)
    return [tuple(R[i]) for i in range(len(pivots))]


def in_span(v, basis) -> bool:
    if not any(v):
        return True
    if not basis:
        return False
    return rank(list(basis) + [v]) == rank(basis)


def same_span(U, V) -> bool:
    U, V = list(U), list(V)
    ru, rv = (rank(U) if U else 0), (rank(V) if V else 0)
    if ru != rv:
        return False
    if ru == 0:
        return True
    return rank(U + V) == ru


# ---------------------------------------------------------------------------
# integer polynomials

def poly_trim(p) -> IntPoly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_mul(p, q) -> IntPoly:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly_trim(out)


def poly_divmod(p, d) -> tuple[IntPoly, IntPoly]:
    """Division by a monic integer polynomial."""
    d = poly_trim(d)
    if not d or d[-1] != 1:
        raise NotMonic("divisor must be monic")
    r = list(poly_trim(p))
    dd = len(d) - 1
    if len(r) - 1 < dd:
        return (), tuple(r)
    q = [0] * (len(r) - dd)
    for k in range(len(r) - 1 - dd, -1, -1):
        c = r[k + dd]
        q[k] = c
        if c:
            for j, b in enumerate(d):
                r[k + j] -= c * b
    return poly_trim(q), poly_trim(r)


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> IntPoly:
    """m-th cyclotomic polynomial: x^m - 1 divided by every Phi_d, d | m, d < m."""
    if m < 1:
        raise ValueError("m must be positive")
    p = (-1,) + (0,) * (m - 1) + (1,)
    for d in range(1, m):
        if m % d == 0:
            p, r = poly_divmod(p, cyclotomic(d))
            assert not r
    return p


def euler_phi(m: int) -> int:
    return len(cyclotomic(m)) - 1


def companion(p) -> IntMatrix:
    """Companion matrix with 1s on the subdiagonal and the last column holding
    the a_i of p = x^deg - sum a_i x^i (so the column is -p_0, ..., -p_{deg-1})."""
    p = poly_trim(p)
    if len(p) < 2:
        raise NotMonic("companion matrix needs degree >= 1")
    if p[-1] != 1:
        raise NotMonic(f"polynomial {p} is not monic")
    n = len(p) - 1
    rows = []
    for i in range(n):
        row = [0] * n
        if i > 0:
            row[i - 1] = 1
        row[n - 1] = -p[i]
        rows.append(tuple(row))
    return tuple(rows)


# ---------------------------------------------------------------------------
# fixed sets in quotients

def is_invariant(A, K) -> bool:
    return all(in_span(mat_vec(A, v), K) for v in K)


def quotient_fix_projection_check(A, K, cap: int | None = None) -> bool:
    """Compare Fix of the induced map on V/span(K) with the image of Fix(A).

    Extends a basis of W = span(K) by standard vectors to a basis P of V;
    in that basis A is block upper triangular and the lower-right block is
    the induced map on V/W. Projection onto V/W is "last n - dim W
    coordinates of P^-1 v".
    """
    n = len(A)
    try:
        mat_order(A, cap)
    except OrderExceedsCap as exc:
        raise NotFiniteOrder(str(exc)) from exc
    W = span_basis([tuple(Fraction(x) for x in v) for v in K])
    if not is_invariant(A, W):
        raise NotInvariant("A does not preserve span(K)")
    k = len(W)
    if k == n:
        return True
    basis = list(W)
    for i in range(n):
        e = tuple(Fraction(int(i == j)) for j in range(n))
        if not in_span(e, basis):
            basis.append(e)
    P = transpose(basis)
    Pinv = mat_inverse(P)
    B = mat_mul(Pinv, mat_mul(A, P))
    induced = tuple(tuple(row[k:]) for row in B[k:])
    fix_quotient = rational_kernel(mat_sub(induced, identity(n - k)))
    projected = [mat_vec(Pinv, v)[k:] for v in rational_kernel(mat_sub(A, identity(n)))]
    projected = [v for v in projected if any(v)]
    return same_span(fix_quotient, projected)
