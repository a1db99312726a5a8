"""Exact calculus on nilpotent Lie algebras and their lattices.

Group elements live in exponential coordinates: the tuple ``x`` stands for
exp(sum x_i X_i), and products are computed with the Baker-Campbell-Hausdorff
series, which is a finite sum once the algebra is nilpotent (we stop at
step 4). Second-kind coordinates s correspond to
exp(s_n X_n) ... exp(s_1 X_1) and are used for lattice membership and for
the box norm.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

from . import exact_linalg as la
from .affine_cryst import BallStats, DEFAULT_MAX_BALL
from .errors import (
    BallTooLarge,
    ConstructionInvariantFailed,
    DimensionOutOfRange,
    InsufficientData,
    InvalidAlgebra,
    NotAutomorphism,
    NotFiniteOrder,
    NotNilpotent,
    NotNonabelian,
    OrderExceedsCap,
    ParseError,
    StepTooHigh,
)

JACOBI_CHECK_MAX_DIM = 8


class LowerCentralSeries(NamedTuple):
    ranks: tuple  # rank of g^i / g^(i+1), i = 1..step
    degree: int  # sum of i * rank_i


class NilAlgebra:
    """A nilpotent Lie algebra given by structure constants on an ordered basis.

    ``constants`` maps (i, j, l) (0-based) to alpha_ijl in
    [X_i, X_j] = sum_l alpha_ijl X_l. Supplying one of (i, j, l) and
    (j, i, l) is enough; the other is filled in by antisymmetry.
    """

    def __init__(self, dim: int, constants: dict, names=None, require_triangular: bool = True):
        if dim < 1:
            raise InvalidAlgebra("dimension must be positive")
        self.dim = dim
        self.names = tuple(names) if names else tuple(f"X{i + 1}" for i in range(dim))
        if len(self.names) != dim:
            raise InvalidAlgebra("wrong number of basis names")
        table: dict = {}
        for (i, j, l), c in constants.items():
            c = Fraction(c)
            if not (0 <= i < dim and 0 <= j < dim and 0 <= l < dim):
                raise InvalidAlgebra(f"index out of range in ({i}, {j}, {l})")
            if i == j:
                if c:
                    raise InvalidAlgebra(f"[X{i + 1}, X{i + 1}] must vanish")
                continue
            for key, val in (((i, j, l), c), ((j, i, l), -c)):
                if table.get(key, val) != val:
                    raise InvalidAlgebra(f"antisymmetry violated at {key}")
                table[key] = val
        self.constants = {k: v for k, v in table.items() if v}
        self._terms = tuple((i, j, l, c) for (i, j, l), c in sorted(self.constants.items()))
        self.is_triangular = all(l > max(i, j) for (i, j, l) in self.constants)
        if require_triangular and not self.is_triangular:
            raise InvalidAlgebra("basis is not triangular (need alpha_ijl = 0 for l <= max(i, j))")
        if dim <= JACOBI_CHECK_MAX_DIM:
            self._check_jacobi()

    def __repr__(self):
        return f"NilAlgebra(dim={self.dim}, names={self.names})"

    def basis_vector(self, i: int) -> tuple:
        return tuple(Fraction(int(i == j)) for j in range(self.dim))

    def zero(self) -> tuple:
        return (Fraction(0),) * self.dim

    def bracket(self, x, y) -> tuple:
        out = [0] * self.dim
        for i, j, l, c in self._terms:
            xi = x[i]
            if xi:
                yj = y[j]
                if yj:
                    out[l] += c * xi * yj
        return tuple(out)

    def _check_jacobi(self):
        basis = [self.basis_vector(i) for i in range(self.dim)]
        br = self.bracket
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                for c in range(b + 1, self.dim):
                    x, y, z = basis[a], basis[b], basis[c]
                    s = [p + q + r for p, q, r in zip(br(x, br(y, z)), br(y, br(z, x)), br(z, br(x, y)))]
                    if any(s):
                        raise InvalidAlgebra(f"Jacobi identity fails on ({self.names[a]}, {self.names[b]}, {self.names[c]})")

    @property
    def is_abelian(self) -> bool:
        return not self.constants

    @cached_property
    def _series(self) -> list:
        """Echelon bases of g^1, g^2, ... down to (and excluding) zero."""
        current = [self.basis_vector(i) for i in range(self.dim)]
        series = [current]
        basis = [self.basis_vector(i) for i in range(self.dim)]
        while True:
            nxt = la.span_basis(v for v in (self.bracket(x, y) for x in basis for y in current) if any(v))
            if not nxt:
                return series
            if len(nxt) == len(current) or len(series) > self.dim:
                raise NotNilpotent("lower central series does not terminate")
            series.append(nxt)
            current = nxt

    @cached_property
    def lcs(self) -> LowerCentralSeries:
        dims = [len(s) for s in self._series] + [0]
        ranks = tuple(dims[i] - dims[i + 1] for i in range(len(dims) - 1))
        return LowerCentralSeries(ranks, sum((i + 1) * r for i, r in enumerate(ranks)))

    @property
    def step(self) -> int:
        return len(self.lcs.ranks)

    @cached_property
    def weights(self) -> tuple:
        """Weight of each basis vector: the largest i with X in g^i."""
        out = []
        for l in range(self.dim):
            e = self.basis_vector(l)
            out.append(max(i + 1 for i, s in enumerate(self._series) if la.in_span(e, s)))
        return tuple(out)

    def is_automorphism(self, M) -> bool:
        """M (columns = images of basis vectors) preserves every bracket."""
        cols = la.transpose(M)
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                lhs = la.mat_vec(M, self.bracket(self.basis_vector(i), self.basis_vector(j)))
                rhs = self.bracket(cols[i], cols[j])
                if any(a != b for a, b in zip(lhs, rhs)):
                    return False
        return True


def lower_central_series(a: NilAlgebra) -> LowerCentralSeries:
    return a.lcs


# ---------------------------------------------------------------------------
# algebra files

def algebra_from_dict(data: dict) -> tuple[NilAlgebra, "NilAutomorphism | None"]:
    """Parse an algebra definition; structure-constant indices are 1-based."""
    try:
        dim = int(data["dim"])
        constants = {}
        for entry in data.get("brackets", []):
            i, j, l, c = entry
            constants[(int(i) - 1, int(j) - 1, int(l) - 1)] = la.parse_rational(c)
        alg = NilAlgebra(dim, constants, data.get("basis"))
        if "step" in data and int(data["step"]) != alg.step:
            raise ParseError(f"declared step {data['step']} but the algebra has step {alg.step}")
        auto = None
        if "automorphism" in data:
            rows = [[la.parse_rational(x) for x in row] for row in data["automorphism"]]
            auto = NilAutomorphism(alg, la.as_matrix(rows))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed algebra definition: {exc}") from exc
    return alg, auto


def algebra_to_dict(a: NilAlgebra, auto: "NilAutomorphism | None" = None) -> dict:
    out = {
        "dim": a.dim,
        "step": a.step,
        "basis": list(a.names),
        "brackets": [[i + 1, j + 1, l + 1, la.format_rational(c)]
                     for (i, j, l), c in sorted(a.constants.items()) if i < j],
    }
    if auto is not None:
        out["automorphism"] = [[la.format_rational(x) for x in row] for row in auto.matrix]
    return out


def load_algebra(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return algebra_from_dict(data)


# ---------------------------------------------------------------------------
# BCH group law

def bch(a: NilAlgebra, x, y) -> tuple:
    """log(exp x exp y), exact, for step <= 4."""
    step = a.step
    if step >= 5:
        raise StepTooHigh(f"BCH is implemented up to step 4, algebra has step {step}")
    half = Fraction(1, 2)
    out = [p + q for p, q in zip(x, y)]
    if step == 1:
        return tuple(out)
    xy = a.bracket(x, y)
    out = [o + half * b for o, b in zip(out, xy)]
    if step >= 3:
        x_xy = a.bracket(x, xy)
        y_xy = a.bracket(y, xy)
        out = [o + Fraction(p - q, 12) for o, p, q in zip(out, x_xy, y_xy)]
        if step >= 4:
            out = [o - Fraction(t, 24) for o, t in zip(out, a.bracket(y, x_xy))]
    return tuple(Fraction(o) for o in out)


@dataclass(frozen=True, eq=False)
class NilElement:
    algebra: NilAlgebra
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.algebra.dim:
            raise ValueError("coordinate vector does not match the algebra dimension")
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    def __mul__(self, other: "NilElement") -> "NilElement":
        return bch_multiply(self, other)

    def __eq__(self, other):
        return isinstance(other, NilElement) and self.algebra is other.algebra and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"NilElement({', '.join(str(c) for c in self.coords)})"


def bch_multiply(x: NilElement, y: NilElement) -> NilElement:
    if x.algebra is not y.algebra:
        raise ValueError("elements belong to different algebras")
    return NilElement(x.algebra, bch(x.algebra, x.coords, y.coords))


def nil_identity(a: NilAlgebra) -> NilElement:
    return NilElement(a, a.zero())


def nil_inverse(x: NilElement) -> NilElement:
    return NilElement(x.algebra, tuple(-c for c in x.coords))


def exp_basis(a: NilAlgebra, i: int, t=1) -> NilElement:
    return NilElement(a, tuple(Fraction(t) * c for c in a.basis_vector(i)))


# ---------------------------------------------------------------------------
# second-kind coordinates

def _second_kind_product(a: NilAlgebra, s) -> tuple:
    out = a.zero()
    for l in range(a.dim - 1, -1, -1):
        if s[l]:
            term = [Fraction(0)] * a.dim
            term[l] = Fraction(s[l])
            out = bch(a, out, tuple(term))
    return out


def from_second_kind(a: NilAlgebra, s) -> NilElement:
    """exp(s_n X_n) ... exp(s_1 X_1) in exponential coordinates."""
    return NilElement(a, _second_kind_product(a, s))


def to_second_kind(x: NilElement) -> tuple:
    """Inverse of :func:`from_second_kind` by back-substitution.

    In a triangular basis the X_l coefficient of the ordered product is s_l
    plus a polynomial in s_1..s_(l-1), so s can be solved one index at a
    time.
    """
    a = x.algebra
    s = [Fraction(0)] * a.dim
    for l in range(a.dim):
        s[l] = Fraction(0)
        s[l] = x.coords[l] - _second_kind_product(a, s)[l]
    return tuple(s)


def lattice_membership(x: NilElement) -> bool:
    """Integral second-kind coordinates.

    For two-step algebras with integral structure constants this set is a
    subgroup; that covers every lattice built in this package.
    """
    return all(c.denominator == 1 for c in to_second_kind(x))


def box_norm(x: NilElement) -> float:
    """max_l |s_l|^(1/weight_l) on second-kind coordinates (an estimate)."""
    w = x.algebra.weights
    s = to_second_kind(x)
    return max((abs(float(c)) ** (1.0 / wi) for c, wi in zip(s, w)), default=0.0)


# ---------------------------------------------------------------------------
# automorphisms and examples

@dataclass(frozen=True, eq=False)
class NilAutomorphism:
    algebra: NilAlgebra
    matrix: tuple  # columns are the images of the basis vectors

    def __post_init__(self):
        M = la.as_matrix(self.matrix)
        object.__setattr__(self, "matrix", M)
        if len(M) != self.algebra.dim or any(len(r) != self.algebra.dim for r in M):
            raise NotAutomorphism("matrix has the wrong shape")
        if la.mat_det(M) == 0:
            raise NotAutomorphism("matrix is singular")
        if not self.algebra.is_automorphism(M):
            raise NotAutomorphism("matrix does not preserve the bracket")

    def apply(self, coords) -> tuple:
        return la.mat_vec(self.matrix, coords)

    def power(self, j: int) -> tuple:
        return la.mat_pow(self.matrix, j)

    def order(self, cap: int | None = None) -> int:
        return la.mat_order(self.matrix, cap)


def heisenberg(n: int) -> NilAlgebra:
    """h_n: basis X_1..X_n, Y_1..Y_n, Z with [X_i, Y_i] = Z."""
    if n < 1:
        raise ValueError("n must be positive")
    names = [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)] + ["Z"]
    return NilAlgebra(2 * n + 1, {(i, n + i, 2 * n): 1 for i in range(n)}, names)


def h2_automorphism(a: NilAlgebra | None = None) -> NilAutomorphism:
    """X1->X2, X2->-X1, Y1->-Y2, Y2->Y1, Z->-Z on h_2: order 4, eigenvalues +-i, -1."""
    a = heisenberg(2) if a is None else a
    if a.dim != 5:
        raise ValueError("h2_automorphism needs heisenberg(2)")
    M = (
        (0, -1, 0, 0, 0),
        (1, 0, 0, 0, 0),
        (0, 0, 0, 1, 0),
        (0, 0, -1, 0, 0),
        (0, 0, 0, 0, -1),
    )
    try:
        T = NilAutomorphism(a, M)
    except NotAutomorphism as exc:
        raise ConstructionInvariantFailed(str(exc)) from exc
    if T.order(8) != 4 or la.has_eigenvalue_one(M):
        raise ConstructionInvariantFailed("h2 automorphism lost order 4 or gained eigenvalue 1")
    return T


def nil_semidirect_torsion(g: NilElement, T: NilAutomorphism, j: int) -> bool:
    """Is (g, T^j) of finite order in the lattice extended by <T>?

    With m the order of A = T^j, (g, A)^m = (g A(g) ... A^(m-1)(g), I),
    and the lattice is torsion-free, so finite order means that product is
    the identity.
    """
    a = g.algebra
    A = T.power(j)
    m = la.mat_order(A)
    prod = g.coords
    cur = g.coords
    for _ in range(m - 1):
        cur = la.mat_vec(A, cur)
        prod = bch(a, prod, cur)
    return not any(prod)


def semidirect_power(g: NilElement, T: NilAutomorphism, j: int, k: int):
    """(g, T^j)^k by repeated pair multiplication; returns (coords, power of T)."""
    a = g.algebra
    coords, p = a.zero(), 0
    for _ in range(k):
        coords = bch(a, coords, la.mat_vec(T.power(p), g.coords))
        p += j
    return coords, p


def low_dim_nonabelian_check(a: NilAlgebra, autos) -> bool:
    """Every finite-order automorphism of a nonabelian 3- or 4-dim algebra fixes a vector."""
    if a.dim not in (3, 4):
        raise DimensionOutOfRange(f"dimension {a.dim} not in {{3, 4}}")
    if a.is_abelian:
        raise NotNonabelian("algebra is abelian")
    for T in autos:
        M = T.matrix if isinstance(T, NilAutomorphism) else la.as_matrix(T)
        if not a.is_automorphism(M):
            raise NotAutomorphism(f"{M} does not preserve the bracket")
        try:
            la.mat_order(M)
        except OrderExceedsCap as exc:
            raise NotFiniteOrder(str(exc)) from exc
        if not la.has_eigenvalue_one(M):
            return False
    return True


# ---------------------------------------------------------------------------
# ball census in N x| <T>

class _Inexact(Exception):
    pass


class _IntLaw:
    """BCH on coordinates scaled by D to integers (needs integral constants).

    Raises _Inexact when a product leaves (1/D)Z^n; callers then fall back
    to Fraction arithmetic.
    """

    def __init__(self, a: NilAlgebra, D: int):
        self.a = a
        self.D = D
        self.step = a.step
        self.terms = tuple((i, j, l, int(c)) for i, j, l, c in a._terms)

    def bracket(self, x, y):
        out = [0] * self.a.dim
        for i, j, l, c in self.terms:
            xi = x[i]
            if xi:
                yj = y[j]
                if yj:
                    out[l] += c * xi * yj
        return out

    def mul(self, X, Y):
        D = self.D
        if self.step == 1:
            return tuple(p + q for p, q in zip(X, Y))
        xy = self.bracket(X, Y)
        if self.step == 2:
            den = 2 * D
            num = [den * (p + q) + b for p, q, b in zip(X, Y, xy)]
        else:
            den = 24 * D ** 3
            x_xy = self.bracket(X, xy)
            y_xy = self.bracket(Y, xy)
            num = [den * (p + q) + 12 * D * D * b + 2 * D * (s - t)
                   for p, q, b, s, t in zip(X, Y, xy, x_xy, y_xy)]
            if self.step >= 4:
                num = [u - v for u, v in zip(num, self.bracket(Y, x_xy))]
        out = []
        for u in num:
            q, r = divmod(u, den)
            if r:
                raise _Inexact
            out.append(q)
        return tuple(out)


class _FracLaw:
    def __init__(self, a: NilAlgebra):
        self.a = a
        self.D = 1

    def mul(self, X, Y):
        return bch(self.a, X, Y)


def _apply_int(M, X):
    out = []
    for row in M:
        s = sum(c * x for c, x in zip(row, X))
        if isinstance(s, Fraction):
            if s.denominator != 1:
                raise _Inexact
            s = s.numerator
        out.append(s)
    return tuple(out)


class _Classifier:
    """Torsion test for pairs (coords, j) in the lattice extended by <T>."""

    def __init__(self, law, powers, apply):
        self.law = law
        self.powers = powers
        self.apply = apply
        self.orders = [la.mat_order(P) for P in powers]

    def __call__(self, elem) -> bool:
        g, j = elem
        if j == 0:
            return not any(g)
        A = self.powers[j]
        prod = cur = g
        for _ in range(self.orders[j] - 1):
            cur = self.apply(A, cur)
            prod = self.law.mul(prod, cur)
        return not any(prod)

    def batch(self, elems) -> list:
        return [self(e) for e in elems]


_worker_classifier = None


def _init_worker(classifier):
    global _worker_classifier
    _worker_classifier = classifier


def _classify_chunk(elems):
    return _worker_classifier.batch(elems)


@dataclass
class NilBall:
    stats: list  # BallStats per requested radius
    lengths: dict | None  # exponential coords -> word length (lattice only, on request)
    scale: int


def _nil_bfs(a: NilAlgebra, T: NilAutomorphism | None, radii, max_elements, keep_lengths, law, workers=1):
    D = law.D
    n = a.dim
    order = T.order() if T is not None else 1
    raw_powers = [la.mat_pow(T.matrix, j) for j in range(order)] if T is not None else [la.identity(n)]
    if isinstance(law, _IntLaw):
        powers = [la.to_int_matrix(P) if la.is_integral(P) else P for P in raw_powers]
        apply = _apply_int
        zero = (0,) * n
        unit = [tuple(D * int(k == i) for k in range(n)) for i in range(n)]
    else:
        powers = raw_powers
        apply = la.mat_vec
        zero = a.zero()
        unit = [a.basis_vector(i) for i in range(n)]
    gens = []
    for e in unit:
        gens.append((e, 0))
        gens.append((tuple(-c for c in e), 0))
    if order > 1:
        gens.append((zero, 1))
        if order > 2:
            gens.append((zero, order - 1))
    keys = [la.as_matrix(P) for P in raw_powers]
    classify = _Classifier(law, powers, apply)

    pool = None
    if workers > 1:
        import multiprocessing

        pool = multiprocessing.get_context("fork").Pool(workers, _init_worker, (classify,))

    radii = sorted(set(int(r) for r in radii))
    want = set(radii)
    start = (zero, 0)
    seen = {start}
    lengths = {zero: 0} if keep_lengths else None
    frontier = [start]
    per_coset = {0: [1, 1]}
    total = tors = 1
    out = []

    def snap(r):
        pc = {keys[j]: tuple(c) for j, c in sorted(per_coset.items())}
        out.append(BallStats(r, total, tors, pc, len(gens), order))

    try:
        if 0 in want:
            snap(0)
        for r in range(1, radii[-1] + 1):
            nxt = []
            for g, j in frontier:
                A = powers[j]
                for h, k in gens:
                    coords = law.mul(g, apply(A, h)) if any(h) else g
                    elem = (coords, (j + k) % order)
                    if elem not in seen:
                        seen.add(elem)
                        nxt.append(elem)
                if total + len(nxt) > max_elements:
                    raise BallTooLarge(f"ball of radius {r} exceeds {max_elements} elements", radius=r)
            if pool is not None and len(nxt) > 1000:
                size = -(-len(nxt) // (4 * workers))
                chunks = [nxt[i:i + size] for i in range(0, len(nxt), size)]
                flags = [f for part in pool.map(_classify_chunk, chunks) for f in part]
            else:
                flags = classify.batch(nxt)
            for (coords, j), is_t in zip(nxt, flags):
                c = per_coset.get(j)
                if c is None:
                    c = per_coset[j] = [0, 0]
                c[0] += 1
                if is_t:
                    c[1] += 1
                if keep_lengths:
                    lengths[coords] = r
            total += len(nxt)
            tors += sum(flags)
            frontier = nxt
            if r in want:
                snap(r)
    finally:
        if pool is not None:
            pool.terminate()
    return out, lengths


def nil_ball_bfs(a: NilAlgebra, radii, T: NilAutomorphism | None = None,
                 max_elements: int = DEFAULT_MAX_BALL, keep_lengths: bool = False,
                 workers: int = 1) -> NilBall:
    """Census of word balls in exp(lattice) x| <T>.

    Generators are exp(X_i) for every basis vector plus T itself, all with
    inverses. Elements are pairs (exponential coordinates, power of T).
    """
    if T is not None:
        for i in range(a.dim):
            if not lattice_membership(NilElement(a, T.apply(a.basis_vector(i)))):
                raise ValueError("automorphism does not preserve the integral lattice")
    if isinstance(radii, int):
        radii = [radii]
    if keep_lengths and T is not None:
        raise ValueError("word lengths are only recorded for the lattice itself")
    integral = all(c.denominator == 1 for c in a.constants.values())
    if integral:
        D = {1: 1, 2: 2}.get(a.step, 12)
        try:
            stats, lengths = _nil_bfs(a, T, radii, max_elements, keep_lengths, _IntLaw(a, D), workers)
            if lengths is not None:
                lengths = {tuple(Fraction(c, D) for c in k): v for k, v in lengths.items()}
            return NilBall(stats, lengths, D)
        except _Inexact:
            pass
    stats, lengths = _nil_bfs(a, T, radii, max_elements, keep_lengths, _FracLaw(a), workers)
    return NilBall(stats, lengths, 1)


class BallBoxFit(NamedTuple):
    constant: float  # smallest a with box_norm / word_length in [1/a, a]
    growth_slope: float
    degree: int


def ball_box_comparability(a: NilAlgebra, radii) -> BallBoxFit:
    radii = sorted(radii)
    if len(radii) < 3 or radii[0] < 4:
        raise InsufficientData("need at least 3 radii, each >= 4")
    ball = nil_ball_bfs(a, radii, keep_lengths=True)
    lo, hi = math.inf, 0.0
    for coords, length in ball.lengths.items():
        if length == 0:
            continue
        ratio = box_norm(NilElement(a, coords)) / length
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    const = max(hi, 1.0 / lo)
    xs = [math.log(s.radius) for s in ball.stats]
    ys = [math.log(s.total) for s in ball.stats]
    slope, _ = statistics.linear_regression(xs, ys)
    return BallBoxFit(const, slope, a.lcs.degree)
