"""Crystallographic groups as exact affine maps, and word-ball censuses.

An element is a pair (v, A) acting by x -> A x + v with A integral and v
rational (in lattice coordinates). Composition follows
(v, A)(w, B) = (v + A w, A B).

The breadth-first ball census is the independent check on the eigenvalue-1
formula: it never looks at eigenvalues, only at whether each element it
reaches actually has finite order.
"""

from __future__ import annotations

import itertools
import json
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from . import exact_linalg as la
from .errors import (
    BallTooLarge,
    DimensionMismatch,
    EigenvalueOnePresent,
    EmptyCoset,
    InsufficientData,
    NotUnimodular,
    OrderExceedsCap,
    ParseError,
)
from .point_group import DEFAULT_CLOSURE_CAP, PointGroup, closure

DEFAULT_MAX_BALL = 5_000_000


def torsion_order_cap(dim: int) -> int:
    return 720 if dim <= 4 else la.default_order_cap(dim)


@dataclass(frozen=True)
class AffineElement:
    lin: tuple
    trans: tuple

    def __post_init__(self):
        object.__setattr__(self, "lin", la.as_matrix(self.lin))
        object.__setattr__(self, "trans", tuple(Fraction(x) for x in self.trans))
        if len(self.trans) != len(self.lin):
            raise DimensionMismatch("translation and linear part disagree in dimension")

    @property
    def dim(self) -> int:
        return len(self.lin)

    @classmethod
    def identity(cls, n: int) -> "AffineElement":
        return cls(la.identity(n), (0,) * n)

    @classmethod
    def translation(cls, v) -> "AffineElement":
        return cls(la.identity(len(v)), v)

    def __mul__(self, other: "AffineElement") -> "AffineElement":
        return compose(self, other)

    def __call__(self, x):
        return tuple(a + b for a, b in zip(la.mat_vec(self.lin, x), self.trans))


def compose(a: AffineElement, b: AffineElement) -> AffineElement:
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot compose dimension {a.dim} with {b.dim}")
    v = tuple(x + y for x, y in zip(a.trans, la.mat_vec(a.lin, b.trans)))
    return AffineElement(la.mat_mul(a.lin, b.lin), v)


def inverse(a: AffineElement) -> AffineElement:
    Ainv = la.int_inverse(a.lin)
    if Ainv is None:
        raise NotUnimodular(f"linear part {a.lin} is not invertible over Z")
    return AffineElement(Ainv, tuple(-x for x in la.mat_vec(Ainv, a.trans)))


def _orbit_sum(A, k: int):
    n = len(A)
    N = la.zeros(n, n)
    P = la.identity(n)
    for _ in range(k):
        N = la.mat_add(N, P)
        P = la.mat_mul(P, A)
    return N


def torsion_order(a: AffineElement, cap: int | None = None) -> int | None:
    """Order of (v, A), or None if it has infinite order.

    (v, A)^j = ((I + A + ... + A^(j-1)) v, A^j), so the element has finite
    order iff that partial sum kills v at j = order(A); a smaller j cannot
    work since A^j must be I.
    """
    if cap is None:
        cap = torsion_order_cap(a.dim)
    k = la.mat_order(a.lin, cap)
    if any(la.mat_vec(_orbit_sum(a.lin, k), a.trans)):
        return None
    return k


def is_torsion(a: AffineElement, cap: int | None = None) -> bool:
    return torsion_order(a, cap) is not None


@dataclass(frozen=True, eq=False)
class CrystGroup:
    dim: int
    gens: tuple
    name: str = ""
    _point_group: PointGroup | None = field(default=None, repr=False)

    @classmethod
    def from_generators(cls, gens, dim: int | None = None, name: str = "",
                        add_lattice: bool = True, point_group: PointGroup | None = None):
        """Build a group, appending the standard lattice translations e_i
        unless they are already among ``gens``."""
        gens = list(gens)
        if dim is None:
            if not gens:
                raise ValueError("dimension needed for an empty generating set")
            dim = gens[0].dim
        for g in gens:
            if g.dim != dim:
                raise DimensionMismatch("generators of different dimension")
        if add_lattice:
            for i in range(dim):
                e = AffineElement.translation(tuple(int(i == j) for j in range(dim)))
                if e not in gens:
                    gens.insert(i, e)
        return cls(dim, tuple(gens), name, point_group)

    @cached_property
    def point_group(self) -> PointGroup:
        if self._point_group is not None:
            return self._point_group
        lins = []
        for g in self.gens:
            if g.lin != la.identity(self.dim) and g.lin not in lins:
                lins.append(g.lin)
        return closure(lins or [la.identity(self.dim)], DEFAULT_CLOSURE_CAP, dim=self.dim)


# ---------------------------------------------------------------------------
# group definition files

def group_from_dict(data: dict) -> CrystGroup:
    try:
        dim = int(data["dim"])
        gens = []
        for g in data["generators"]:
            lin = g["linear"]
            if any(isinstance(x, float) or isinstance(x, bool) for x in lin):
                raise ParseError("linear parts must be integers")
            A = la.from_flat([int(x) for x in lin], dim)
            v = tuple(la.parse_rational(x) for x in g.get("translation", ["0"] * dim))
            if len(v) != dim:
                raise ParseError(f"translation has length {len(v)}, expected {dim}")
            gens.append(AffineElement(A, v))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed group definition: {exc}") from exc
    return CrystGroup.from_generators(gens, dim=dim, name=data.get("name", ""))


def group_to_dict(G: CrystGroup) -> dict:
    return {
        "dim": G.dim,
        "generators": [
            {"linear": list(la.flat(g.lin)), "translation": [la.format_rational(x) for x in g.trans]}
            for g in G.gens
        ],
    }


def load_group(path) -> CrystGroup:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return group_from_dict(data)


# ---------------------------------------------------------------------------
# ball census

@dataclass
class BallStats:
    radius: int
    total: int
    torsion: int
    per_coset: dict  # linear part -> (count, torsion count)
    generating_set_size: int
    group_order: int

    def coset(self, A) -> tuple[int, int]:
        return self.per_coset.get(la.as_matrix(A), (0, 0))


def symmetrize(S) -> list[AffineElement]:
    out = []
    for s in S:
        for t in (s, inverse(s)):
            if t not in out and t != AffineElement.identity(s.dim):
                out.append(t)
    return out


def ball_sequence(G: CrystGroup, radii, S=None, max_elements: int = DEFAULT_MAX_BALL,
                  order_cap: int | None = None) -> list[BallStats]:
    """Census of B_S(r) for every r in ``radii`` from a single BFS.

    Elements are keyed exactly: linear part plus the translation scaled to
    integers by the common denominator of the generators' translations
    (all products stay in that lattice).
    """
    radii = sorted(set(int(r) for r in radii))
    if not radii or radii[0] < 0:
        raise ValueError("radii must be non-negative")
    S = symmetrize(G.gens if S is None else S)
    n = G.dim
    cap = torsion_order_cap(n) if order_cap is None else order_cap
    D = math.lcm(1, *(x.denominator for s in S for x in s.trans))
    gens = [(s.lin, tuple(int(x * D) for x in s.trans)) for s in S]
    group_order = G.point_group.order

    step_cache: dict = {}
    norm_cache: dict = {}

    def norm_of(A):
        N = norm_cache.get(A)
        if N is None:
            N = norm_cache[A] = _orbit_sum(A, la.mat_order(A, cap))
        return N

    def torsion(A, t) -> bool:
        N = norm_of(A)
        return not any(sum(a * x for a, x in zip(row, t)) for row in N)

    I = la.identity(n)
    start = (I, (0,) * n)
    seen = {start}
    frontier = [start]
    per_coset = {I: [1, 1]}
    total, tors = 1, 1
    out = []
    want = set(radii)
    if 0 in want:
        out.append(_snapshot(0, total, tors, per_coset, len(S), group_order))
    for r in range(1, radii[-1] + 1):
        nxt = []
        for A, t in frontier:
            for gi, (B, w) in enumerate(gens):
                key = (A, gi)
                step = step_cache.get(key)
                if step is None:
                    step = step_cache[key] = (la.mat_mul(A, B), la.mat_vec(A, w))
                AB, shift = step
                elem = (AB, tuple(a + b for a, b in zip(t, shift)))
                if elem in seen:
                    continue
                seen.add(elem)
                nxt.append(elem)
                is_t = torsion(AB, elem[1])
                c = per_coset.get(AB)
                if c is None:
                    c = per_coset[AB] = [0, 0]
                c[0] += 1
                total += 1
                if is_t:
                    c[1] += 1
                    tors += 1
            if total > max_elements:
                raise BallTooLarge(f"ball of radius {r} exceeds {max_elements} elements", radius=r)
        frontier = nxt
        if r in want:
            out.append(_snapshot(r, total, tors, per_coset, len(S), group_order))
    return out


def _snapshot(r, total, tors, per_coset, gsize, group_order) -> BallStats:
    return BallStats(r, total, tors, {A: tuple(c) for A, c in per_coset.items()}, gsize, group_order)


def ball_bfs(G: CrystGroup, S=None, r: int = 0, max_elements: int = DEFAULT_MAX_BALL,
             order_cap: int | None = None) -> BallStats:
    return ball_sequence(G, [r], S, max_elements, order_cap)[0]


def empirical_density(stats: BallStats) -> Fraction:
    if stats.total <= 0:
        raise ValueError("empty ball")
    return Fraction(stats.torsion, stats.total)


def coset_equidistribution(stats: BallStats, group_order: int | None = None) -> Fraction:
    """Worst |coset share - 1/|F|| over all cosets, empty ones included."""
    k = group_order or stats.group_order
    target = Fraction(1, k)
    devs = [abs(Fraction(c, stats.total) - target) for c, _ in stats.per_coset.values()]
    if len(stats.per_coset) < k:
        devs.append(target)
    return max(devs)


def _loglog_slope(xs, ys) -> float:
    slope, _ = statistics.linear_regression([math.log(x) for x in xs], [math.log(y) for y in ys])
    return slope


def growth_degree_fit(stats_list) -> float:
    """Least-squares slope of log |B(r)| against log r (an estimate)."""
    stats_list = sorted(stats_list, key=lambda s: s.radius)
    if len(stats_list) < 3 or stats_list[0].radius < 4:
        raise InsufficientData("need at least 3 radii, each >= 4")
    return _loglog_slope([s.radius for s in stats_list], [s.total for s in stats_list])


def torsion_coset_exponent(stats_list, A) -> float:
    """Slope of log(torsion count in the coset of A) against log r."""
    stats_list = sorted(stats_list, key=lambda s: s.radius)
    if len(stats_list) < 3:
        raise InsufficientData("need at least 3 radii")
    counts = [s.coset(A)[1] for s in stats_list]
    if any(c == 0 for c in counts):
        raise EmptyCoset(f"coset of {A} has no torsion at some radius")
    return _loglog_slope([s.radius for s in stats_list], counts)


def coset_representative(G: CrystGroup, A, max_elements: int = DEFAULT_MAX_BALL) -> AffineElement:
    """Some element of G with linear part A, found by BFS over words."""
    A = la.as_matrix(A)
    if A not in G.point_group:
        raise EmptyCoset(f"{A} is not in the point group")
    S = symmetrize(G.gens)
    start = AffineElement.identity(G.dim)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for g in frontier:
            if g.lin == A:
                return g
            for s in S:
                h = compose(g, s)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        if len(seen) > max_elements:
            break
        frontier = nxt
    raise EmptyCoset(f"no element with linear part {A} found")


def full_coset_check(G: CrystGroup, A, box_radius: int) -> bool:
    """Every (v + l, A) with l in the lattice box |l|_inf <= box_radius is torsion.

    The A-coset of G is rep * Z^n = {(v + l, A)}, so the box is exactly the
    set of coset elements whose translation lies within box_radius of rep's.
    """
    A = la.as_matrix(A)
    if la.has_eigenvalue_one(A):
        raise EigenvalueOnePresent(f"{A} has eigenvalue 1")
    rep = coset_representative(G, A)
    rng = range(-box_radius, box_radius + 1)
    for shift in itertools.product(rng, repeat=G.dim):
        v = tuple(a + b for a, b in zip(rep.trans, shift))
        if not is_torsion(AffineElement(A, v)):
            return False
    return True
