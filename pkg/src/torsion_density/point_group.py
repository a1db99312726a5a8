"""Finite holonomy groups F inside GL(n, Z) and their eigenvalue-1 census."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import exact_linalg as la
from .errors import DimensionNotOdd, GroupTooLarge, InfiniteOrderGenerator, OrderExceedsCap

DEFAULT_CLOSURE_CAP = 1024


@dataclass(frozen=True, eq=False)
class PointGroup:
    """A finite matrix group stored as an explicit, sorted element tuple.

    Direct products keep their factors so that a census can run over the
    factor elements without materialising every block-diagonal matrix;
    ``elements`` still yields the full list on request.
    """

    dim: int
    generators: tuple
    _elements: tuple | None = None
    factors: tuple = ()

    @cached_property
    def elements(self) -> tuple:
        if self._elements is not None:
            return self._elements
        combos = itertools.product(*(f.elements for f in self.factors))
        return tuple(sorted(la.block_diag(*c) for c in combos))

    @property
    def order(self) -> int:
        if self.factors:
            return math.prod(f.order for f in self.factors)
        return len(self.elements)

    def __len__(self):
        return self.order

    def __contains__(self, A) -> bool:
        return A in self._element_set

    @cached_property
    def _element_set(self) -> frozenset:
        return frozenset(self.elements)

    @classmethod
    def product(cls, *groups: "PointGroup") -> "PointGroup":
        flat_factors = []
        for g in groups:
            flat_factors.extend(g.factors or (g,))
        dim = sum(f.dim for f in flat_factors)
        gens = []
        for i, f in enumerate(flat_factors):
            for A in f.generators:
                blocks = [la.identity(g.dim) for g in flat_factors]
                blocks[i] = A
                gens.append(la.block_diag(*blocks))
        return cls(dim=dim, generators=tuple(gens), factors=tuple(flat_factors))


def closure(generators, cap: int = DEFAULT_CLOSURE_CAP, dim: int | None = None) -> PointGroup:
    """Breadth-first product closure of a set of integer matrices."""
    gens = [la.as_matrix(g) for g in generators]
    if dim is None:
        if not gens:
            raise ValueError("cannot infer the dimension of an empty generating set")
        dim = len(gens[0])
    for g in gens:
        if len(g) != dim or any(len(row) != dim for row in g):
            raise ValueError("all generators must be square of the same dimension")
        try:
            la.mat_order(g, la.default_order_cap(dim))
        except OrderExceedsCap as exc:
            raise InfiniteOrderGenerator(f"generator {g} has no finite order") from exc
    I = la.identity(dim)
    seen = {I}
    frontier = [I]
    while frontier:
        nxt = []
        for A in frontier:
            for g in gens:
                B = la.mat_mul(A, g)
                if B not in seen:
                    seen.add(B)
                    if len(seen) > cap:
                        raise GroupTooLarge(f"closure exceeded {cap} elements")
                    nxt.append(B)
        frontier = nxt
    # finite order generators make right multiplication enough: inverses are powers
    return PointGroup(dim=dim, generators=tuple(gens), _elements=tuple(sorted(seen)))


@dataclass(frozen=True, eq=False)
class ElementRecord:
    matrix: tuple
    has_eigenvalue_one: bool
    order: int


@dataclass(eq=False)
class DensityReport:
    group: PointGroup
    group_order: int
    m: int
    density: Fraction
    _records: tuple | None = field(default=None, repr=False)

    @cached_property
    def per_element(self) -> tuple:
        if self._records is not None:
            return self._records
        return tuple(_record(A) for A in self.group.elements)


def _record(A) -> ElementRecord:
    return ElementRecord(A, la.has_eigenvalue_one(A), la.mat_order(A))


def density_exact(F: PointGroup) -> DensityReport:
    """m/|F| where m counts elements with det(A - I) != 0.

    For a product group det(A - I) is the product of the blockwise
    determinants, so an element lacks eigenvalue 1 exactly when every block
    does; the census walks the factor tuples with cached block flags.
    """
    if F.factors:
        flags = [[not la.has_eigenvalue_one(A) for A in f.elements] for f in F.factors]
        m = sum(1 for combo in itertools.product(*flags) if all(combo))
        return DensityReport(F, F.order, m, Fraction(m, F.order))
    records = tuple(_record(A) for A in F.elements)
    m = sum(1 for r in records if not r.has_eigenvalue_one)
    return DensityReport(F, len(records), m, Fraction(m, len(records)), records)


def odd_dim_bound_check(F: PointGroup) -> bool:
    """Density <= 1/2 in odd dimension, plus the reason why: every
    orientation-preserving element fixes a line."""
    if F.dim % 2 == 0:
        raise DimensionNotOdd(f"dimension {F.dim} is even")
    for A in F.elements:
        if la.mat_det(A) == 1 and not la.has_eigenvalue_one(A):
            return False
    return density_exact(F).density <= Fraction(1, 2)


def conjugate(F: PointGroup, U) -> PointGroup:
    """U F U^-1 for a unimodular U."""
    Uinv = la.int_inverse(U)
    if Uinv is None:
        raise ValueError("conjugating matrix must be unimodular")
    conj = lambda A: la.mat_mul(U, la.mat_mul(A, Uinv))
    return PointGroup(
        dim=F.dim,
        generators=tuple(conj(g) for g in F.generators),
        _elements=tuple(sorted(conj(A) for A in F.elements)),
    )
