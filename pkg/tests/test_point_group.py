from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsion_density import exact_linalg as la
from torsion_density.constructors import embedded_3d_point_groups, load_catalog
from torsion_density.errors import DimensionNotOdd, GroupTooLarge, InfiniteOrderGenerator
from torsion_density.point_group import PointGroup, closure, conjugate, density_exact, odd_dim_bound_check

D2_GENS = [((1, 0), (0, -1)), ((-1, 0), (0, 1))]
ROT3 = ((0, -1), (1, -1))
HEX_MIRROR = ((0, -1), (-1, 0))


def test_closure_examples():
    assert closure([((-1, 0), (0, -1))]).order == 2
    D2 = closure(D2_GENS)
    assert set(D2.elements) == {la.identity(2), ((-1, 0), (0, -1)), ((1, 0), (0, -1)), ((-1, 0), (0, 1))}
    assert closure([((1, -1), (1, 0))]).order == 6


def test_closure_is_sorted_and_closed():
    G = closure([ROT3, HEX_MIRROR])
    assert list(G.elements) == sorted(G.elements)
    for A in G.elements:
        for B in G.elements:
            assert la.mat_mul(A, B) in G
        assert la.int_inverse(A) in G


def test_closure_errors():
    with pytest.raises(InfiniteOrderGenerator):
        closure([((1, 1), (0, 1))])
    with pytest.raises(GroupTooLarge):
        closure([ROT3, HEX_MIRROR], cap=4)


@pytest.mark.parametrize("gens, expected", [
    ([la.identity(2)], Fraction(0)),
    (D2_GENS, Fraction(1, 4)),
    ([((1, -1), (1, 0))], Fraction(5, 6)),
    ([ROT3, HEX_MIRROR], Fraction(1, 3)),
])
def test_density_examples(gens, expected):
    rep = density_exact(closure(gens))
    assert rep.density == expected
    assert rep.m == expected * rep.group_order


def test_report_per_element_flags():
    rep = density_exact(closure([ROT3, HEX_MIRROR]))
    rotations = [r for r in rep.per_element if la.mat_det(r.matrix) == 1]
    assert {r.order for r in rotations} == {1, 3}
    assert sum(not r.has_eigenvalue_one for r in rep.per_element) == 2
    ident = next(r for r in rep.per_element if r.matrix == la.identity(2))
    assert ident.has_eigenvalue_one and ident.order == 1


def test_density_below_one_everywhere():
    for e in load_catalog():
        rep = density_exact(e.group.point_group)
        assert 0 <= rep.m < rep.group_order


def random_unimodular(rng_draws, n):
    U = la.identity(n)
    for i, j, c in rng_draws:
        if i % n == j % n:
            continue
        E = [list(r) for r in la.identity(n)]
        E[i % n][j % n] = c
        U = la.mat_mul(U, la.as_matrix(E))
    return U


elementary_draws = st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(-3, 3)), max_size=8)


@settings(max_examples=40, deadline=None)
@given(elementary_draws, st.sampled_from([e.name for e in load_catalog()]))
def test_conjugation_invariance(draws, name):
    F = next(e for e in load_catalog() if e.name == name).group.point_group
    U = random_unimodular(draws, 2)
    assert density_exact(conjugate(F, U)).density == density_exact(F).density


def test_product_multiplicative_against_materialised_closure():
    cat = {e.name: e.group.point_group for e in load_catalog()}
    for a, b in [("pmm", "p3"), ("p6", "p2"), ("p4m", "p31m"), ("p1", "p6")]:
        F1, F2 = cat[a], cat[b]
        P = PointGroup.product(F1, F2)
        flat = closure(P.generators)
        assert flat.order == F1.order * F2.order
        assert set(flat.elements) == set(P.elements)
        expected = density_exact(F1).density * density_exact(F2).density
        assert density_exact(P).density == expected == density_exact(flat).density


def test_product_per_element_lazy():
    cat = {e.name: e.group.point_group for e in load_catalog()}
    rep = density_exact(PointGroup.product(cat["p4"], cat["p2"]))
    assert len(rep.per_element) == 8
    assert sum(not r.has_eigenvalue_one for r in rep.per_element) == rep.m == 3


def test_odd_dim_bound_examples():
    minus = closure([la.mat_scale(-1, la.identity(3))])
    assert odd_dim_bound_check(minus)
    assert density_exact(minus).density == Fraction(1, 2)
    assert odd_dim_bound_check(closure([la.identity(3)]))
    with pytest.raises(DimensionNotOdd):
        odd_dim_bound_check(closure(D2_GENS))


def test_odd_dim_conjugated_rotation():
    F = embedded_3d_point_groups()["4 (conjugated)"]
    assert F.order == 4
    assert odd_dim_bound_check(F)
    for A in F.elements:
        if la.mat_det(A) == 1:
            assert la.has_eigenvalue_one(A)


def test_odd_dim_all_embedded_examples():
    for name, F in embedded_3d_point_groups().items():
        assert F.dim == 3
        assert odd_dim_bound_check(F), name
