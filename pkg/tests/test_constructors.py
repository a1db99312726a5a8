import copy
from fractions import Fraction

import pytest

from torsion_density import exact_linalg as la
from torsion_density.constructors import (
    _catalog_data,
    catalog_entry,
    direct_product,
    gamma_m,
    load_catalog,
    rational_density_group,
    zn,
)
from torsion_density.errors import CatalogValidationFailed, InvalidRational
from torsion_density.point_group import closure, density_exact


def density(G):
    return density_exact(G.point_group).density


@pytest.mark.parametrize("m, dim, T", [
    (2, 1, ((-1,),)),
    (3, 2, ((0, -1), (1, -1))),
    (4, 2, ((0, -1), (1, 0))),
])
def test_gamma_m_examples(m, dim, T):
    G = gamma_m(m)
    assert G.dim == dim
    assert any(g.lin == T for g in G.gens)
    assert density(G) == Fraction(m - 1, m)


@pytest.mark.parametrize("m", range(2, 13))
def test_gamma_m_ladder(m):
    G = gamma_m(m)
    assert G.dim == la.euler_phi(m)
    assert G.point_group.order == m
    assert density(G) == Fraction(m - 1, m)


def test_direct_product_examples():
    assert density(direct_product(zn(1), gamma_m(2))) == 0
    G = direct_product(gamma_m(2), gamma_m(2))
    assert G.dim == 2
    assert density(G) == Fraction(1, 4)
    assert density(direct_product(gamma_m(2), gamma_m(3))) == Fraction(1, 3)


def test_direct_product_point_group_is_honest():
    G = direct_product(gamma_m(3), gamma_m(4))
    lins = [g.lin for g in G.gens if g.lin != la.identity(G.dim)]
    flat = closure(lins)
    assert set(flat.elements) == set(G.point_group.elements)
    assert density_exact(flat).density == density(G) == Fraction(1, 2)


def test_direct_product_catalog_pairs():
    cat = load_catalog()
    for a in cat:
        for b in cat:
            assert density(direct_product(a.group, b.group)) == a.expected_density * b.expected_density


@pytest.mark.parametrize("p, q, dim", [(0, 1, 1), (1, 2, 1), (2, 5, 8), (2, 4, 4)])
def test_rational_density_examples(p, q, dim):
    G = rational_density_group(p, q)
    assert G.dim == dim
    assert density(G) == Fraction(p, q)


def test_rational_two_fifths_order():
    assert rational_density_group(2, 5).point_group.order == 60


def test_rational_density_all_small():
    for q in range(1, 9):
        for p in range(q):
            assert density(rational_density_group(p, q)) == Fraction(p, q)


@pytest.mark.parametrize("p, q", [(1, 1), (3, 2), (-1, 2), (0, 0)])
def test_rational_density_invalid(p, q):
    with pytest.raises(InvalidRational):
        rational_density_group(p, q)


def test_catalog_contents():
    cat = load_catalog()
    assert len(cat) == 17
    assert len({e.name for e in cat}) == 17
    by_name = {e.name: e.expected_density for e in cat}
    assert by_name["p1"] == 0
    assert by_name["pmm"] == Fraction(1, 4)
    assert by_name["p6"] == Fraction(5, 6)
    assert by_name["p3m1"] == Fraction(1, 3)
    assert all(0 <= d <= Fraction(5, 6) for d in by_name.values())
    assert max(by_name.values()) == Fraction(5, 6)
    assert [n for n, d in by_name.items() if d == Fraction(5, 6)] == ["p6"]


def test_catalog_point_group_orders():
    orders = {e.name: e.group.point_group.order for e in load_catalog()}
    assert orders == {
        "p1": 1, "p2": 2, "pm": 2, "pg": 2, "cm": 2, "pmm": 4, "pmg": 4, "pgg": 4, "cmm": 4,
        "p4": 4, "p4m": 8, "p4g": 8, "p3": 3, "p3m1": 6, "p31m": 6, "p6": 6, "p6m": 12,
    }


def test_catalog_validation_catches_bad_entry():
    data = copy.deepcopy(_catalog_data())
    data["groups"][5]["expected_density"] = "1/3"
    with pytest.raises(CatalogValidationFailed, match="pmm"):
        load_catalog(data)


def test_catalog_product_with_line_has_density_zero():
    for e in load_catalog():
        assert density(direct_product(e.group, zn(1))) == 0


def test_catalog_entry_lookup():
    assert catalog_entry("p4m").group.point_group.order == 8
    with pytest.raises(KeyError):
        catalog_entry("p7")
