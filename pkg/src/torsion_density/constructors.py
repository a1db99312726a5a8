"""Groups with prescribed torsion density, and the plane-group catalog."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from . import exact_linalg as la
from .affine_cryst import AffineElement, CrystGroup, group_from_dict
from .errors import CatalogValidationFailed, ConstructionInvariantFailed, InvalidRational
from .point_group import PointGroup, closure, density_exact


def zn(n: int) -> CrystGroup:
    """The lattice Z^n with its standard basis as generating set."""
    return CrystGroup.from_generators([], dim=n, name=f"Z^{n}")


def gamma_m(m: int) -> CrystGroup:
    """Z^phi(m) extended by the companion matrix T of the m-th cyclotomic
    polynomial; its torsion density is (m - 1)/m."""
    if m < 2:
        raise ValueError("m must be at least 2")
    T = la.companion(la.cyclotomic(m))
    n = len(T)
    if la.mat_order(T, m) != m:
        raise ConstructionInvariantFailed(f"companion matrix for m={m} does not have order m")
    P = T
    for i in range(1, m):
        if la.has_eigenvalue_one(P):
            raise ConstructionInvariantFailed(f"T^{i} has eigenvalue 1 for m={m}")
        P = la.mat_mul(P, T)
    return CrystGroup.from_generators([AffineElement(T, (0,) * n)], dim=n, name=f"Gamma_{m}")


def _embed(g: AffineElement, offset: int, total: int) -> AffineElement:
    n = g.dim
    blocks = [la.identity(offset), g.lin, la.identity(total - offset - n)]
    lin = la.block_diag(*(b for b in blocks if b))
    trans = (0,) * offset + g.trans + (0,) * (total - offset - n)
    return AffineElement(lin, trans)


def direct_product(G1: CrystGroup, G2: CrystGroup) -> CrystGroup:
    n = G1.dim + G2.dim
    gens = [_embed(g, 0, n) for g in G1.gens] + [_embed(g, G1.dim, n) for g in G2.gens]
    name = f"{G1.name} x {G2.name}" if G1.name and G2.name else ""
    return CrystGroup.from_generators(
        gens, dim=n, name=name, point_group=PointGroup.product(G1.point_group, G2.point_group)
    )


def rational_density_group(p: int, q: int) -> CrystGroup:
    """Gamma_{p+1} x ... x Gamma_q, whose density telescopes to p/q.

    p/q = 0 gives Z^1 (torsion-free, density 0).
    """
    if q < 1 or p < 0 or p >= q:
        raise InvalidRational(f"{p}/{q} is not in [0, 1)")
    if p == 0:
        return zn(1)
    G = gamma_m(p + 1)
    for m in range(p + 2, q + 1):
        G = direct_product(G, gamma_m(m))
    return G


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    name: str
    dim: int
    group: CrystGroup
    expected_density: Fraction


@lru_cache(maxsize=1)
def _catalog_data() -> dict:
    text = resources.files("torsion_density").joinpath("data/wallpaper.json").read_text()
    return json.loads(text)


def load_catalog(data: dict | None = None) -> list[CatalogEntry]:
    """Load the plane-group catalog, recomputing every stored density."""
    data = _catalog_data() if data is None else data
    entries = []
    for raw in data["groups"]:
        name = raw.get("name", "?")
        try:
            G = group_from_dict(raw)
            expected = la.parse_rational(raw["expected_density"])
        except Exception as exc:
            raise CatalogValidationFailed(f"{name}: {exc}") from exc
        got = density_exact(G.point_group).density
        if got != expected:
            raise CatalogValidationFailed(f"{name}: stored density {expected} but census gives {got}")
        entries.append(CatalogEntry(name, G.dim, G, expected))
    return entries


def catalog_entry(name: str) -> CatalogEntry:
    for e in load_catalog():
        if e.name == name:
            return e
    raise KeyError(f"no catalog group named {name!r}")


def embedded_3d_point_groups() -> dict[str, PointGroup]:
    """A handful of 3-dimensional holonomy groups used for the odd-dimension bound."""
    I3 = la.identity(3)
    minus = la.mat_scale(-1, I3)
    rot4 = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
    U = ((1, 2, 0), (0, 1, 3), (1, 2, 1))  # det 1
    Uinv = la.int_inverse(U)
    rot4_conj = la.mat_mul(U, la.mat_mul(rot4, Uinv))
    rot6 = la.block_diag(((1, -1), (1, 0)), ((1,),))
    groups = {
        "1": closure([I3]),
        "-1": closure([minus]),
        "4 (conjugated)": closure([rot4_conj]),
        "4/m": closure([rot4, minus]),
        "6/mmm": closure([rot6, la.block_diag(((0, -1), (-1, 0)), ((1,),)), minus]),
        "-3m (rhombohedral)": closure([((0, 0, 1), (1, 0, 0), (0, 1, 0)), ((0, -1, 0), (-1, 0, 0), (0, 0, -1)), minus]),
        "m-3m": closure([rot4, ((0, 0, 1), (1, 0, 0), (0, 1, 0)), minus]),
        "p6 x Gamma_2": PointGroup.product(gamma_m(6).point_group, gamma_m(2).point_group),
        "Gamma_3 x Gamma_2": PointGroup.product(gamma_m(3).point_group, gamma_m(2).point_group),
    }
    return groups
