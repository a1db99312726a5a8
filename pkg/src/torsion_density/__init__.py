"""Exact torsion densities of crystallographic and almost-crystallographic groups."""

from .affine_cryst import (
    AffineElement,
    BallStats,
    CrystGroup,
    ball_bfs,
    ball_sequence,
    compose,
    coset_equidistribution,
    empirical_density,
    full_coset_check,
    growth_degree_fit,
    inverse,
    is_torsion,
    torsion_coset_exponent,
    torsion_order,
)
from .constructors import (
    CatalogEntry,
    direct_product,
    gamma_m,
    load_catalog,
    rational_density_group,
    zn,
)
from .nilpotent import (
    NilAlgebra,
    NilAutomorphism,
    NilElement,
    bch_multiply,
    h2_automorphism,
    heisenberg,
    lower_central_series,
    nil_ball_bfs,
)
from .point_group import DensityReport, PointGroup, closure, density_exact, odd_dim_bound_check

__version__ = "0.1.0"
