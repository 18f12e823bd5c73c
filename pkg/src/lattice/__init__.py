"""
Gram lattices, Rankin minima and the slope filtration.

- gram: lattices, sublattices, heights, duals, quotients and products
- enumeration: exact short-vector enumeration
- rankin: certified Rankin minima and H_min
- filtration: the canonical filtration and stability predicates
"""
from .gram import (
    GramLattice,
    Sublattice,
    SqHeight,
    make_lattice,
    diagonal_lattice,
    height,
    cmp_reduced,
    dual,
    sublattice,
    quotient,
    perp,
    direct_product,
    tensor_product,
    scale,
)
from .enumeration import short_vectors, minimum
from .rankin import RankinProfile, MinFlag, rankin_min, rankin_profile, h_min
from .filtration import Filtration, gs_filtration, canonical_polygon, is_semistable, is_stable

__all__ = [
    "GramLattice",
    "Sublattice",
    "SqHeight",
    "make_lattice",
    "diagonal_lattice",
    "height",
    "cmp_reduced",
    "dual",
    "sublattice",
    "quotient",
    "perp",
    "direct_product",
    "tensor_product",
    "scale",
    "short_vectors",
    "minimum",
    "RankinProfile",
    "MinFlag",
    "rankin_min",
    "rankin_profile",
    "h_min",
    "Filtration",
    "gs_filtration",
    "canonical_polygon",
    "is_semistable",
    "is_stable",
]
