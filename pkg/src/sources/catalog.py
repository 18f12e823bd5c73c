"""
Built-in lattices.

Integer lattices Z1..Z8, the root lattices A2, A3, D4 and E8, a few
diagonal lattices with a destabilizing vector, and products E × E^∨ of
those with their duals.
"""
import logging
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from src.core.rational import block_diag
from src.lattice.gram import GramLattice, diagonal_lattice, dual, make_lattice
from src.utils.errors import InvariantViolation, UnknownCatalogEntry
from .base_source import BaseLatticeSource, LatticeEntry

logger = logging.getLogger(__name__)

A2 = [[2, 1], [1, 2]]

A3 = [
    [2, -1, 0],
    [-1, 2, -1],
    [0, -1, 2],
]

D4 = [
    [2, -1, 0, 0],
    [-1, 2, -1, -1],
    [0, -1, 2, 0],
    [0, -1, 0, 2],
]

# Cartan matrix of E8 (Bourbaki labelling, node 2 attached to node 4)
E8 = [
    [2, 0, -1, 0, 0, 0, 0, 0],
    [0, 2, 0, -1, 0, 0, 0, 0],
    [-1, 0, 2, -1, 0, 0, 0, 0],
    [0, -1, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, -1],
    [0, 0, 0, 0, 0, 0, -1, 2],
]

_Builder = Callable[[], GramLattice]


def _with_dual(base: GramLattice) -> GramLattice:
    return GramLattice(block_diag(base.gram, dual(base).gram))


def _entries() -> Dict[str, Tuple[_Builder, str, Fraction]]:
    """name -> (builder, description, expected determinant)"""
    entries: Dict[str, Tuple[_Builder, str, Fraction]] = {}
    for n in range(1, 9):
        entries[f"Z{n}"] = (lambda n=n: diagonal_lattice(*([1] * n)), f"standard lattice of rank {n}", Fraction(1))
    entries["A2"] = (lambda: make_lattice(A2), "hexagonal root lattice", Fraction(3))
    entries["A3"] = (lambda: make_lattice(A3), "root lattice A3", Fraction(4))
    entries["D4"] = (lambda: make_lattice(D4), "root lattice D4", Fraction(4))
    entries["E8"] = (lambda: make_lattice(E8), "even unimodular root lattice", Fraction(1))
    entries["diag_1_4"] = (lambda: diagonal_lattice(1, 4), "unstable, destabilized by e1", Fraction(4))
    entries["diag_1_9"] = (lambda: diagonal_lattice(1, 9), "unstable, destabilized by e1", Fraction(9))
    entries["diag_1_1_4"] = (lambda: diagonal_lattice(1, 1, 4), "unstable, rank-2 destabilizer", Fraction(4))
    entries["diag_1_4xdual"] = (
        lambda: _with_dual(diagonal_lattice(1, 4)), "diag(1,4) x its dual", Fraction(1)
    )
    entries["diag_1_9xdual"] = (
        lambda: _with_dual(diagonal_lattice(1, 9)), "diag(1,9) x its dual", Fraction(1)
    )
    entries["A2xdual"] = (lambda: _with_dual(make_lattice(A2)), "A2 x its dual", Fraction(1))
    return entries


ALIASES = {
    "diag(1,4)": "diag_1_4",
    "diag(1,9)": "diag_1_9",
    "diag(1,1,4)": "diag_1_1_4",
}


class CatalogSource(BaseLatticeSource):
    """The built-in catalog."""

    def __init__(self):
        self._entries = _entries()
        self._built: Dict[str, GramLattice] = {}

    def get_source_name(self) -> str:
        return "catalog"

    def available(self) -> List[str]:
        return sorted(self._entries)

    def knows(self, name: str) -> bool:
        return ALIASES.get(name, name) in self._entries

    def fetch(self, reference: str) -> LatticeEntry:
        """
        Raises:
            UnknownCatalogEntry: the name is not in the catalog
            InvariantViolation: a built-in Gram has the wrong determinant
        """
        name = ALIASES.get(reference, reference)
        if name not in self._entries:
            raise UnknownCatalogEntry(reference, self.available())
        builder, description, expected_det = self._entries[name]
        if name not in self._built:
            lattice = builder().named(name)
            if lattice.det != expected_det:
                raise InvariantViolation(f"catalog entry {name} has det {lattice.det}, expected {expected_det}")
            self._built[name] = lattice
        return LatticeEntry(name, self._built[name], description, self.get_source_name())


_catalog = None


def get_catalog() -> CatalogSource:
    global _catalog
    if _catalog is None:
        _catalog = CatalogSource()
    return _catalog


def catalog(name: str) -> GramLattice:
    """
    Built-in lattice by name.

    Raises:
        UnknownCatalogEntry: lists the available names
    """
    return get_catalog().load(name)


def catalog_entries() -> List[LatticeEntry]:
    source = get_catalog()
    return [source.fetch(name) for name in source.available()]
