"""
Tests for automorphism groups, isometries and isoduality witnesses.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.lattice.gram import diagonal_lattice, dual, make_lattice, scale
from src.sources.catalog import catalog
from src.symmetry.isometry import are_isometric, automorphisms, group_elements, is_isometry, isometries
from src.symmetry.isoduality import (
    ORTHOGONAL,
    SYMPLECTIC,
    MultiplicityFreeClaim,
    check_multiplicity_free,
    check_witt_index,
    is_isodual,
    isoduality_ratio,
    isoduality_witness,
    signature_certificate,
    verify_aut_invariance,
    verify_isodual_filtration,
    verify_tau_square_law,
    verify_witness,
)

A2 = [[2, 1], [1, 2]]


class TestAutomorphisms:
    """Automorphism group orders and generators."""

    @pytest.mark.parametrize("name,order", [("Z2", 8), ("Z3", 48), ("A2", 12)])
    def test_orders(self, name, order):
        group = automorphisms(catalog(name))
        assert group.complete
        assert group.order == order
        elements = group_elements(group, 100)
        assert len(elements) == order
        assert all(is_isometry(g, group.lattice, group.lattice) for g in elements)

    def test_diagonal_has_sign_changes_only(self):
        assert automorphisms(diagonal_lattice(1, 4)).order == 4

    def test_filtration_is_invariant(self):
        lattice = diagonal_lattice(1, 1, 4)
        report = verify_aut_invariance(lattice)
        assert report.passed
        assert report.data["order"] == 16


class TestIsometries:
    """Isometries between lattices."""

    def test_change_of_basis(self):
        a = make_lattice(A2)
        b = make_lattice([[2, -1], [-1, 2]])
        assert are_isometric(a, b)
        found = isometries(a, b)
        assert len(found) == 12
        assert all(is_isometry(u, a, b) for u in found.maps)

    def test_different_lattices(self):
        assert not are_isometric(diagonal_lattice(1, 4), diagonal_lattice(2, 2))
        assert not are_isometric(make_lattice(A2), diagonal_lattice(1, 3))


class TestIsoduality:
    """Witnesses, pairing types and the checks built on them."""

    def test_ratio(self):
        assert isoduality_ratio(diagonal_lattice(1, 4)) == Fraction(1, 4)
        assert isoduality_ratio(make_lattice(A2)) == Fraction(1, 3)
        assert isoduality_ratio(diagonal_lattice(1, 2)) == Fraction(1, 2)
        assert isoduality_ratio(diagonal_lattice(1, 1, 2)) is None

    def test_diagonal_is_orthogonal_and_symplectic(self):
        witness = isoduality_witness(diagonal_lattice(1, 4))
        assert witness.ratio == Fraction(1, 4)
        assert witness.types_realizable == frozenset({ORTHOGONAL, SYMPLECTIC})
        assert witness.orthogonal_map in (((0, 1), (1, 0)), ((0, -1), (-1, 0)))
        assert witness.signature == 0
        assert witness.witt_index == 1
        assert witness.symplectic_map is not None
        assert witness.complete

    def test_rank_two_rotation(self):
        lattice = diagonal_lattice(1, 4)
        assert verify_witness(lattice, ((0, -1), (1, 0))) == Fraction(1, 4)
        assert verify_witness(lattice, ((1, 0), (0, 1))) is None

    def test_hexagonal_witness(self):
        witness = isoduality_witness(make_lattice(A2))
        assert witness is not None
        assert verify_witness(witness.lattice, witness.map_u) == Fraction(1, 3)

    def test_not_isodual(self):
        assert isoduality_witness(diagonal_lattice(1, 1, 2)) is None
        # c = 1/2 is rational but L^v[2] has a vector of norm 1/2
        assert is_isodual(diagonal_lattice(1, 1, 1, 4)) is False
        assert is_isodual(diagonal_lattice(1, 2)) is True

    def test_scaled_dual_is_the_same_lattice(self):
        lattice = diagonal_lattice(1, 4)
        assert are_isometric(lattice, scale(dual(lattice), 4))

    def test_square_law(self):
        for lattice in (diagonal_lattice(1, 4), make_lattice(A2), diagonal_lattice(1, 4, 1, Fraction(1, 4))):
            witness = isoduality_witness(lattice)
            assert verify_tau_square_law(witness).passed

    def test_filtration_of_isodual_lattice(self):
        lattice = diagonal_lattice(1, 4, 1, Fraction(1, 4))
        witness = isoduality_witness(lattice)
        report = verify_isodual_filtration(lattice, witness)
        assert report.passed, [c.name for c in report.failures()]

    def test_signature_certificate(self):
        witness = isoduality_witness(diagonal_lattice(1, 4))
        certificate = signature_certificate(witness.lattice, witness, cross_validate=True)
        assert certificate.bound == 1
        assert not certificate.semistable
        assert certificate.cross_check.passed

    def test_definite_pairing_certifies_semistability(self):
        z2 = diagonal_lattice(1, 1)
        witness = isoduality_witness(z2)
        certificate = signature_certificate(z2, witness, cross_validate=True)
        assert abs(certificate.signature) == 2
        assert certificate.semistable
        assert certificate.cross_check.passed

    def test_witt_index_bound(self):
        witness = isoduality_witness(diagonal_lattice(1, 4))
        assert check_witt_index(witness.lattice, witness).passed

    def test_multiplicity_free_claim(self):
        a2 = make_lattice(A2)
        report = check_multiplicity_free(a2, MultiplicityFreeClaim([2], True, True))
        assert report.passed
        skipped = check_multiplicity_free(a2, MultiplicityFreeClaim([1, 1], False, True))
        assert not skipped.applicable
