"""
Tests for the canonical filtration and its polygon.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.core.posreal import epr_format, epr_from_rat
from src.lattice.filtration import (
    brute_force_filtration,
    canonical_polygon,
    check_ds_bounds,
    check_ds_product,
    gs_filtration,
    is_semistable,
    is_stable,
    polygon_is_concave,
    verify_dual_reversal,
    verify_filtration,
    verify_isometry_transport,
    verify_scale_equivariance,
)
from src.lattice.gram import diagonal_lattice, make_lattice, sublattice
from src.experiments.runner import describe_filtration

A2 = [[2, 1], [1, 2]]


def _heights(filtration):
    return [epr_format(h.sq_reduced) for h in filtration.step_sq_heights]


def test_hexagonal_is_semistable():
    a2 = make_lattice(A2)
    filtration = gs_filtration(a2)
    assert filtration.length == 1
    assert describe_filtration(filtration) == "semistable, H_r^2 = 3^(1/2)"
    assert is_stable(a2)


def test_standard_lattice_is_semistable_not_stable():
    z2 = diagonal_lattice(1, 1)
    assert is_semistable(z2)
    assert not is_stable(z2)


def test_destabilizing_vector():
    filtration = gs_filtration(diagonal_lattice(1, 4))
    assert filtration.length == 2
    assert filtration.destabilizer.basis == ((1, 0),)
    assert _heights(filtration) == ["1", "4"]
    assert filtration.polygon == [(0, epr_from_rat(1)), (1, epr_from_rat(1)), (2, epr_from_rat(4))]


def test_product_with_dual_has_three_steps():
    """diag(1,4,1,1/4): E_1 = span e4, then span(e1, e3, e4)."""
    lattice = diagonal_lattice(1, 4, 1, Fraction(1, 4))
    filtration = gs_filtration(lattice)
    assert filtration.length == 3
    assert filtration.step(1).basis == ((0, 0, 0, 1),)
    assert filtration.step(2).basis == ((1, 0, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    assert _heights(filtration) == ["1/4", "1", "4"]
    assert describe_filtration(filtration) == "unstable, length 3, quotient H_r^2 = 1/4 < 1 < 4"
    assert [d for d, _ in filtration.polygon] == [0, 1, 3, 4]


def test_rank_two_destabilizer():
    filtration = gs_filtration(diagonal_lattice(1, 1, 4))
    assert [s.rank for s in filtration.steps] == [2, 3]


def test_verification_report():
    lattice = diagonal_lattice(1, 4, 1, Fraction(1, 4))
    report = verify_filtration(lattice, gs_filtration(lattice))
    assert report.passed
    assert polygon_is_concave(canonical_polygon(lattice))


def test_filtration_to_dict():
    data = gs_filtration(diagonal_lattice(1, 4)).to_dict()
    assert data["length"] == 2
    assert data["polygon"] == [[0, "1"], [1, "1"], [2, "4"]]
    assert data["certified"] is True


@pytest.mark.parametrize("lattice", [
    diagonal_lattice(1, 4),
    diagonal_lattice(1, 1, 4),
    diagonal_lattice(1, 4, 1, Fraction(1, 4)),
    make_lattice(A2),
])
def test_dual_reversal(lattice):
    assert verify_dual_reversal(lattice).passed


def test_scale_equivariance():
    assert verify_scale_equivariance(diagonal_lattice(1, 1, 4), "2/3").passed


def test_isometry_transport():
    u = [[1, 1, 0], [0, 1, 0], [0, 0, 1]]
    assert verify_isometry_transport(diagonal_lattice(1, 1, 4), u).passed


def test_extension_and_product_bounds():
    lattice = diagonal_lattice(1, 4)
    assert check_ds_bounds(lattice, sublattice(lattice, [[0, 1]])).passed
    assert check_ds_product(make_lattice(A2), lattice).passed



@pytest.mark.parametrize("gram", [
    [[1, 0, 0], [0, 1, 0], [0, 0, 4]],
    [[2, 1, 0], [1, 3, 1], [0, 1, 5]],
    [["3/2", "1/2"], ["1/2", 4]],
])
def test_matches_unpruned_oracle(gram):
    lattice = make_lattice(gram)
    fast = gs_filtration(lattice)
    slow = brute_force_filtration(lattice)
    assert [s.basis for s in fast.steps] == [s.basis for s in slow.steps]
    assert fast.step_sq_heights == slow.step_sq_heights
