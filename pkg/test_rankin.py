"""
Tests for Rankin minima, H_min and the destabilizing subspace.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.core.posreal import epr_format
from src.lattice.gram import diagonal_lattice, dual, make_lattice
from src.lattice.rankin import describe_profile, h_min, hermite_power, rankin_min, rankin_profile
from src.sources.catalog import catalog
from src.utils.budget_tracker import SearchBudget
from src.utils.errors import BudgetExhausted, DimensionError

A2 = [[2, 1], [1, 2]]
A3 = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]


def test_hexagonal_rankin_minima():
    """d_1(A2) = 2 and d_2(A2) = det = 3."""
    a2 = make_lattice(A2)
    assert rankin_min(a2, 1).det == 2
    assert rankin_min(a2, 2).det == 3
    # three pairs of minimal vectors
    assert len(rankin_min(a2, 1).minimizers) == 3


def test_corank_through_the_dual():
    """d_2(A3) = det(A3) · d_1(A3^v) = 4 · 3/4."""
    a3 = make_lattice(A3)
    result = rankin_min(a3, 2)
    assert result.det == 3
    assert result.witness.det == 3
    assert rankin_min(dual(a3), 1).det == Fraction(3, 4)


def test_profile():
    profile = rankin_profile(diagonal_lattice(1, 1, 4))
    assert [profile.d(k) for k in (1, 2, 3)] == [1, 1, 4]
    assert profile.certified
    rows = describe_profile(profile)
    assert [row["d_k"] for row in rows] == ["1", "1", "4"]
    assert rankin_profile(catalog("E8"), max_rank=1).d(1) == 2


def test_rank_out_of_range():
    with pytest.raises(DimensionError):
        rankin_min(make_lattice(A2), 3)


def test_h_min_semistable():
    flag = h_min(make_lattice(A2))
    assert epr_format(flag.h_min.sq_reduced) == "3^(1/2)"
    assert flag.destabilizer.rank == 2


def test_destabilizer_is_sum_of_minimizers():
    """Ties between ranks 1 and 2 of diag(1,1,4) give the rank-2 destabilizer."""
    flag = h_min(diagonal_lattice(1, 1, 4))
    assert flag.h_min.sq_reduced.is_one()
    assert flag.destabilizer.basis == ((1, 0, 0), (0, 1, 0))
    assert {m.rank for m in flag.minimizers} == {1, 2}


def test_destabilizing_vector():
    flag = h_min(diagonal_lattice(1, 4))
    assert flag.destabilizer.basis == ((1, 0),)
    assert flag.h_min.rank == 1


def test_budget_exhaustion():
    with pytest.raises(BudgetExhausted):
        rankin_min(catalog("E8"), 2, budget=SearchBudget("test", max_nodes=5, time_limit=60))


def test_hermite_power_is_monotone():
    assert hermite_power(1) == 1
    assert all(hermite_power(k) <= hermite_power(k + 1) for k in range(1, 8))
