"""
Tests for tensor multiplicativity of H_min and the reduction checks.
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from src.core.posreal import epr_format, epr_from_rat
from src.experiments.multiplicativity import (
    balance,
    check_multiplicativity,
    double_dual_product,
    require_rank_cap,
    reverify_witness,
)
from src.experiments.runner import run_tensor
from src.experiments.theorems import (
    check_filtered_split,
    check_isodual_reduction,
    check_mixed_signatures,
    check_rank_two,
    check_semistable_reduction,
    check_signature_bound,
)
from src.lattice.filtration import gs_filtration
from src.lattice.gram import SqHeight, diagonal_lattice, make_lattice, sublattice, tensor_product
from src.symmetry.isoduality import isoduality_witness
from src.utils.config import override_config, reset_config
from src.utils.errors import DomainError, RankCapExceeded

A2 = [[2, 1], [1, 2]]


@pytest.fixture(autouse=True)
def fresh_config():
    reset_config()
    yield
    reset_config()


@pytest.fixture
def d14():
    return diagonal_lattice(1, 4)


@pytest.fixture
def z2():
    return diagonal_lattice(1, 1)


class TestMultiplicativity:
    """H_min(E (x) F) against H_min(E) H_min(F)."""

    def test_diagonal_square(self, d14):
        verdict = check_multiplicativity(d14, d14)
        assert verdict.equal
        assert verdict.rhs.sq_reduced.is_one()
        assert verdict.violating_witness is None

    def test_hexagonal_with_diagonal(self, d14):
        verdict = check_multiplicativity(make_lattice(A2), d14)
        assert verdict.equal
        assert epr_format(verdict.lhs.sq_reduced) == "3^(1/2)"

    def test_summary(self, d14):
        result = run_tensor(d14, d14, ["bost"])
        assert result.summary == "equal, H_min = 1"
        assert result.status == "pass"
        assert not result.counterexample

    def test_unknown_check(self, d14):
        with pytest.raises(DomainError):
            run_tensor(d14, d14, ["bogus"])

    def test_rank_cap(self, d14):
        override_config(rank_cap=3)
        with pytest.raises(RankCapExceeded):
            require_rank_cap(4)
        with pytest.raises(RankCapExceeded):
            check_multiplicativity(d14, d14)

    def test_uncertified_mode_lifts_the_cap(self):
        override_config(rank_cap=1, uncertified_radius=Fraction(2))
        require_rank_cap(4)

    def test_reverification_rejects_a_non_violation(self, d14):
        product = tensor_product(d14, d14)
        witness = sublattice(product, [[1, 0, 0, 0]])
        report = reverify_witness(d14, d14, witness, SqHeight(epr_from_rat(1), 1))
        assert report.checks[0].passed
        assert not report.passed


class TestConstructions:
    """E x E^v and balancing."""

    def test_double_dual(self, d14):
        doubled = double_dual_product(d14)
        assert doubled.lattice == diagonal_lattice(1, 4, 1, Fraction(1, 4))
        assert doubled.orthogonal.orthogonal
        assert doubled.symplectic.symplectic
        assert doubled.orthogonal.ratio == 1

    def test_balance(self, d14):
        pair = balance(d14)
        assert pair.scale_rational() == Fraction(1, 2)
        assert pair.scaled == diagonal_lattice(Fraction(1, 2), 2)
        assert epr_format(pair.balanced_sq) == "1/2"

    def test_balance_of_a_line(self):
        pair = balance(diagonal_lattice(1))
        assert pair.scale_rational() == 1


class TestReductionChecks:
    """Executable reduction arguments on concrete pairs."""

    def test_filtered_split(self, d14):
        report = check_filtered_split(make_lattice(A2), d14, gs_filtration(d14))
        assert report.applicable
        assert report.passed

    def test_filtered_split_rejects_a_non_chain(self, d14):
        report = check_filtered_split(make_lattice(A2), d14, [sublattice(d14, [[1, 0]])])
        assert not report.applicable

    def test_rank_two(self, d14):
        assert check_rank_two(make_lattice(A2), d14).passed
        assert not check_rank_two(d14, make_lattice(A2)).applicable
        assert not check_rank_two(d14, diagonal_lattice(1, 1, 4)).applicable

    def test_signature_bound(self, d14, z2):
        report = check_signature_bound(d14, isoduality_witness(d14), z2, isoduality_witness(z2))
        assert report.passed
        assert report.data["signature"] == 0
        assert any(c.name == "destabilizer totally isotropic" for c in report.checks)

    def test_signature_bound_needs_witnesses(self, d14):
        assert not check_signature_bound(d14, None, d14, None).applicable

    def test_mixed_signatures(self, d14, z2):
        definite = check_mixed_signatures(z2, isoduality_witness(z2), z2, isoduality_witness(z2))
        assert definite.passed
        assert definite.data["case"] == 1
        mixed = check_mixed_signatures(z2, isoduality_witness(z2), d14, isoduality_witness(d14))
        assert mixed.passed
        assert mixed.data["case"] == 2

    def test_isodual_reduction(self, d14, z2):
        report = check_isodual_reduction(d14, z2)
        assert report.passed
        assert report.data["s"] == "1/2"
        assert report.data["symbolic"] is False
        assert any(c.name == "H(X (x) F) direct = min formula" for c in report.checks)

    def test_semistable_reduction(self, d14, z2):
        report = check_semistable_reduction(d14, z2)
        assert report.passed
        balanced = [c for c in report.checks if c.name.endswith("balanced: s H(E)^2 = H(E^v)^2 / s")]
        assert balanced and balanced[0].detail == "s = 1"

    def test_semistable_reduction_needs_isodual_factors(self, d14):
        report = check_semistable_reduction(d14, diagonal_lattice(1, 1, 1, 4))
        assert not report.applicable

    def test_all_checks_through_the_runner(self, d14, z2):
        result = run_tensor(d14, z2, ["bost", "sgn", "mix", "redsi", "redi", "c1", "r2"])
        lines = result.summary.splitlines()
        assert lines[0] == "equal, H_min = 1"
        assert lines[-1] == "r2: hypothesis satisfied, conclusion verified"
        assert result.status == "pass"
